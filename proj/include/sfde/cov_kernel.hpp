#pragma once

#include "sfde/fbm.hpp"
#include "sfde/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace sfde {

/// sub: H < 1/2, classical: H = 1/2, super: H > 1/2
enum class PhiRegime { sub, classical, super };

std::string_view to_string(PhiRegime r);
PhiRegime phi_regime(double hurst);

struct PhiOptions {
    double rel_tol = 1e-6;         ///< stop once successive extrapolants differ by less (normalized)
    std::size_t min_cells = 256;
    std::size_t max_cells = 4096;  ///< cap on the halving ladder
    unsigned threads = 1;
};

/// Phi_kl = E[X_k X_l] with X_k = int_0^T E_{a,1}(-lam_k^s (T - r)^a) dW^H(r).
struct PhiMatrix {
    std::size_t N = 0;
    std::vector<double> values;  ///< N x N row-major, exactly symmetric
    PhiRegime regime = PhiRegime::classical;
    std::size_t cells = 0;       ///< finest mesh used
    double rel_change = 0.0;     ///< max |dPhi_kl| / sqrt(Phi_kk Phi_ll) between the last two extrapolants
    bool converged = false;

    double at(std::size_t k, std::size_t l) const { return values[(k - 1) * N + (l - 1)]; }
};

/// Integrand in the time-to-go variable u = T - r.
using Kernel = std::function<double(double)>;

/// Mesh u_i = T (i / cells)^grading, i = 0..cells, clustered at u = 0.
std::vector<double> graded_mesh(double T, std::size_t cells, double grading);

/// Covariance E[Y_i Y_j] of Y_i = int phi_i(u) dW^H(u) for the P1 hat functions on
/// `nodes` (dense, (n+1)^2 row-major). Meant for inspection and tests.
std::vector<double> hat_covariance(double hurst, std::span<const double> nodes);

/// Phi for arbitrary kernels; the building block behind phi_matrix. Kernels are
/// interpolated by P1 hats on a graded mesh (quadrature of the exact kernel when
/// H = 1/2), the mesh is halved from min_cells, and the second-order levels are
/// Richardson-extrapolated.
PhiMatrix phi_for_kernels(double hurst, double T, double grading, const std::vector<Kernel>& kernels,
                          const PhiOptions& opts = {});

/// Full N x N matrix for the model. Throws DomainError when H < 1/2 and alpha + H <= 1/2.
PhiMatrix phi_matrix(const ModelParams& p, const PhiOptions& opts = {});
double phi(const ModelParams& p, std::size_t k, std::size_t l, const PhiOptions& opts = {});

/// Exact E[v2_k^L v2_l^L] of the time-stepping scheme (no sampling): the discrete
/// impulse responses contracted with the fGn autocovariance. Differs from Phi by
/// the scheme's discretization bias.
double phi_scheme(const ModelParams& p, std::size_t k, std::size_t l);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Sample second moments of v2_k(T) over M paths, for a list of modes.
struct PhiMcMatrix {
    std::vector<std::size_t> modes;
    std::size_t M = 0;
    std::vector<double> estimate;   ///< modes.size()^2 row-major
    std::vector<double> std_error;

    /// i, j index into `modes`
    McEstimate at(std::size_t i, std::size_t j) const {
        const std::size_t m = modes.size();
        return {estimate[i * m + j], std_error[i * m + j]};
    }
};

/// `draw(i)` supplies path i.
PhiMcMatrix phi_mc_modes(const ModelParams& p, std::span<const std::size_t> modes, std::size_t M,
                         const std::function<FbmPath(std::size_t)>& draw, unsigned threads = 1);
PhiMcMatrix phi_mc_modes(const ModelParams& p, std::span<const std::size_t> modes, std::size_t M, std::uint64_t seed,
                         FbmMethod method = FbmMethod::circulant, unsigned threads = 1);
McEstimate phi_mc(const ModelParams& p, std::size_t k, std::size_t l, std::size_t M, std::uint64_t seed,
                  FbmMethod method = FbmMethod::circulant, unsigned threads = 1);

}  // namespace sfde
