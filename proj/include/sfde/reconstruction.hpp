#pragma once

#include "sfde/cov_kernel.hpp"
#include "sfde/ensemble.hpp"
#include "sfde/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sfde {

/// v1_k^L for k = 1..N from one multi-mode pass of the scheme.
std::vector<double> v1_terminal(const ModelParams& p, std::span<const double> h);

/// f_k = mean_k / v1_k; throws InversionError naming the first mode with v1_k <= 0.
SineField reconstruct_f(const EnsembleStats& stats, std::span<const double> v1);
SineField reconstruct_f(const EnsembleStats& stats, const ModelParams& p, std::span<const double> h);

inline constexpr double kDefaultRejection = 1e-4;

struct GReconstruction {
    SineField g_hat;                ///< signed relative to the reference mode (global sign is arbitrary)
    std::vector<double> G_diag;     ///< cov_kk / Phi_kk
    std::vector<bool> accepted;
    std::size_t reference_mode = 0; ///< 1-based argmax of G_diag
};

/// G_kl = cov_kl / Phi_kl, |g_k| = sqrt(max(G_kk, 0)), modes with G_kk < delta * max G rejected,
/// sign(g_k) = sign(G_{k*,k}). Only Phi_kk and the reference row Phi_{k*,k} are read; those must be
/// positive. Throws InversionError when no G_kk is positive.
GReconstruction reconstruct_g(const EnsembleStats& stats, const PhiMatrix& phi, double delta = kDefaultRejection);

/// |sum_k c_k phi_k(x)|
std::vector<double> abs_field(const SineField& c, std::span<const double> x);

struct ModeDiagnostic {
    std::size_t k;
    double lambda;
    double v1;
    double phi_kk;
    double G_kk;
    bool accepted;
};

struct ReconstructionResult {
    SineField f_hat;
    SineField g_hat;
    std::vector<double> x;
    std::vector<double> f_grid;
    std::vector<double> g_abs_grid;
    std::size_t reference_mode = 0;
    std::vector<ModeDiagnostic> modes;
};

ReconstructionResult reconstruct(const ModelParams& p, const EnsembleStats& stats, const PhiMatrix& phi,
                                 std::span<const double> h, std::span<const double> x, double delta = kDefaultRejection);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct InstabilityRow {
    std::size_t k;
    double lambda;
    double v1;
    double phi_kk;
    double amplification;  ///< 1 / sqrt(Phi_kk)
};

struct InstabilityReport {
    std::vector<InstabilityRow> rows;
    double phi_slope = 0.0;  ///< d log Phi_kk / d log lambda_k
    double v1_slope = 0.0;   ///< d log v1_k(T) / d log lambda_k
    double phi_bound = 0.0;  ///< -2 s min(H / alpha, 1)
    double v1_bound = 0.0;   ///< -s
};

InstabilityReport instability_report(const ModelParams& p, std::span<const double> h, const PhiMatrix& phi);
InstabilityReport instability_report(const ModelParams& p, std::span<const double> h, const PhiOptions& opts = {});

}  // namespace sfde
