#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sfde {

/// (alpha, s, H, T, L, N) of the time-space fractional model on D = (0, 1).
struct ModelParams {
    double alpha = 0.5;
    double s = 0.5;
    double hurst = 0.5;
    double T = 1.0;
    std::size_t L = 1;  ///< time steps
    std::size_t N = 1;  ///< spectral modes

    double tau() const { return T / static_cast<double>(L); }
    /// Dirichlet Laplacian eigenvalue k^2 pi^2, k >= 1.
    double lambda(std::size_t k) const;
    /// (k^2 pi^2)^s
    double lambda_s(std::size_t k) const;
    double time(std::size_t n) const { return static_cast<double>(n) * tau(); }

    /// Throws DomainError for alpha, s, H outside (0, 1); InputError for T <= 0, L < 1, N < 1.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

/// Coefficients c_1..c_N in phi_k(x) = sqrt(2) sin(k pi x); element 0 holds c_1.
using SineField = std::vector<double>;

double sine_basis(std::size_t k, double x);

/// Coefficients via high-order Gauss-Legendre quadrature of a smooth function.
SineField project_onto_sines(const std::function<double(double)>& fn, std::size_t N);

/// Composite trapezoid on the uniform grid x_j = j / J, j = 0..J (samples.size() == J + 1).
SineField sine_analysis(std::span<const double> samples, std::size_t N);
/// sum_k c_k phi_k(x) at each x.
std::vector<double> sine_synthesis(const SineField& c, std::span<const double> x);

std::vector<double> uniform_grid(std::size_t points);

/// Forcing f(x) h(t) + g(x) dW/dt, projected onto the first N modes.
struct SourceSpec {
    SineField f;
    SineField g;
    std::vector<double> h;  ///< h(t_1)..h(t_L)

    /// Length checks against p, and h(t_n) >= h_floor > 0.
    void validate(const ModelParams& p, double h_floor) const;
};

std::vector<double> sample_h(const ModelParams& p, const std::function<double(double)>& h);

/// Benchmark data used by the `paper` preset.
namespace benchmark {
inline constexpr double kT = 0.5;
inline constexpr std::size_t kN = 20;
inline constexpr std::size_t kL = 1024;
inline constexpr std::size_t kPaths = 1000;

double f(double x);  // 4x(1-x)(1-2x)
double g(double x);  // x(1-x)^2
double h(double t);  // t + 1

struct Triple {
    double alpha, s, hurst;
};
/// The six (alpha, s, H) combinations of the reconstruction experiments.
inline constexpr Triple kTriples[] = {
    {0.4, 0.3, 0.2}, {0.6, 0.7, 0.2}, {0.6, 0.3, 0.5}, {0.4, 0.7, 0.5}, {0.3, 0.4, 0.8}, {0.7, 0.6, 0.8},
};

ModelParams params(const Triple& t);
SourceSpec source(const ModelParams& p);
}  // namespace benchmark

/// sqrt(sum (a - b)^2 / sum b^2) over paired samples.
double relative_l2(std::span<const double> approx, std::span<const double> exact);

}  // namespace sfde
