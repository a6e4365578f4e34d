#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfde {

/// Sampled fractional Brownian motion on t_n = n * tau, n = 0..L.
struct FbmPath {
    double hurst = 0.5;
    double tau = 0.0;
    std::vector<double> values;  ///< values[0] == 0, size L + 1

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
    /// W(t_n) - W(t_{n-1}), n >= 1
    double increment(std::size_t n) const { return values[n] - values[n - 1]; }
};

enum class FbmMethod { cholesky, circulant };

std::string_view to_string(FbmMethod method);
/// Throws InputError for anything other than "cholesky" or "circulant".
FbmMethod parse_fbm_method(std::string_view name);

/// Cov(W(t), W(s)) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
double fbm_cov(double hurst, double t, double s);

/// Autocovariance of fractional Gaussian noise with step tau at lag j.
double fgn_autocov(double hurst, double tau, std::size_t lag);

/// Reusable sampler for one (H, T, L, method). Setup (Cholesky factor or
/// circulant eigenvalues) happens once; `sample` is const and thread-safe.
class FbmGenerator {
public:
    FbmGenerator(double hurst, double horizon, std::size_t steps, FbmMethod method = FbmMethod::circulant);
    ~FbmGenerator();
    FbmGenerator(FbmGenerator&&) noexcept;
    FbmGenerator& operator=(FbmGenerator&&) noexcept;

    /// Path `index` of the run seeded by `seed`; bit-identical for equal arguments.
    FbmPath sample(std::uint64_t seed, std::uint64_t index) const;

    double hurst() const { return hurst_; }
    double tau() const { return tau_; }
    std::size_t steps() const { return steps_; }
    FbmMethod requested_method() const { return requested_; }
    /// Method actually used; differs from the request after a circulant fallback.
    FbmMethod method() const { return method_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct Circulant;
    struct Cholesky;

    double hurst_;
    double tau_;
    std::size_t steps_;
    FbmMethod requested_;
    FbmMethod method_;
    std::vector<std::string> warnings_;
    std::unique_ptr<Circulant> circulant_;
    std::unique_ptr<Cholesky> cholesky_;
};

/// Single path: equivalent to FbmGenerator(hurst, horizon, steps, method).sample(seed, 0).
FbmPath sample_path(double hurst, double horizon, std::size_t steps, std::uint64_t seed,
                    FbmMethod method = FbmMethod::circulant);

}  // namespace sfde
