#pragma once

#include <cstddef>

namespace sfde {

/// Orders of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MlParams {
    double alpha;  ///< in (0, 1]
    double beta;   ///< > 0

    /// Throws DomainError unless alpha in (0,1] and beta > 0.
    void validate() const;
};

/// Which evaluation route mittag_leffler takes for a given argument.
enum class MlRegime { series, integral, asymptotic, exponential };

/// Largest positive argument accepted by mittag_leffler (power series only).
inline constexpr double kMlPositiveCap = 5.0;
/// |z| at or below this value on the negative axis uses the power series.
inline constexpr double kMlSeriesLimit = 1.0;
/// -z at or above this value uses the inverse-power expansion.
inline constexpr double kMlAsymptoticLimit = 25.0;

/// Gamma function for x > 0.
double gamma_fn(double x);

/// E_{alpha,beta}(z) for real z <= kMlPositiveCap.
double mittag_leffler(const MlParams& p, double z);

/// Route that mittag_leffler uses for (p, z); exposed for crossover tests.
MlRegime ml_regime(const MlParams& p, double z);

/// Evaluate E_{alpha,beta}(z) through a specific route, bypassing the regime switch.
/// Throws DomainError if the route is not valid for (p, z).
double mittag_leffler_via(const MlParams& p, double z, MlRegime route);

/// Relaxation kernel E_{alpha,1}(-lambda_s * t^alpha).
double ml_kernel(double alpha, double lambda_s, double t);

}  // namespace sfde
