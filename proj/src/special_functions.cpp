#include "sfde/special_functions.hpp"

#include "sfde/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sfde {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::nearbyint(x);
}

// 1/Gamma(x), zero at the poles.
double reciprocal_gamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    if (x > 171.0) return std::exp(-std::lgamma(x));
    return 1.0 / std::tgamma(x);
}

double series(const MlParams& p, double z) {
    if (z == 0.0) return reciprocal_gamma(p.beta);
    const double log_abs_z = std::log(std::abs(z));
    double sum = 0.0;
    int small_in_a_row = 0;
    for (int k = 0; k < 20000; ++k) {
        const double arg = k * p.alpha + p.beta;
        const double magnitude = std::exp(k * log_abs_z - std::lgamma(arg));
        const double term = (z < 0.0 && (k & 1)) ? -magnitude : magnitude;
        sum += term;
        // terms eventually decrease monotonically once Gamma outgrows |z|^k
        const bool past_peak = std::log(std::abs(z)) < p.alpha * std::log(arg + 1.0);
        if (past_peak && magnitude <= 1e-17 * std::abs(sum)) {
            if (++small_in_a_row == 2) return sum;
        } else {
            small_in_a_row = 0;
        }
    }
    throw DomainError("mittag_leffler: power series did not converge");
}

// Inverse-power expansion for E_{alpha,beta}(-x), x large, truncated at its
// smallest term. Returns NaN when that term exceeds 1e-13 of the sum.
double asymptotic(const MlParams& p, double x) {
    double sum = 0.0;
    double x_pow = 1.0;
    double best_sum = 0.0;
    double best_bound = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= 200; ++m) {
        x_pow /= x;
        const double term = ((m & 1) ? 1.0 : -1.0) * x_pow * reciprocal_gamma(p.beta - m * p.alpha);
        sum += term;
        const double bound = std::abs(term);
        if (bound == 0.0) continue;
        if (bound <= 1e-16 * std::abs(sum)) return sum;
        if (bound < best_bound) {
            best_bound = bound;
            best_sum = sum;
        } else if (bound > 1e3 * best_bound) {
            break;
        }
    }
    if (best_bound <= 1e-13 * std::abs(best_sum)) return best_sum;
    return std::numeric_limits<double>::quiet_NaN();
}

// Hankel-contour representation collapsed onto the branch cut, valid for
// 0 < alpha < 1, beta < 1 + alpha and x > 0:
//   E_{a,b}(-x) = (1/pi) Int_0^inf e^{-r} r^{a-b}
//                 [r^a sin(pi b) + x sin(pi (b - a))] / (r^{2a} + 2 x r^a cos(pi a) + x^2) dr
double bridge_integral(double alpha, double beta, double x) {
    if (beta >= 1.0 + alpha) {
        // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z
        const double lower = bridge_integral(alpha, beta - alpha, x);
        return (lower - reciprocal_gamma(beta - alpha)) / (-x);
    }
    const double sin_b = std::sin(kPi * beta);
    const double sin_ba = std::sin(kPi * (beta - alpha));
    const double cos_a = std::cos(kPi * alpha);
    auto integrand = [=](double r) {
        if (r <= 0.0) return 0.0;
        const double ra = std::pow(r, alpha);
        const double denom = ra * ra + 2.0 * x * ra * cos_a + x * x;
        return std::exp(-r) * std::pow(r, alpha - beta) * (ra * sin_b + x * sin_ba) / denom;
    };

    // integrate() is non-const in this Boost release; one rule pair per thread.
    thread_local boost::math::quadrature::tanh_sinh<double> finite_rule;
    thread_local boost::math::quadrature::exp_sinh<double> tail_rule;

    // The denominator is smallest near r^alpha = x; put a breakpoint there.
    const double peak = std::pow(x, 1.0 / alpha);
    const double split = (peak > 1.0 && peak < 40.0) ? peak : 1.0;
    const double tol = 1e-15;
    double head = 0.0;
    if (peak < split) {
        head = finite_rule.integrate(integrand, 0.0, peak, tol) +
               finite_rule.integrate(integrand, peak, split, tol);
    } else {
        head = finite_rule.integrate(integrand, 0.0, split, tol);
    }
    const double tail = tail_rule.integrate(integrand, split, std::numeric_limits<double>::infinity(), tol);
    return (head + tail) / kPi;
}

double exponential_family(const MlParams& p, double z) {
    // alpha == 1: E_{1,1} = exp, E_{1,2} = (exp(z)-1)/z; other beta only via the series.
    if (p.beta == 1.0) return std::exp(z);
    if (p.beta == 2.0) return z == 0.0 ? 1.0 : std::expm1(z) / z;
    if (std::abs(z) <= kMlSeriesLimit || z > 0.0) return series(p, z);
    throw DomainError("mittag_leffler: alpha = 1 supports beta in {1, 2} for z < -1");
}

void check_argument(const MlParams& p, double z) {
    p.validate();
    if (!std::isfinite(z)) throw DomainError("mittag_leffler: non-finite argument");
    if (z > kMlPositiveCap)
        throw DomainError("mittag_leffler: argument " + std::to_string(z) + " above the positive cap " +
                          std::to_string(kMlPositiveCap));
}

}  // namespace

void MlParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("mittag_leffler: alpha must lie in (0, 1], got " + std::to_string(alpha));
    if (!(beta > 0.0)) throw DomainError("mittag_leffler: beta must be positive, got " + std::to_string(beta));
}

double gamma_fn(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("gamma_fn: argument must be positive and finite, got " + std::to_string(x));
    return std::tgamma(x);
}

MlRegime ml_regime(const MlParams& p, double z) {
    check_argument(p, z);
    if (p.alpha == 1.0) return MlRegime::exponential;
    if (z >= -kMlSeriesLimit) return MlRegime::series;
    if (-z >= kMlAsymptoticLimit && std::isfinite(asymptotic(p, -z))) return MlRegime::asymptotic;
    return MlRegime::integral;
}

double mittag_leffler_via(const MlParams& p, double z, MlRegime route) {
    check_argument(p, z);
    switch (route) {
        case MlRegime::exponential:
            if (p.alpha != 1.0) throw DomainError("mittag_leffler: exponential route needs alpha = 1");
            return exponential_family(p, z);
        case MlRegime::series:
            return series(p, z);
        case MlRegime::integral:
            if (p.alpha >= 1.0 || z >= 0.0)
                throw DomainError("mittag_leffler: integral route needs alpha < 1 and z < 0");
            return bridge_integral(p.alpha, p.beta, -z);
        case MlRegime::asymptotic: {
            if (p.alpha >= 1.0 || z >= 0.0)
                throw DomainError("mittag_leffler: asymptotic route needs alpha < 1 and z < 0");
            const double value = asymptotic(p, -z);
            if (!std::isfinite(value))
                throw DomainError("mittag_leffler: asymptotic expansion does not converge at this argument");
            return value;
        }
    }
    throw DomainError("mittag_leffler: unknown route");
}

double mittag_leffler(const MlParams& p, double z) {
    check_argument(p, z);
    if (p.alpha == 1.0) return exponential_family(p, z);
    if (z >= -kMlSeriesLimit) return series(p, z);
    if (-z >= kMlAsymptoticLimit) {
        const double value = asymptotic(p, -z);
        if (std::isfinite(value)) return value;
    }
    return bridge_integral(p.alpha, p.beta, -z);
}

double ml_kernel(double alpha, double lambda_s, double t) {
    if (!(t >= 0.0)) throw DomainError("ml_kernel: time must be nonnegative");
    if (!(lambda_s >= 0.0)) throw DomainError("ml_kernel: lambda^s must be nonnegative");
    if (t == 0.0 || lambda_s == 0.0) return 1.0;
    return mittag_leffler({alpha, 1.0}, -lambda_s * std::pow(t, alpha));
}

}  // namespace sfde
