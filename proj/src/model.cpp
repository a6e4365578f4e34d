#include "sfde/model.hpp"

#include "sfde/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace sfde {

namespace {

void check_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
        throw DomainError(std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
}

}  // namespace

double ModelParams::lambda(std::size_t k) const {
    const double kpi = static_cast<double>(k) * std::numbers::pi;
    return kpi * kpi;
}

double ModelParams::lambda_s(std::size_t k) const { return std::pow(lambda(k), s); }

void ModelParams::validate() const {
    check_open_unit(alpha, "alpha");
    check_open_unit(s, "s");
    check_open_unit(hurst, "hurst");
    if (!(T > 0.0) || !std::isfinite(T)) throw InputError("T must be positive");
    if (L < 1) throw InputError("L must be at least 1");
    if (N < 1) throw InputError("N must be at least 1");
}

double sine_basis(std::size_t k, double x) {
    return std::numbers::sqrt2 * std::sin(static_cast<double>(k) * std::numbers::pi * x);
}

SineField project_onto_sines(const std::function<double(double)>& fn, std::size_t N) {
    // 30-point Gauss on 4N panels resolves sin(N pi x) with room to spare.
    using Rule = boost::math::quadrature::gauss<double, 30>;
    const std::size_t panels = 4 * N;
    SineField c(N, 0.0);
    for (std::size_t k = 1; k <= N; ++k) {
        double sum = 0.0;
        for (std::size_t j = 0; j < panels; ++j) {
            const double a = static_cast<double>(j) / panels;
            const double b = static_cast<double>(j + 1) / panels;
            sum += Rule::integrate([&](double x) { return fn(x) * sine_basis(k, x); }, a, b);
        }
        c[k - 1] = sum;
    }
    return c;
}

SineField sine_analysis(std::span<const double> samples, std::size_t N) {
    if (samples.size() < 2) throw InputError("sine_analysis: need at least two grid samples");
    if (N < 1) throw InputError("sine_analysis: need at least one mode");
    const std::size_t J = samples.size() - 1;
    if (J < 4 * N)
        throw InputError("sine_analysis: grid of " + std::to_string(samples.size()) + " points is too coarse for " +
                         std::to_string(N) + " modes");
    SineField c(N, 0.0);
    for (std::size_t k = 1; k <= N; ++k) {
        // phi_k vanishes at both ends, so the trapezoid end weights drop out.
        double sum = 0.0;
        for (std::size_t j = 1; j < J; ++j) sum += samples[j] * sine_basis(k, static_cast<double>(j) / J);
        c[k - 1] = sum / static_cast<double>(J);
    }
    return c;
}

std::vector<double> sine_synthesis(const SineField& c, std::span<const double> x) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
        double sum = 0.0;
        for (std::size_t k = 1; k <= c.size(); ++k) sum += c[k - 1] * sine_basis(k, x[j]);
        out[j] = sum;
    }
    return out;
}

std::vector<double> uniform_grid(std::size_t points) {
    if (points < 2) throw InputError("uniform_grid: need at least two points");
    std::vector<double> x(points);
    for (std::size_t j = 0; j < points; ++j) x[j] = static_cast<double>(j) / static_cast<double>(points - 1);
    return x;
}

void SourceSpec::validate(const ModelParams& p, double h_floor) const {
    if (f.size() != p.N || g.size() != p.N)
        throw InputError("source: f and g need " + std::to_string(p.N) + " coefficients, got " +
                         std::to_string(f.size()) + " and " + std::to_string(g.size()));
    if (h.size() != p.L)
        throw InputError("source: h needs " + std::to_string(p.L) + " samples, got " + std::to_string(h.size()));
    if (!(h_floor > 0.0)) throw InputError("source: h floor must be positive");
    for (std::size_t n = 0; n < h.size(); ++n)
        if (!(h[n] >= h_floor))
            throw InputError("source: h(t_" + std::to_string(n + 1) + ") = " + std::to_string(h[n]) +
                             " is below the floor " + std::to_string(h_floor));
}

std::vector<double> sample_h(const ModelParams& p, const std::function<double(double)>& h) {
    std::vector<double> out(p.L);
    for (std::size_t n = 1; n <= p.L; ++n) out[n - 1] = h(p.time(n));
    return out;
}

namespace benchmark {

double f(double x) { return 4.0 * x * (1.0 - x) * (1.0 - 2.0 * x); }
double g(double x) { return x * (1.0 - x) * (1.0 - x); }
double h(double t) { return t + 1.0; }

ModelParams params(const Triple& t) {
    ModelParams p;
    p.alpha = t.alpha;
    p.s = t.s;
    p.hurst = t.hurst;
    p.T = kT;
    p.L = kL;
    p.N = kN;
    return p;
}

SourceSpec source(const ModelParams& p) {
    return SourceSpec{project_onto_sines(f, p.N), project_onto_sines(g, p.N), sample_h(p, h)};
}

}  // namespace benchmark

double relative_l2(std::span<const double> approx, std::span<const double> exact) {
    if (approx.size() != exact.size()) throw InputError("relative_l2: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        num += (approx[i] - exact[i]) * (approx[i] - exact[i]);
        den += exact[i] * exact[i];
    }
    return std::sqrt(num / den);
}

}  // namespace sfde
