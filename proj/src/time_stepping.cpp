#include "sfde/time_stepping.hpp"

#include "sfde/error.hpp"

#include <cmath>
#include <string>

namespace sfde {

namespace {

void check_path(const ModelParams& p, const FbmPath& path) {
    if (path.steps() != p.L)
        throw InputError("path has " + std::to_string(path.steps()) + " steps, model expects " + std::to_string(p.L));
    if (std::abs(path.tau - p.tau()) > 1e-12 * p.tau())
        throw InputError("path step " + std::to_string(path.tau) + " does not match T/L = " + std::to_string(p.tau()));
}

void check_mode(const ModelParams& p, std::size_t k) {
    if (k < 1 || k > p.N) throw InputError("mode " + std::to_string(k) + " outside 1.." + std::to_string(p.N));
}

}  // namespace

std::vector<double> gl_weights(double order, double tau, std::size_t n) {
    if (!(order > 0.0 && order <= 1.0))
        throw DomainError("gl_weights: order must lie in (0, 1], got " + std::to_string(order));
    if (!(tau > 0.0)) throw DomainError("gl_weights: step must be positive");
    if (n < 1) throw InputError("gl_weights: need at least one weight");
    std::vector<double> d(n);
    double c = 1.0;
    const double scale = std::pow(tau, -order);
    d[0] = scale;
    for (std::size_t i = 1; i < n; ++i) {
        c *= (static_cast<double>(i) - 1.0 - order) / static_cast<double>(i);
        d[i] = scale * c;
    }
    return d;
}

std::vector<double> ModeTrajectory::mode(std::size_t k) const {
    std::vector<double> out(steps_ + 1);
    for (std::size_t n = 0; n <= steps_; ++n) out[n] = at(k, n);
    return out;
}

ModeTrajectory march(std::span<const double> lam, std::span<const double> weights, double tau,
                     std::span<const double> rhs) {
    const std::size_t modes = lam.size();
    if (modes == 0) throw InputError("march: no modes");
    if (rhs.size() % modes != 0) throw InputError("march: rhs size is not a multiple of the mode count");
    const std::size_t steps = rhs.size() / modes;
    if (weights.size() < steps) throw InputError("march: need one weight per step");

    ModeTrajectory u(modes, steps);
    std::vector<double> diag(modes), history(modes);
    const double inv_tau = 1.0 / tau;
    for (std::size_t j = 0; j < modes; ++j) diag[j] = 1.0 / (inv_tau + weights[0] * lam[j]);

    for (std::size_t n = 1; n <= steps; ++n) {
        std::fill(history.begin(), history.end(), 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            const double d = weights[i];
            const auto past = u.row(n - i);
            for (std::size_t j = 0; j < modes; ++j) history[j] += d * past[j];
        }
        const auto prev = u.row(n - 1);
        auto next = u.row(n);
        const double* r = rhs.data() + (n - 1) * modes;
        for (std::size_t j = 0; j < modes; ++j)
            next[j] = (prev[j] * inv_tau - lam[j] * history[j] + r[j]) * diag[j];
    }
    return u;
}

ModeTrajectory step_field(const ModelParams& p, const SourceSpec& src, const FbmPath& path) {
    p.validate();
    check_path(p, path);
    if (src.f.size() != p.N || src.g.size() != p.N || src.h.size() != p.L)
        throw InputError("step_field: source sizes do not match (N, L)");
    std::vector<double> lam(p.N);
    for (std::size_t k = 1; k <= p.N; ++k) lam[k - 1] = p.lambda_s(k);
    std::vector<double> rhs(p.L * p.N);
    for (std::size_t n = 1; n <= p.L; ++n) {
        const double hn = src.h[n - 1];
        const double dw = path.increment(n) / p.tau();
        for (std::size_t k = 0; k < p.N; ++k) rhs[(n - 1) * p.N + k] = src.f[k] * hn + src.g[k] * dw;
    }
    return march(lam, gl_weights(1.0 - p.alpha, p.tau(), p.L), p.tau(), rhs);
}

std::vector<double> solve_v1(const ModelParams& p, std::size_t k, std::span<const double> h) {
    p.validate();
    check_mode(p, k);
    if (h.size() != p.L) throw InputError("solve_v1: need " + std::to_string(p.L) + " samples of h");
    const double lam = p.lambda_s(k);
    return march({&lam, 1}, gl_weights(1.0 - p.alpha, p.tau(), p.L), p.tau(), h).mode(1);
}

std::vector<double> solve_v2(const ModelParams& p, std::size_t k, const FbmPath& path) {
    p.validate();
    check_mode(p, k);
    check_path(p, path);
    const double lam = p.lambda_s(k);
    std::vector<double> rhs(p.L);
    for (std::size_t n = 1; n <= p.L; ++n) rhs[n - 1] = path.increment(n) / p.tau();
    return march({&lam, 1}, gl_weights(1.0 - p.alpha, p.tau(), p.L), p.tau(), rhs).mode(1);
}

std::vector<double> solve_v2_terminal(const ModelParams& p, std::span<const std::size_t> modes, const FbmPath& path) {
    p.validate();
    check_path(p, path);
    std::vector<double> lam;
    for (std::size_t k : modes) {
        check_mode(p, k);
        lam.push_back(p.lambda_s(k));
    }
    std::vector<double> rhs(p.L * modes.size());
    for (std::size_t n = 1; n <= p.L; ++n) {
        const double dw = path.increment(n) / p.tau();
        for (std::size_t j = 0; j < modes.size(); ++j) rhs[(n - 1) * modes.size() + j] = dw;
    }
    const auto u = march(lam, gl_weights(1.0 - p.alpha, p.tau(), p.L), p.tau(), rhs);
    const auto last = u.row(p.L);
    return {last.begin(), last.end()};
}

}  // namespace sfde
