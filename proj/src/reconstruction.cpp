#include "sfde/reconstruction.hpp"

#include "sfde/error.hpp"
#include "sfde/time_stepping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sfde {

std::vector<double> v1_terminal(const ModelParams& p, std::span<const double> h) {
    p.validate();
    if (h.size() != p.L) throw InputError("v1: need " + std::to_string(p.L) + " samples of h");
    std::vector<double> lam(p.N), rhs(p.L * p.N);
    for (std::size_t k = 1; k <= p.N; ++k) lam[k - 1] = p.lambda_s(k);
    for (std::size_t n = 0; n < p.L; ++n)
        for (std::size_t k = 0; k < p.N; ++k) rhs[n * p.N + k] = h[n];
    const auto u = march(lam, gl_weights(1.0 - p.alpha, p.tau(), p.L), p.tau(), rhs);
    const auto last = u.row(p.L);
    return {last.begin(), last.end()};
}

SineField reconstruct_f(const EnsembleStats& stats, std::span<const double> v1) {
    if (v1.size() != stats.N) throw InputError("reconstruct_f: denominator count does not match the statistics");
    SineField f(stats.N);
    for (std::size_t k = 0; k < stats.N; ++k) {
        if (!(v1[k] > 0.0))
            throw InversionError("reconstruct_f: v1_" + std::to_string(k + 1) + "(T) = " + std::to_string(v1[k]) +
                                 " is not positive (is h bounded away from zero?)");
        f[k] = stats.mean[k] / v1[k];
    }
    return f;
}

SineField reconstruct_f(const EnsembleStats& stats, const ModelParams& p, std::span<const double> h) {
    return reconstruct_f(stats, v1_terminal(p, h));
}

GReconstruction reconstruct_g(const EnsembleStats& stats, const PhiMatrix& phi, double delta) {
    const std::size_t N = stats.N;
    if (phi.N != N) throw InputError("reconstruct_g: Phi is " + std::to_string(phi.N) + "x" + std::to_string(phi.N) +
                                     ", statistics have " + std::to_string(N) + " modes");
    if (!(delta >= 0.0)) throw InputError("reconstruct_g: rejection threshold must be nonnegative");
    auto require_positive = [&](std::size_t k, std::size_t l) {
        if (!(phi.at(k, l) > 0.0))
            throw InversionError("reconstruct_g: Phi_" + std::to_string(k) + "," + std::to_string(l) +
                                 " is not positive");
    };
    for (std::size_t k = 1; k <= N; ++k) require_positive(k, k);

    GReconstruction out;
    out.G_diag.resize(N);
    for (std::size_t k = 1; k <= N; ++k) out.G_diag[k - 1] = stats.cov_at(k, k) / phi.at(k, k);
    const auto top = std::max_element(out.G_diag.begin(), out.G_diag.end());
    if (!(*top > 0.0)) throw InversionError("reconstruct_g: no mode has positive G_kk; g appears to vanish");
    out.reference_mode = static_cast<std::size_t>(top - out.G_diag.begin()) + 1;
    const double floor = delta * *top;
    const std::size_t ref = out.reference_mode;

    out.g_hat.assign(N, 0.0);
    out.accepted.assign(N, false);
    for (std::size_t k = 1; k <= N; ++k) {
        const double G = out.G_diag[k - 1];
        if (G < floor || !(G > 0.0)) continue;
        require_positive(ref, k);
        out.accepted[k - 1] = true;
        const double sign = stats.cov_at(ref, k) / phi.at(ref, k) < 0.0 ? -1.0 : 1.0;
        out.g_hat[k - 1] = sign * std::sqrt(G);
    }
    return out;
}

std::vector<double> abs_field(const SineField& c, std::span<const double> x) {
    auto v = sine_synthesis(c, x);
    for (auto& e : v) e = std::abs(e);
    return v;
}

ReconstructionResult reconstruct(const ModelParams& p, const EnsembleStats& stats, const PhiMatrix& phi,
                                 std::span<const double> h, std::span<const double> x, double delta) {
    const auto v1 = v1_terminal(p, h);
    ReconstructionResult r;
    r.f_hat = reconstruct_f(stats, v1);
    const auto g = reconstruct_g(stats, phi, delta);
    r.g_hat = g.g_hat;
    r.reference_mode = g.reference_mode;
    r.x.assign(x.begin(), x.end());
    r.f_grid = sine_synthesis(r.f_hat, x);
    r.g_abs_grid = abs_field(r.g_hat, x);
    for (std::size_t k = 1; k <= p.N; ++k)
        r.modes.push_back({k, p.lambda(k), v1[k - 1], phi.at(k, k), g.G_diag[k - 1], g.accepted[k - 1]});
    return r;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("loglog_slope: need two or more paired points");
    double sx = 0.0, sy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw InputError("loglog_slope: values must be positive");
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

InstabilityReport instability_report(const ModelParams& p, std::span<const double> h, const PhiMatrix& phi) {
    if (phi.N != p.N) throw InputError("instability_report: Phi size does not match N");
    const auto v1 = v1_terminal(p, h);
    InstabilityReport rep;
    std::vector<double> lam, phis, v1s;
    for (std::size_t k = 1; k <= p.N; ++k) {
        const double pk = phi.at(k, k);
        rep.rows.push_back({k, p.lambda(k), v1[k - 1], pk, 1.0 / std::sqrt(pk)});
        lam.push_back(p.lambda(k));
        phis.push_back(pk);
        v1s.push_back(v1[k - 1]);
    }
    if (p.N >= 2) {
        rep.phi_slope = loglog_slope(lam, phis);
        rep.v1_slope = loglog_slope(lam, v1s);
    }
    rep.phi_bound = -2.0 * p.s * std::min(p.hurst / p.alpha, 1.0);
    rep.v1_bound = -p.s;
    return rep;
}

InstabilityReport instability_report(const ModelParams& p, std::span<const double> h, const PhiOptions& opts) {
    return instability_report(p, h, phi_matrix(p, opts));
}

}  // namespace sfde
