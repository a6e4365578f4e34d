#include <doctest.h>

#include "sfde/cov_kernel.hpp"
#include "sfde/error.hpp"
#include "sfde/special_functions.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <vector>

using namespace sfde;

namespace {

// Covariance of int phi_i dW for P1 hats, built independently from
// R(x, y) = (x^{2H} + y^{2H} - |x - y|^{2H}) / 2 via
//   int phi dW = phi(T) W(T) - int phi'(u) W(u) du.
std::vector<double> hat_covariance_by_parts(double H, const std::vector<double>& u) {
    const std::size_t n = u.size() - 1, rows = n + 1;
    const double T = u.back(), e = 2.0 * H;
    auto pw1 = [&](double a, double b) { return (std::pow(b, e + 1) - std::pow(a, e + 1)) / (e + 1); };
    auto F = [&](double z) { return std::pow(std::abs(z), e + 2) / ((e + 1) * (e + 2)); };
    // int_c int_d |x - y|^{2H}
    auto rect = [&](double a, double b, double c, double d) { return F(b - c) - F(b - d) - F(a - c) + F(a - d); };
    auto RR = [&](std::size_t c, std::size_t d) {
        const double a = u[c], b = u[c + 1], cc = u[d], dd = u[d + 1];
        return 0.5 * ((dd - cc) * pw1(a, b) + (b - a) * pw1(cc, dd) - rect(a, b, cc, dd));
    };
    auto RT = [&](std::size_t c) {
        const double a = u[c], b = u[c + 1];
        return 0.5 * ((b - a) * std::pow(T, e) + pw1(a, b) - pw1(T - b, T - a));
    };
    // slope of hat i on cell c
    auto slope = [&](std::size_t i, std::size_t c) {
        const double h = u[c + 1] - u[c];
        if (c + 1 == i) return 1.0 / h;
        if (c == i) return -1.0 / h;
        return 0.0;
    };
    std::vector<double> C(rows * rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < rows; ++j) {
            double v = (i == n && j == n) ? std::pow(T, e) : 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                const double si = slope(i, c), sj = slope(j, c);
                if (j == n) v -= si * RT(c);
                if (i == n) v -= sj * RT(c);
                if (si == 0.0) continue;
                for (std::size_t d = 0; d < n; ++d) {
                    const double sd = slope(j, d);
                    if (sd != 0.0) v += si * sd * RR(c, d);
                }
            }
            C[i * rows + j] = v;
        }
    return C;
}

ModelParams triple(double alpha, double s, double hurst, std::size_t N = 5) {
    ModelParams p;
    p.alpha = alpha;
    p.s = s;
    p.hurst = hurst;
    p.T = 0.5;
    p.L = 1024;
    p.N = N;
    return p;
}

}  // namespace

TEST_CASE("hat covariance agrees with the integration-by-parts construction") {
    for (double H : {0.2, 0.35, 0.5, 0.65, 0.8}) {
        for (double grading : {1.0, 3.0}) {
            const auto u = graded_mesh(0.5, 12, grading);
            const auto got = hat_covariance(H, u);
            const auto want = hat_covariance_by_parts(H, u);
            double scale = 0.0;
            for (double v : want) scale = std::max(scale, std::abs(v));
            CAPTURE(H);
            CAPTURE(grading);
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("hat covariance on a mesh with far-apart cells") {
    // 40 uniform cells exercise the tensor Gauss branches of the pair integrals.
    for (double H : {0.25, 0.75}) {
        const auto u = graded_mesh(1.0, 40, 1.0);
        const auto got = hat_covariance(H, u);
        const auto want = hat_covariance_by_parts(H, u);
        double scale = 0.0;
        for (double v : want) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-9 * scale);
    }
}

TEST_CASE("constant kernel gives the variance of W(T)") {
    PhiOptions opts;
    opts.min_cells = 16;
    for (double H : {0.2, 0.5, 0.8}) {
        const auto m = phi_for_kernels(H, 0.5, 2.0, {[](double) { return 1.0; }}, opts);
        CHECK(m.values[0] == doctest::Approx(std::pow(0.5, 2.0 * H)).epsilon(1e-12));
        CHECK(m.converged);
    }
}

TEST_CASE("classical regime matches a one-dimensional quadrature of the squared kernel") {
    const auto p = triple(0.6, 0.3, 0.5);
    boost::math::quadrature::tanh_sinh<double> rule;
    for (std::size_t k : {1u, 3u}) {
        const double lam = p.lambda_s(k);
        const double want =
            rule.integrate([&](double r) { return std::pow(ml_kernel(p.alpha, lam, r), 2); }, 0.0, p.T, 1e-14);
        CHECK(std::abs(phi(p, k, k) - want) <= 1e-8 * want);
    }
}

TEST_CASE("Phi against a by-parts quadrature of the exact kernel") {
    // Phi = e(T)^2 T^{2H} - 2 e(T) int e'(u) R(T, u) du + int int e'(x) e'(y) R(x, y),
    // e'(u) = -lam u^{a-1} E_{a,a}(-lam u^a). Evaluated on a fine product rule in
    // v = u^a, where e' dv becomes smooth.
    for (auto [alpha, s, H] : {std::tuple{0.4, 0.3, 0.2}, std::tuple{0.7, 0.6, 0.8}}) {
        const auto p = triple(alpha, s, H);
        const double lam = p.lambda_s(1), T = p.T, e2 = 2.0 * H;
        const double eT = ml_kernel(alpha, lam, T);
        auto R = [&](double x, double y) { return 0.5 * (std::pow(x, e2) + std::pow(y, e2) - std::pow(std::abs(x - y), e2)); };
        // de/dv with v = u^alpha: -lam E_{a,a}(-lam v) / alpha
        const double vmax = std::pow(T, alpha);
        const std::size_t n = 1200;
        std::vector<double> v(n), w(n), dedv(n), uu(n);
        // composite midpoint in v
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = (i + 0.5) * vmax / n;
            w[i] = vmax / n;
            uu[i] = std::pow(v[i], 1.0 / alpha);
            dedv[i] = -lam * mittag_leffler({alpha, alpha}, -lam * v[i]) / alpha;
        }
        double cross = 0.0, dbl = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cross += w[i] * dedv[i] * R(T, uu[i]);
            for (std::size_t j = 0; j < n; ++j) dbl += w[i] * w[j] * dedv[i] * dedv[j] * R(uu[i], uu[j]);
        }
        const double want = eT * eT * std::pow(T, e2) - 2.0 * eT * cross + dbl;
        const double got = phi(p, 1, 1);
        CAPTURE(H);
        CHECK(got == doctest::Approx(want).epsilon(1e-4));
    }
}

TEST_CASE("Phi matrix invariants") {
    for (auto [alpha, s, H] : {std::tuple{0.4, 0.3, 0.2}, std::tuple{0.6, 0.3, 0.5}, std::tuple{0.3, 0.4, 0.8}}) {
        const auto p = triple(alpha, s, H, 6);
        const auto m = phi_matrix(p);
        CAPTURE(H);
        CHECK(m.converged);
        CHECK(m.rel_change <= 1e-6);
        for (std::size_t k = 1; k <= p.N; ++k) {
            CHECK(m.at(k, k) > 0.0);
            if (k > 1) CHECK(m.at(k, k) <= m.at(k - 1, k - 1));
            for (std::size_t l = 1; l <= p.N; ++l) {
                CHECK(m.at(k, l) == m.at(l, k));
                CHECK(m.at(k, l) > 0.0);
                CHECK(m.at(k, l) * m.at(k, l) <= m.at(k, k) * m.at(l, l) + 1e-12);
            }
        }
        CHECK(phi(p, 2, 5) == doctest::Approx(m.at(2, 5)).epsilon(1e-6));
    }
}

TEST_CASE("Phi refuses the non-integrable sub-diffusive corner") {
    auto p = triple(0.2, 0.5, 0.25);
    CHECK_THROWS_AS(phi_matrix(p), DomainError);
    CHECK_THROWS_AS(phi(p, 1, 1), DomainError);
    p.alpha = 0.3;
    CHECK_NOTHROW(phi(p, 1, 1));
}

TEST_CASE("phi_mc hooks and agreement with the quadrature") {
    auto p = triple(0.6, 0.3, 0.5);
    const std::size_t modes[] = {1, 2};
    const auto zero = phi_mc_modes(p, modes, 5, [&](std::size_t) {
        return FbmPath{p.hurst, p.tau(), std::vector<double>(p.L + 1, 0.0)};
    });
    CHECK(zero.at(0, 1).estimate == 0.0);
    CHECK(zero.at(0, 1).std_error == 0.0);
    CHECK_THROWS_AS(phi_mc(p, 1, 1, 1, 3), InputError);

    p.L = 512;
    const auto mc = phi_mc(p, 1, 1, 4000, 2024);
    CHECK(mc.estimate >= 0.0);
    CHECK(std::abs(mc.estimate - phi(p, 1, 1)) <= 3.0 * mc.std_error);
}

TEST_CASE("phi_mc estimates the exact second moment of the scheme") {
    const std::size_t modes[] = {1, 4};
    for (auto [alpha, s, H] : {std::tuple{0.6, 0.7, 0.2}, std::tuple{0.7, 0.6, 0.8}}) {
        auto p = triple(alpha, s, H);
        p.L = 256;
        const auto mc = phi_mc_modes(p, modes, 3000, 31);
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) {
                const auto e = mc.at(a, b);
                CHECK(std::abs(e.estimate - phi_scheme(p, modes[a], modes[b])) <= 3.0 * e.std_error);
            }
        CHECK(phi_scheme(p, 1, 4) == doctest::Approx(phi_scheme(p, 4, 1)).epsilon(1e-12));
    }
}

TEST_CASE("scheme second moment approaches Phi as the step shrinks") {
    auto p = triple(0.6, 0.7, 0.2);
    const double exact = phi(p, 3, 3);
    double prev = 1.0;
    for (std::size_t L : {128u, 256u, 512u, 1024u}) {
        p.L = L;
        const double bias = std::abs(phi_scheme(p, 3, 3) - exact) / exact;
        CHECK(bias < prev);
        prev = bias;
    }
}
