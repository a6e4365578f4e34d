#include <doctest.h>

#include "sfde/error.hpp"
#include "sfde/reconstruction.hpp"
#include "sfde/time_stepping.hpp"

#include <cmath>

using namespace sfde;

namespace {

ModelParams model(double alpha, double s, double hurst, std::size_t N, std::size_t L = 256) {
    ModelParams p;
    p.alpha = alpha;
    p.s = s;
    p.hurst = hurst;
    p.T = 0.5;
    p.L = L;
    p.N = N;
    return p;
}

// Any positive, symmetric stand-in for Phi is enough for the algebra.
PhiMatrix synthetic_phi(std::size_t N) {
    PhiMatrix m;
    m.N = N;
    m.values.resize(N * N);
    for (std::size_t k = 1; k <= N; ++k)
        for (std::size_t l = 1; l <= N; ++l) m.values[(k - 1) * N + (l - 1)] = 1.0 / static_cast<double>(k + l);
    return m;
}

EnsembleStats exact_stats(const SineField& f, const SineField& g, std::span<const double> v1, const PhiMatrix& phi) {
    const std::size_t N = f.size();
    EnsembleStats st;
    st.M = 1000;
    st.N = N;
    st.mean.resize(N);
    st.stderr_mean.assign(N, 0.0);
    st.cov.resize(N * N);
    for (std::size_t k = 0; k < N; ++k) {
        st.mean[k] = f[k] * v1[k];
        for (std::size_t l = 0; l < N; ++l) st.cov[k * N + l] = g[k] * g[l] * phi.values[k * N + l];
    }
    return st;
}

}  // namespace

TEST_CASE("f is recovered exactly from noise-free means") {
    const auto p = model(0.4, 0.3, 0.2, 12);
    const auto src = benchmark::source(p);
    const auto v1 = v1_terminal(p, src.h);
    const auto st = exact_stats(src.f, src.g, v1, synthetic_phi(p.N));
    const auto f = reconstruct_f(st, p, src.h);
    for (std::size_t k = 0; k < p.N; ++k) {
        if (k % 2 == 0) {
            CHECK(std::abs(f[k]) < 1e-14);  // odd modes of the antisymmetric f
        } else {
            CHECK(std::abs(f[k] - src.f[k]) <= 1e-12 * std::abs(src.f[k]));
        }
    }
    for (std::size_t k = 1; k <= p.N; ++k) CHECK(v1[k - 1] == doctest::Approx(solve_v1(p, k, src.h).back()).epsilon(1e-14));
}

TEST_CASE("g is recovered up to one global sign") {
    const std::size_t N = 12;
    const auto phi = synthetic_phi(N);
    const auto g = project_onto_sines(benchmark::g, N);
    const std::vector<double> v1(N, 1.0);
    const auto st = exact_stats(SineField(N, 0.0), g, v1, phi);
    const auto rec = reconstruct_g(st, phi, 0.0);
    CHECK(rec.reference_mode == 1);
    double sign = rec.g_hat[0] > 0.0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < N; ++k) {
        CHECK(rec.accepted[k]);
        CHECK(std::abs(sign * rec.g_hat[k] - g[k]) <= 1e-10 * std::abs(g[k]));
    }
    const auto x = uniform_grid(201);
    const auto want = abs_field(g, x);
    const auto got = abs_field(rec.g_hat, x);
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::abs(got[j] - want[j]) <= 1e-12);

    SineField flipped = g;
    for (auto& c : flipped) c = -c;
    const auto rec_flip = reconstruct_g(exact_stats(SineField(N, 0.0), flipped, v1, phi), phi, 0.0);
    CHECK(rec_flip.G_diag == rec.G_diag);
    CHECK(abs_field(rec_flip.g_hat, x) == got);

    SineField negated = rec.g_hat;
    for (auto& c : negated) c = -c;
    CHECK(abs_field(negated, x) == got);
}

TEST_CASE("mixed-sign g keeps relative signs") {
    const std::size_t N = 5;
    const auto phi = synthetic_phi(N);
    const SineField g{0.2, -1.0, 0.5, 0.0, -0.05};
    const auto rec = reconstruct_g(exact_stats(SineField(N, 0.0), g, std::vector<double>(N, 1.0), phi), phi, 1e-4);
    CHECK(rec.reference_mode == 2);
    CHECK_FALSE(rec.accepted[3]);
    CHECK(rec.g_hat[3] == 0.0);
    for (std::size_t k : {0u, 1u, 2u, 4u}) CHECK(-rec.g_hat[k] == doctest::Approx(g[k]).epsilon(1e-12));
}

TEST_CASE("rejection threshold drops noise-level modes") {
    const std::size_t N = 6;
    const auto phi = synthetic_phi(N);
    const SineField g{1.0, 0.1, 0.01, 0.001, 1e-4, 1e-5};
    const auto st = exact_stats(SineField(N, 0.0), g, std::vector<double>(N, 1.0), phi);
    const auto rec = reconstruct_g(st, phi, 1e-4);
    // G_kk = g_k^2: 1, 1e-2, 1e-4 kept; 1e-6 and below dropped
    const bool want[] = {true, true, true, false, false, false};
    for (std::size_t k = 0; k < N; ++k) CHECK(rec.accepted[k] == want[k]);
}

TEST_CASE("f does not depend on the covariance input") {
    const auto p = model(0.6, 0.3, 0.5, 6);
    const auto src = benchmark::source(p);
    const auto v1 = v1_terminal(p, src.h);
    const auto phi = synthetic_phi(p.N);
    auto a = exact_stats(src.f, src.g, v1, phi);
    auto b = exact_stats(src.f, SineField(p.N, 3.0), v1, phi);
    CHECK(reconstruct_f(a, v1) == reconstruct_f(b, v1));
}

TEST_CASE("inversion errors") {
    const std::size_t N = 3;
    const auto phi = synthetic_phi(N);
    auto st = exact_stats(SineField{1, 2, 3}, SineField{1, 1, 1}, std::vector<double>(N, 1.0), phi);
    CHECK_THROWS_AS(reconstruct_f(st, std::vector<double>{1.0, 0.0, 1.0}), InversionError);
    CHECK_THROWS_AS(reconstruct_f(st, std::vector<double>{1.0, 1.0}), InputError);

    auto zero = exact_stats(SineField(N, 0.0), SineField(N, 0.0), std::vector<double>(N, 1.0), phi);
    CHECK_THROWS_AS(reconstruct_g(zero, phi), InversionError);

    auto bad = phi;
    bad.values[1] = -0.1;
    CHECK_THROWS_AS(reconstruct_g(st, bad), InversionError);
    CHECK_THROWS_AS(reconstruct_g(st, synthetic_phi(4)), InputError);
}

TEST_CASE("loglog_slope recovers an exact power law") {
    const auto p = model(0.5, 0.5, 0.5, 20);
    std::vector<double> lam, y;
    for (std::size_t k = 1; k <= 20; ++k) {
        lam.push_back(p.lambda(k));
        y.push_back(3.0 * std::pow(p.lambda(k), -0.3));
    }
    CHECK(loglog_slope(lam, y) == doctest::Approx(-0.3).epsilon(1e-10));
    CHECK_THROWS_AS(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), InputError);
}

TEST_CASE("instability report on a benchmark triple") {
    auto p = model(0.4, 0.3, 0.2, 20, 1024);
    const auto src = benchmark::source(p);
    const auto rep = instability_report(p, src.h);
    CHECK(rep.phi_bound == doctest::Approx(-0.3));
    CHECK(rep.v1_bound == doctest::Approx(-0.3));
    CHECK(rep.phi_slope <= rep.phi_bound + 0.15);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].v1 > 0.0);
        if (i > 0) CHECK(rep.rows[i].v1 <= rep.rows[i - 1].v1);
        CHECK(rep.rows[i].amplification == doctest::Approx(1.0 / std::sqrt(rep.rows[i].phi_kk)));
    }
}
