#include <doctest.h>

#include "sfde/cov_kernel.hpp"
#include "sfde/ensemble.hpp"
#include "sfde/error.hpp"
#include "sfde/time_stepping.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace sfde;

namespace {

ModelParams small_model(double alpha, double s, double hurst, std::size_t L, std::size_t N) {
    ModelParams p;
    p.alpha = alpha;
    p.s = s;
    p.hurst = hurst;
    p.T = 0.5;
    p.L = L;
    p.N = N;
    return p;
}

}  // namespace

TEST_CASE("deterministic forcing gives an exactly zero covariance") {
    const auto p = small_model(0.4, 0.3, 0.2, 128, 6);
    auto src = benchmark::source(p);
    src.g.assign(p.N, 0.0);
    const auto st = run_ensemble(p, src, 50, 1);
    const auto u = step_field(p, src, sample_path(p.hurst, p.T, p.L, 999));
    for (std::size_t k = 1; k <= p.N; ++k) {
        CHECK(st.mean[k - 1] == u.at(k, p.L));
        CHECK(st.stderr_mean[k - 1] == 0.0);
        for (std::size_t l = 1; l <= p.N; ++l) CHECK(st.cov_at(k, l) == 0.0);
    }
}

TEST_CASE("zero source term gives zero-mean modes") {
    const auto p = small_model(0.6, 0.7, 0.8, 128, 8);
    auto src = benchmark::source(p);
    src.f.assign(p.N, 0.0);
    const auto st = run_ensemble(p, src, 1000, 42);
    for (std::size_t k = 0; k < p.N; ++k) CHECK(std::abs(st.mean[k]) <= 3.0 * st.stderr_mean[k]);
}

TEST_CASE("ensemble results do not depend on the worker count") {
    const auto p = small_model(0.3, 0.4, 0.8, 64, 5);
    const auto src = benchmark::source(p);
    const auto one = run_ensemble(p, src, 40, 7, {FbmMethod::circulant, 1});
    const auto three = run_ensemble(p, src, 40, 7, {FbmMethod::circulant, 3});
    CHECK(one.mean == three.mean);
    CHECK(one.cov == three.cov);
    CHECK(one.stderr_mean == three.stderr_mean);
    const auto other_seed = run_ensemble(p, src, 40, 8);
    CHECK(one.mean != other_seed.mean);
}

TEST_CASE("sample covariance is symmetric positive semidefinite") {
    const auto p = small_model(0.4, 0.7, 0.5, 64, 20);
    const auto st = run_ensemble(p, benchmark::source(p), 200, 3);
    Eigen::MatrixXd C(p.N, p.N);
    double trace = 0.0;
    for (std::size_t k = 1; k <= p.N; ++k) {
        trace += st.cov_at(k, k);
        CHECK(st.cov_at(k, k) >= 0.0);
        for (std::size_t l = 1; l <= p.N; ++l) {
            CHECK(st.cov_at(k, l) == st.cov_at(l, k));
            C(k - 1, l - 1) = st.cov_at(k, l);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * trace);
}

TEST_CASE("ensemble mean splits into the deterministic and stochastic parts") {
    const auto p = small_model(0.6, 0.3, 0.5, 64, 4);
    const auto src = benchmark::source(p);
    const std::size_t M = 30;
    const auto st = run_ensemble(p, src, M, 11);
    const FbmGenerator gen(p.hurst, p.T, p.L);
    for (std::size_t k = 1; k <= p.N; ++k) {
        double v2_mean = 0.0;
        for (std::size_t i = 0; i < M; ++i) v2_mean += solve_v2(p, k, gen.sample(11, i)).back();
        v2_mean /= M;
        const double a = src.f[k - 1] * solve_v1(p, k, src.h).back();
        const double b = src.g[k - 1] * v2_mean;
        CHECK(std::abs(st.mean[k - 1] - (a + b)) <= 1e-12 * (std::abs(a) + std::abs(b)));
    }
}

TEST_CASE("mode covariance matches g_1^2 Phi_11") {
    // Brownian forcing at the benchmark step; two modes keep the run short.
    auto p = small_model(0.6, 0.3, 0.5, 1024, 2);
    const auto src = benchmark::source(p);
    const std::size_t M = 2000;
    const auto st = run_ensemble(p, src, M, 2718);
    const double want = src.g[0] * src.g[0] * phi(p, 1, 1);
    // u_1(T) is Gaussian, so the sample variance has standard error sigma^2 sqrt(2 / (M - 1))
    const double se = want * std::sqrt(2.0 / (M - 1));
    CHECK(std::abs(st.cov_at(1, 1) - want) <= 3.0 * se);
}

TEST_CASE("ensemble preconditions") {
    const auto p = small_model(0.5, 0.5, 0.5, 16, 3);
    auto src = benchmark::source(p);
    CHECK_THROWS_AS(run_ensemble(p, src, 1, 0), InputError);
    src.h.pop_back();
    CHECK_THROWS_AS(run_ensemble(p, src, 10, 0), InputError);
    CHECK_THROWS_AS(summarize({{1.0, 2.0}, {1.0}}), InputError);
}
