#include "sfde/ensemble.hpp"

#include "sfde/error.hpp"
#include "sfde/parallel.hpp"
#include "sfde/time_stepping.hpp"

#include <cmath>
#include <string>

namespace sfde {

EnsembleStats summarize(const std::vector<std::vector<double>>& samples) {
    const std::size_t M = samples.size();
    if (M < 2) throw InputError("ensemble: need at least 2 paths for a covariance, got " + std::to_string(M));
    const std::size_t N = samples.front().size();
    for (const auto& row : samples)
        if (row.size() != N) throw InputError("ensemble: ragged sample rows");

    EnsembleStats st;
    st.M = M;
    st.N = N;
    st.mean.assign(N, 0.0);
    st.stderr_mean.assign(N, 0.0);
    st.cov.assign(N * N, 0.0);

    // Shift by the first sample so a deterministic ensemble gives exactly zero spread.
    const auto& pivot = samples.front();
    std::vector<double> shift(N, 0.0);
    for (const auto& row : samples)
        for (std::size_t k = 0; k < N; ++k) shift[k] += row[k] - pivot[k];
    for (std::size_t k = 0; k < N; ++k) st.mean[k] = pivot[k] + shift[k] / static_cast<double>(M);

    std::vector<double> dev(N);
    for (const auto& row : samples) {
        for (std::size_t k = 0; k < N; ++k) dev[k] = row[k] - st.mean[k];
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t l = k; l < N; ++l) st.cov[k * N + l] += dev[k] * dev[l];
    }
    const double norm = 1.0 / static_cast<double>(M - 1);
    for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t l = k; l < N; ++l) {
            st.cov[k * N + l] *= norm;
            st.cov[l * N + k] = st.cov[k * N + l];
        }
        st.stderr_mean[k] = std::sqrt(st.cov[k * N + k] / static_cast<double>(M));
    }
    return st;
}

EnsembleStats run_ensemble(const ModelParams& p, const SourceSpec& src, std::size_t M, std::uint64_t seed,
                           const EnsembleOptions& opts) {
    p.validate();
    if (M < 2) throw InputError("ensemble: need at least 2 paths for a covariance, got " + std::to_string(M));
    if (src.f.size() != p.N || src.g.size() != p.N || src.h.size() != p.L)
        throw InputError("ensemble: source sizes do not match (N, L)");

    const FbmGenerator gen(p.hurst, p.T, p.L, opts.method);
    std::vector<std::vector<double>> terminal(M);
    parallel_for(M, opts.threads, [&](std::size_t i) {
        const auto u = step_field(p, src, gen.sample(seed, i));
        const auto last = u.row(p.L);
        terminal[i].assign(last.begin(), last.end());
    });
    return summarize(terminal);
}

}  // namespace sfde
