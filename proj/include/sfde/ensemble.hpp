#pragma once

#include "sfde/fbm.hpp"
#include "sfde/model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sfde {

/// Sample moments of u_k(T) over M trajectories.
struct EnsembleStats {
    std::size_t M = 0;
    std::size_t N = 0;
    std::vector<double> mean;
    std::vector<double> stderr_mean;
    std::vector<double> cov;  ///< N x N row-major, 1/(M-1) normalization

    /// 1-based mode indices
    double cov_at(std::size_t k, std::size_t l) const { return cov[(k - 1) * N + (l - 1)]; }
};

struct EnsembleOptions {
    FbmMethod method = FbmMethod::circulant;
    unsigned threads = 1;  ///< 0 picks the hardware concurrency
};

/// Path i is driven by substream derive_stream_seed(seed, i). Per-path terminal
/// values are stored and reduced in index order, so the result is bit-identical
/// for any thread count.
EnsembleStats run_ensemble(const ModelParams& p, const SourceSpec& src, std::size_t M, std::uint64_t seed,
                           const EnsembleOptions& opts = {});

/// Moments of already computed samples (M rows of N values each).
EnsembleStats summarize(const std::vector<std::vector<double>>& samples);

}  // namespace sfde
