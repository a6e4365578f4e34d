#pragma once

#include "sfde/fbm.hpp"
#include "sfde/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sfde {

/// Grunwald-Letnikov weights d_0..d_{n-1} of ((1 - xi) / tau)^order.
std::vector<double> gl_weights(double order, double tau, std::size_t n);

/// u_k^n for k = 1..N, n = 0..L, stored time-major.
class ModeTrajectory {
public:
    ModeTrajectory(std::size_t modes, std::size_t steps) : modes_(modes), steps_(steps), u_((steps + 1) * modes, 0.0) {}

    std::size_t modes() const { return modes_; }
    std::size_t steps() const { return steps_; }
    /// k is 1-based
    double at(std::size_t k, std::size_t n) const { return u_[n * modes_ + (k - 1)]; }
    double& at(std::size_t k, std::size_t n) { return u_[n * modes_ + (k - 1)]; }
    std::span<const double> row(std::size_t n) const { return {u_.data() + n * modes_, modes_}; }
    std::span<double> row(std::size_t n) { return {u_.data() + n * modes_, modes_}; }
    std::vector<double> mode(std::size_t k) const;

private:
    std::size_t modes_;
    std::size_t steps_;
    std::vector<double> u_;
};

/// Runs the implicit scheme
///   (1/tau + d_0 lam_j) u_j^n = u_j^{n-1}/tau - lam_j sum_{i=1}^{n-1} d_i u_j^{n-i} + rhs(j, n)
/// for every mode j at once. `rhs` has L rows of lam.size() entries (row n-1 is step n).
/// This is the building block behind step_field / solve_v1 / solve_v2, exposed so
/// tests can drive it with lam = 0 or the order-0 weights.
ModeTrajectory march(std::span<const double> lam, std::span<const double> weights, double tau,
                     std::span<const double> rhs);

ModeTrajectory step_field(const ModelParams& p, const SourceSpec& src, const FbmPath& path);

/// Deterministic mode response to h alone.
std::vector<double> solve_v1(const ModelParams& p, std::size_t k, std::span<const double> h);
/// Mode response to the fBm increments alone.
std::vector<double> solve_v2(const ModelParams& p, std::size_t k, const FbmPath& path);
/// Terminal values v2_k^L for several modes sharing one pass over the history.
std::vector<double> solve_v2_terminal(const ModelParams& p, std::span<const std::size_t> modes, const FbmPath& path);

}  // namespace sfde
