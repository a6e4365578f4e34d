#include "sfde/cov_kernel.hpp"

#include "sfde/error.hpp"
#include "sfde/parallel.hpp"
#include "sfde/special_functions.hpp"
#include "sfde/time_stepping.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace sfde {

namespace {

struct Rule01 {
    std::vector<double> x, w;
};

// Gauss-Legendre on [0, 1].
template <unsigned M>
Rule01 make_rule() {
    using G = boost::math::quadrature::gauss<double, M>;
    Rule01 r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            r.x.push_back(0.5);
            r.w.push_back(0.5 * w[i]);
            continue;
        }
        r.x.push_back(0.5 * (1.0 - a[i]));
        r.w.push_back(0.5 * w[i]);
        r.x.push_back(0.5 * (1.0 + a[i]));
        r.w.push_back(0.5 * w[i]);
    }
    return r;
}

const Rule01& rule2() { static const Rule01 r = make_rule<2>(); return r; }
const Rule01& rule3() { static const Rule01 r = make_rule<3>(); return r; }
const Rule01& rule5() { static const Rule01 r = make_rule<5>(); return r; }
const Rule01& rule8() { static const Rule01 r = make_rule<8>(); return r; }

// J_ab = int_{cell x} int_{cell y} L_a(x) M_b(y) |x - y|^beta, with L_0, L_1 the
// falling/rising linear shapes on the x cell and M_0, M_1 those on the y cell.
class CellPairKernel {
public:
    explicit CellPairKernel(double beta) : beta_(beta) {
        c2_ = 1.0 / ((beta + 1.0) * (beta + 2.0));
        c3_ = c2_ / (beta + 3.0);
        c4_ = c3_ / (beta + 4.0);
    }

    std::array<double, 4> operator()(double x0, double h1, double y0, double h2) const {
        const double gap = std::max({0.0, y0 - (x0 + h1), x0 - (y0 + h2)});
        const double hmax = std::max(h1, h2);
        if (gap < 4.0 * hmax) return closed(x0 - y0, h1, h2);
        const double ratio = gap / hmax;
        const Rule01& r = ratio >= 128.0 ? rule2() : ratio >= 32.0 ? rule3() : rule5();
        return tensor(r, x0, h1, y0, h2);
    }

private:
    // Repeated antiderivatives of |z|^beta evaluated at one point.
    struct Anti {
        double k2, k3, k4;
    };
    Anti anti(double z) const {
        const double a = std::abs(z);
        const double p = a == 0.0 ? 0.0 : std::pow(a, beta_ + 2.0);
        const double sgn = z < 0.0 ? -1.0 : 1.0;
        return {p * c2_, sgn * p * a * c3_, p * a * a * c4_};
    }

    std::array<double, 4> closed(double A, double h1, double h2) const {
        const Anti a0 = anti(A), a1 = anti(A + h1), b0 = anti(A - h2), b1 = anti(A - h2 + h1);
        // Q0[K_j, B] = K_{j+1}(B + h1) - K_{j+1}(B)
        // Q1[K_j, B] = h1 K_{j+1}(B + h1) - (K_{j+2}(B + h1) - K_{j+2}(B))
        const double q0_1_A = a1.k2 - a0.k2, q0_1_B = b1.k2 - b0.k2;
        const double q1_1_A = h1 * a1.k2 - (a1.k3 - a0.k3), q1_1_B = h1 * b1.k2 - (b1.k3 - b0.k3);
        const double q0_2_A = a1.k3 - a0.k3, q0_2_B = b1.k3 - b0.k3;
        const double q1_2_A = h1 * a1.k3 - (a1.k4 - a0.k4), q1_2_B = h1 * b1.k3 - (b1.k4 - b0.k4);

        // I_mn = int_0^h1 int_0^h2 xi^m eta^n |A + xi - eta|^beta
        const double i00 = q0_1_A - q0_1_B;
        const double i10 = q1_1_A - q1_1_B;
        const double i01 = -h2 * q0_1_B + q0_2_A - q0_2_B;
        const double i11 = -h2 * q1_1_B + q1_2_A - q1_2_B;

        const double j11 = i11 / (h1 * h2);
        const double j10 = i10 / h1 - j11;
        const double j01 = i01 / h2 - j11;
        const double j00 = i00 - i10 / h1 - i01 / h2 + j11;
        return {j00, j01, j10, j11};
    }

    std::array<double, 4> tensor(const Rule01& r, double x0, double h1, double y0, double h2) const {
        std::array<double, 4> j{};
        for (std::size_t a = 0; a < r.x.size(); ++a) {
            const double x = x0 + h1 * r.x[a];
            for (std::size_t b = 0; b < r.x.size(); ++b) {
                const double y = y0 + h2 * r.x[b];
                const double k = r.w[a] * r.w[b] * std::pow(std::abs(x - y), beta_);
                const double lx1 = r.x[a], lx0 = 1.0 - lx1;
                const double my1 = r.x[b], my0 = 1.0 - my1;
                j[0] += k * lx0 * my0;
                j[1] += k * lx0 * my1;
                j[2] += k * lx1 * my0;
                j[3] += k * lx1 * my1;
            }
        }
        for (auto& v : j) v *= h1 * h2;
        return j;
    }

    double beta_;
    double c2_, c3_, c4_;
};

// Y (+)= C E for the hat covariance C of the sub- or super-diffusive regime.
// E has one row per node and `m` columns.
void apply_block(double hurst, std::span<const double> nodes, std::span<const double> E, std::size_t m,
                 std::size_t p_begin, std::size_t p_end, std::vector<double>& Y) {
    const std::size_t cells = nodes.size() - 1;
    const double H = hurst;
    const double beta = 2.0 * H - 2.0;
    const CellPairKernel pair(beta);

    auto add = [&](std::size_t row, std::size_t col, double c) {
        double* y = Y.data() + row * m;
        const double* e = E.data() + col * m;
        for (std::size_t k = 0; k < m; ++k) y[k] += c * e[k];
    };

    if (H > 0.5) {
        const double coef = H * (2.0 * H - 1.0);
        for (std::size_t p = p_begin; p < p_end; ++p) {
            const double x0 = nodes[p], h1 = nodes[p + 1] - nodes[p];
            for (std::size_t q = p; q < cells; ++q) {
                const double y0 = nodes[q], h2 = nodes[q + 1] - nodes[q];
                const auto j = pair(x0, h1, y0, h2);
                for (std::size_t a = 0; a < 2; ++a)
                    for (std::size_t b = 0; b < 2; ++b) {
                        const double c = coef * j[2 * a + b];
                        add(p + a, q + b, c);
                        if (q != p) add(q + b, p + a, c);
                    }
            }
        }
        return;
    }

    // H < 1/2: difference form of the covariance applied to zero-extended hats.
    // Per cell, the outside-the-cell part of the difference term and the
    // complement term combine into H int phi_i phi_j ((x-u_p)^g + (u_{p+1}-x)^g), g = 2H-1;
    // the x^g and (T-x)^g pieces cancel exactly.
    const double g = 2.0 * H - 1.0;
    const double same = 0.5 * H * (1.0 - 2.0 * H) * 2.0 / ((beta + 3.0) * (beta + 4.0));
    const double off = -H * (1.0 - 2.0 * H);
    const double local_diag = 2.0 / ((g + 1.0) * (g + 2.0) * (g + 3.0)) + 1.0 / (g + 3.0);
    const double local_off = 2.0 / ((g + 2.0) * (g + 3.0));
    for (std::size_t p = p_begin; p < p_end; ++p) {
        const double x0 = nodes[p], h1 = nodes[p + 1] - nodes[p];
        // same cell: phi_i(x) - phi_i(y) = s_i (x - y) with s = -1/h, +1/h
        const double sc = same * std::pow(h1, beta + 2.0);
        const double loc = H * std::pow(h1, g + 1.0);
        add(p, p, sc + loc * local_diag);
        add(p + 1, p + 1, sc + loc * local_diag);
        add(p, p + 1, -sc + loc * local_off);
        add(p + 1, p, -sc + loc * local_off);
        for (std::size_t q = p + 1; q < cells; ++q) {
            const double y0 = nodes[q], h2 = nodes[q + 1] - nodes[q];
            const auto j = pair(x0, h1, y0, h2);
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) {
                    const double c = off * j[2 * a + b];
                    add(p + a, q + b, c);
                    add(q + b, p + a, c);
                }
        }
    }
}

// Fixed block split (independent of the worker count) with row ranges of
// similar pair counts; partial results are summed in block order.
std::vector<double> apply_hat_covariance(double hurst, std::span<const double> nodes, std::span<const double> E,
                                         std::size_t m, unsigned threads) {
    const std::size_t rows = nodes.size();
    const std::size_t cells = rows - 1;
    if (phi_regime(hurst) == PhiRegime::classical) {
        std::vector<double> Y(rows * m, 0.0);
        for (std::size_t p = 0; p < cells; ++p) {
            const double h = nodes[p + 1] - nodes[p];
            for (std::size_t k = 0; k < m; ++k) {
                const double e0 = E[p * m + k], e1 = E[(p + 1) * m + k];
                Y[p * m + k] += h / 3.0 * e0 + h / 6.0 * e1;
                Y[(p + 1) * m + k] += h / 6.0 * e0 + h / 3.0 * e1;
            }
        }
        return Y;
    }

    constexpr std::size_t kBlocks = 16;
    std::vector<std::size_t> bounds{0};
    const double total = 0.5 * static_cast<double>(cells) * static_cast<double>(cells + 1);
    double acc = 0.0;
    for (std::size_t p = 0; p < cells && bounds.size() < kBlocks; ++p) {
        acc += static_cast<double>(cells - p);
        if (acc >= total * static_cast<double>(bounds.size()) / kBlocks) bounds.push_back(p + 1);
    }
    if (bounds.back() != cells) bounds.push_back(cells);

    const std::size_t blocks = bounds.size() - 1;
    std::vector<std::vector<double>> partial(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
        partial[b].assign(rows * m, 0.0);
        apply_block(hurst, nodes, E, m, bounds[b], bounds[b + 1], partial[b]);
    });
    std::vector<double> Y(rows * m, 0.0);
    for (const auto& part : partial)
        for (std::size_t i = 0; i < Y.size(); ++i) Y[i] += part[i];
    return Y;
}

// Phi on one mesh level. `cache` holds kernel values of the previous (half as
// fine) level so that shared nodes are not re-evaluated.
std::vector<double> phi_level(double hurst, double T, double grading, const std::vector<Kernel>& kernels,
                              std::size_t cells, std::vector<double>& cache, unsigned threads) {
    const std::size_t m = kernels.size();
    const auto nodes = graded_mesh(T, cells, grading);
    std::vector<double> phi(m * m, 0.0);

    if (phi_regime(hurst) == PhiRegime::classical) {
        // Ito isometry: integrate the exact kernels, no interpolation needed.
        const Rule01& r = rule8();
        std::vector<double> e(m);
        for (std::size_t p = 0; p < cells; ++p) {
            const double h = nodes[p + 1] - nodes[p];
            for (std::size_t g = 0; g < r.x.size(); ++g) {
                const double u = nodes[p] + h * r.x[g];
                for (std::size_t k = 0; k < m; ++k) e[k] = kernels[k](u);
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t l = k; l < m; ++l) phi[k * m + l] += h * r.w[g] * e[k] * e[l];
            }
        }
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < k; ++l) phi[k * m + l] = phi[l * m + k];
        return phi;
    }

    std::vector<double> E((cells + 1) * m);
    const bool reuse = cache.size() == (cells / 2 + 1) * m && cells % 2 == 0;
    parallel_for(cells + 1, threads, [&](std::size_t i) {
        for (std::size_t k = 0; k < m; ++k)
            E[i * m + k] = (reuse && i % 2 == 0) ? cache[(i / 2) * m + k] : kernels[k](nodes[i]);
    });
    const auto Y = apply_hat_covariance(hurst, nodes, E, m, threads);
    for (std::size_t i = 0; i <= cells; ++i)
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < m; ++l) phi[k * m + l] += E[i * m + k] * Y[i * m + l];
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < k; ++l) {
            const double v = 0.5 * (phi[k * m + l] + phi[l * m + k]);
            phi[k * m + l] = v;
            phi[l * m + k] = v;
        }
    cache = std::move(E);
    return phi;
}

void check_modes(const ModelParams& p, std::span<const std::size_t> modes) {
    if (modes.empty()) throw InputError("phi: no modes requested");
    for (std::size_t k : modes)
        if (k < 1 || k > p.N) throw InputError("phi: mode " + std::to_string(k) + " outside 1.." + std::to_string(p.N));
}

void check_model(const ModelParams& p) {
    p.validate();
    if (p.hurst < 0.5 && p.alpha + p.hurst <= 0.5)
        throw DomainError("phi: H < 1/2 needs alpha + H > 1/2 for the difference term to be integrable (alpha + H = " +
                          std::to_string(p.alpha + p.hurst) + ")");
}

Kernel mode_kernel(const ModelParams& p, std::size_t k) {
    const double lam = p.lambda_s(k);
    const double alpha = p.alpha;
    return [alpha, lam](double u) { return ml_kernel(alpha, lam, u); };
}

// e_k(u) - 1 ~ u^alpha near u = 0
double grading_for(const ModelParams& p) { return std::clamp(2.0 / p.alpha, 1.0, 8.0); }

}  // namespace

std::string_view to_string(PhiRegime r) {
    switch (r) {
        case PhiRegime::sub: return "sub";
        case PhiRegime::classical: return "classical";
        case PhiRegime::super: return "super";
    }
    return "unknown";
}

PhiRegime phi_regime(double hurst) {
    if (hurst < 0.5) return PhiRegime::sub;
    if (hurst > 0.5) return PhiRegime::super;
    return PhiRegime::classical;
}

std::vector<double> graded_mesh(double T, std::size_t cells, double grading) {
    if (cells < 1) throw InputError("graded_mesh: need at least one cell");
    if (!(grading >= 1.0)) throw InputError("graded_mesh: grading exponent must be >= 1");
    std::vector<double> u(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
        u[i] = T * std::pow(static_cast<double>(i) / static_cast<double>(cells), grading);
    u[cells] = T;
    return u;
}

std::vector<double> hat_covariance(double hurst, std::span<const double> nodes) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("hat_covariance: Hurst index must lie in (0, 1)");
    if (nodes.size() < 2) throw InputError("hat_covariance: need at least two nodes");
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i + 1] > nodes[i])) throw InputError("hat_covariance: nodes must increase strictly");
    const std::size_t rows = nodes.size();
    std::vector<double> identity(rows * rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) identity[i * rows + i] = 1.0;
    return apply_hat_covariance(hurst, nodes, identity, rows, 1);
}

PhiMatrix phi_for_kernels(double hurst, double T, double grading, const std::vector<Kernel>& kernels,
                          const PhiOptions& opts) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("phi: Hurst index must lie in (0, 1)");
    if (!(T > 0.0)) throw InputError("phi: T must be positive");
    if (kernels.empty()) throw InputError("phi: no kernels");
    if (opts.min_cells < 1 || opts.max_cells < opts.min_cells) throw InputError("phi: bad cell limits");

    const std::size_t m = kernels.size();
    PhiMatrix out;
    out.N = m;
    out.regime = phi_regime(hurst);

    auto max_change = [m](const std::vector<double>& a, const std::vector<double>& b) {
        double change = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < m; ++l) {
                const double scale = std::sqrt(std::abs(a[k * m + k] * a[l * m + l]));
                if (scale > 0.0) change = std::max(change, std::abs(a[k * m + l] - b[k * m + l]) / scale);
            }
        return change;
    };

    // P1 levels converge at second order in the mesh size, so each halving is
    // followed by a Richardson step and successive extrapolants are compared.
    // The Gauss rule used at H = 1/2 converges far faster and is left alone.
    const bool classical = out.regime == PhiRegime::classical;
    std::vector<double> cache;
    std::size_t cells = opts.min_cells;
    auto level = phi_level(hurst, T, grading, kernels, cells, cache, opts.threads);
    std::vector<double> extrapolated;
    out.values = level;
    out.cells = cells;
    out.rel_change = std::numeric_limits<double>::infinity();
    while (cells * 2 <= opts.max_cells) {
        cells *= 2;
        auto finer = phi_level(hurst, T, grading, kernels, cells, cache, opts.threads);
        std::vector<double> next = finer;
        if (!classical)
            for (std::size_t i = 0; i < next.size(); ++i) next[i] = finer[i] + (finer[i] - level[i]) / 3.0;
        out.rel_change = max_change(next, extrapolated.empty() ? level : extrapolated);
        out.values = next;
        out.cells = cells;
        level = std::move(finer);
        const bool have_two = classical || !extrapolated.empty();
        extrapolated = std::move(next);
        if (have_two && out.rel_change <= opts.rel_tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

PhiMatrix phi_matrix(const ModelParams& p, const PhiOptions& opts) {
    check_model(p);
    std::vector<Kernel> kernels;
    for (std::size_t k = 1; k <= p.N; ++k) kernels.push_back(mode_kernel(p, k));
    return phi_for_kernels(p.hurst, p.T, grading_for(p), kernels, opts);
}

double phi(const ModelParams& p, std::size_t k, std::size_t l, const PhiOptions& opts) {
    check_model(p);
    const std::size_t modes[] = {k, l};
    check_modes(p, modes);
    const std::vector<Kernel> kernels{mode_kernel(p, k), mode_kernel(p, l)};
    return phi_for_kernels(p.hurst, p.T, grading_for(p), kernels, opts).values[1];
}

double phi_scheme(const ModelParams& p, std::size_t k, std::size_t l) {
    p.validate();
    const std::size_t modes[] = {k, l};
    check_modes(p, modes);
    const double lam[] = {p.lambda_s(k), p.lambda_s(l)};
    // unit increment in step 1; row n is the response n - 1 steps later
    std::vector<double> rhs(2 * p.L, 0.0);
    rhs[0] = rhs[1] = 1.0 / p.tau();
    const auto G = march(lam, gl_weights(1.0 - p.alpha, p.tau(), p.L), p.tau(), rhs);
    std::vector<double> gamma(p.L);
    for (std::size_t j = 0; j < p.L; ++j) gamma[j] = fgn_autocov(p.hurst, p.tau(), j);
    // v^L = sum_n G_{L-n+1} dW_n
    double sum = 0.0;
    for (std::size_t n = 1; n <= p.L; ++n) {
        const double gk = G.row(p.L - n + 1)[0];
        for (std::size_t m = 1; m <= p.L; ++m) sum += gk * G.row(p.L - m + 1)[1] * gamma[n > m ? n - m : m - n];
    }
    return sum;
}

PhiMcMatrix phi_mc_modes(const ModelParams& p, std::span<const std::size_t> modes, std::size_t M,
                         const std::function<FbmPath(std::size_t)>& draw, unsigned threads) {
    p.validate();
    check_modes(p, modes);
    if (M < 2) throw InputError("phi_mc: need at least 2 paths, got " + std::to_string(M));
    const std::size_t m = modes.size();
    std::vector<double> v(M * m);
    parallel_for(M, threads, [&](std::size_t i) {
        const auto t = solve_v2_terminal(p, modes, draw(i));
        std::copy(t.begin(), t.end(), v.begin() + static_cast<std::ptrdiff_t>(i * m));
    });

    PhiMcMatrix out;
    out.modes.assign(modes.begin(), modes.end());
    out.M = M;
    out.estimate.assign(m * m, 0.0);
    out.std_error.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            double sum = 0.0;
            for (std::size_t i = 0; i < M; ++i) sum += v[i * m + a] * v[i * m + b];
            const double mean = sum / static_cast<double>(M);
            double ss = 0.0;
            for (std::size_t i = 0; i < M; ++i) {
                const double d = v[i * m + a] * v[i * m + b] - mean;
                ss += d * d;
            }
            const double se = std::sqrt(ss / static_cast<double>(M - 1) / static_cast<double>(M));
            out.estimate[a * m + b] = out.estimate[b * m + a] = mean;
            out.std_error[a * m + b] = out.std_error[b * m + a] = se;
        }
    return out;
}

PhiMcMatrix phi_mc_modes(const ModelParams& p, std::span<const std::size_t> modes, std::size_t M, std::uint64_t seed,
                         FbmMethod method, unsigned threads) {
    p.validate();
    const FbmGenerator gen(p.hurst, p.T, p.L, method);
    return phi_mc_modes(p, modes, M, [&](std::size_t i) { return gen.sample(seed, i); }, threads);
}

McEstimate phi_mc(const ModelParams& p, std::size_t k, std::size_t l, std::size_t M, std::uint64_t seed,
                  FbmMethod method, unsigned threads) {
    const std::size_t modes[] = {k, l};
    return phi_mc_modes(p, modes, M, seed, method, threads).at(0, 1);
}

}  // namespace sfde
