#include "sfde/fbm.hpp"

#include "sfde/error.hpp"
#include "sfde/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <span>

namespace sfde {

namespace {

void check_hurst(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("fbm: Hurst index must lie in (0, 1), got " + std::to_string(hurst));
}

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

ComplexBuffer make_buffer(std::size_t n) {
    auto* raw = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (raw == nullptr) throw std::bad_alloc();
    return ComplexBuffer(raw);
}

std::vector<double> cumulative(std::span<const double> increments) {
    std::vector<double> values(increments.size() + 1, 0.0);
    for (std::size_t n = 0; n < increments.size(); ++n) values[n + 1] = values[n] + increments[n];
    return values;
}

}  // namespace

struct FbmGenerator::Circulant {
    std::size_t size = 0;       // 2L
    std::vector<double> scale;  // sqrt(eigenvalue / size)
    fftw_plan plan = nullptr;

    ~Circulant() {
        if (plan != nullptr) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

struct FbmGenerator::Cholesky {
    Eigen::MatrixXd lower;
};

std::string_view to_string(FbmMethod method) {
    return method == FbmMethod::cholesky ? "cholesky" : "circulant";
}

FbmMethod parse_fbm_method(std::string_view name) {
    if (name == "cholesky") return FbmMethod::cholesky;
    if (name == "circulant") return FbmMethod::circulant;
    throw InputError("unknown fbm method '" + std::string(name) + "' (expected cholesky or circulant)");
}

double fbm_cov(double hurst, double t, double s) {
    check_hurst(hurst);
    if (t < 0.0 || s < 0.0) throw DomainError("fbm_cov: times must be nonnegative");
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double fgn_autocov(double hurst, double tau, std::size_t lag) {
    check_hurst(hurst);
    if (!(tau > 0.0)) throw DomainError("fgn_autocov: step must be positive");
    const double h2 = 2.0 * hurst;
    const double j = static_cast<double>(lag);
    const double below = lag == 0 ? 1.0 : std::pow(j - 1.0, h2);
    return 0.5 * std::pow(tau, h2) * (std::pow(j + 1.0, h2) - 2.0 * std::pow(j, h2) + below);
}

FbmGenerator::FbmGenerator(double hurst, double horizon, std::size_t steps, FbmMethod method)
    : hurst_(hurst), tau_(0.0), steps_(steps), requested_(method), method_(method) {
    check_hurst(hurst);
    if (!(horizon > 0.0)) throw InputError("fbm: horizon T must be positive");
    if (steps < 1) throw InputError("fbm: need at least one step");
    tau_ = horizon / static_cast<double>(steps);

    std::vector<double> gamma(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) gamma[j] = fgn_autocov(hurst, tau_, j);

    if (method == FbmMethod::circulant) {
        auto c = std::make_unique<Circulant>();
        c->size = 2 * steps;
        const std::size_t m = c->size;
        auto in = make_buffer(m);
        auto out = make_buffer(m);
        {
            std::lock_guard lock(planner_mutex());
            c->plan = fftw_plan_dft_1d(static_cast<int>(m), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        }
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t lag = j <= steps ? j : m - j;
            in[j][0] = gamma[lag];
            in[j][1] = 0.0;
        }
        fftw_execute_dft(c->plan, in.get(), out.get());
        double max_eig = 0.0;
        double min_eig = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            max_eig = std::max(max_eig, out[j][0]);
            min_eig = std::min(min_eig, out[j][0]);
        }
        if (min_eig < -1e-12 * max_eig) {
            warnings_.push_back("circulant embedding has eigenvalue " + std::to_string(min_eig) +
                                "; falling back to cholesky");
            method_ = FbmMethod::cholesky;
        } else {
            c->scale.resize(m);
            for (std::size_t j = 0; j < m; ++j)
                c->scale[j] = std::sqrt(std::max(out[j][0], 0.0) / static_cast<double>(m));
            circulant_ = std::move(c);
        }
    }

    if (method_ == FbmMethod::cholesky) {
        Eigen::MatrixXd cov(steps, steps);
        for (std::size_t i = 0; i < steps; ++i)
            for (std::size_t j = 0; j < steps; ++j) cov(i, j) = gamma[i > j ? i - j : j - i];
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) throw DomainError("fbm: increment covariance is not positive definite");
        cholesky_ = std::make_unique<Cholesky>();
        cholesky_->lower = llt.matrixL();
    }
}

FbmGenerator::~FbmGenerator() = default;
FbmGenerator::FbmGenerator(FbmGenerator&&) noexcept = default;
FbmGenerator& FbmGenerator::operator=(FbmGenerator&&) noexcept = default;

FbmPath FbmGenerator::sample(std::uint64_t seed, std::uint64_t index) const {
    NormalStream normals(derive_stream_seed(seed, index));
    std::vector<double> increments(steps_);

    if (method_ == FbmMethod::circulant) {
        const std::size_t m = circulant_->size;
        auto in = make_buffer(m);
        auto out = make_buffer(m);
        for (std::size_t j = 0; j < m; ++j) {
            in[j][0] = circulant_->scale[j] * normals.next();
            in[j][1] = circulant_->scale[j] * normals.next();
        }
        fftw_execute_dft(circulant_->plan, in.get(), out.get());
        for (std::size_t n = 0; n < steps_; ++n) increments[n] = out[n][0];
    } else {
        Eigen::VectorXd z(static_cast<Eigen::Index>(steps_));
        for (std::size_t n = 0; n < steps_; ++n) z[static_cast<Eigen::Index>(n)] = normals.next();
        const Eigen::VectorXd x = cholesky_->lower.triangularView<Eigen::Lower>() * z;
        for (std::size_t n = 0; n < steps_; ++n) increments[n] = x[static_cast<Eigen::Index>(n)];
    }

    return FbmPath{hurst_, tau_, cumulative(increments)};
}

FbmPath sample_path(double hurst, double horizon, std::size_t steps, std::uint64_t seed, FbmMethod method) {
    return FbmGenerator(hurst, horizon, steps, method).sample(seed, 0);
}

}  // namespace sfde
