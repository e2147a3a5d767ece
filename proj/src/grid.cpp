#include "gpden/grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace gpden {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::GridMismatch: return "grid_mismatch";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::NotConverged: return "not_converged";
    case ErrorKind::NonConfining: return "non_confining";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

SpatialGrid SpatialGrid::make(std::size_t n, double x_min, double x_max) {
    if (n < 8 || !std::has_single_bit(n)) {
        std::ostringstream msg;
        msg << "grid size must be a power of two >= 8, got " << n;
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
        std::ostringstream msg;
        msg << "degenerate interval [" << x_min << ", " << x_max << ")";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
    auto d = std::make_shared<Data>();
    d->n = n;
    d->x_min = x_min;
    d->x_max = x_max;
    d->dx = (x_max - x_min) / static_cast<double>(n);
    d->points.resize(n);
    d->wavenumbers.resize(n);
    const double dk = 2.0 * std::numbers::pi / (x_max - x_min);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t j = 0; j < n; ++j) {
        d->points[j] = x_min + static_cast<double>(j) * d->dx;
        auto m = static_cast<std::ptrdiff_t>(j);
        if (m >= half) m -= static_cast<std::ptrdiff_t>(n);
        d->wavenumbers[j] = dk * static_cast<double>(m);
    }
    return SpatialGrid(std::move(d));
}

bool SpatialGrid::operator==(const SpatialGrid& other) const {
    return data_ == other.data_ ||
           (n() == other.n() && x_min() == other.x_min() && x_max() == other.x_max());
}

TimeGrid TimeGrid::make(double t0, double dt, std::size_t steps) {
    if (!std::isfinite(t0) || !std::isfinite(dt) || !(dt > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "time step must be finite and > 0");
    }
    if (steps < 2) {
        throw Error(ErrorKind::InvalidArgument,
                    "time grid needs steps >= 2, got " + std::to_string(steps));
    }
    return TimeGrid(t0, dt, steps);
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(steps_);
    for (std::size_t k = 0; k < steps_; ++k) t[k] = time(k);
    return t;
}

WaveField::WaveField(SpatialGrid grid, std::vector<cplx> values, double time_tag)
    : grid_(std::move(grid)), values_(std::move(values)), time_tag_(time_tag) {
    if (values_.size() != grid_.n()) {
        throw Error(ErrorKind::InvalidArgument,
                    "field length " + std::to_string(values_.size()) +
                        " does not match grid size " + std::to_string(grid_.n()));
    }
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (!std::isfinite(values_[j].real()) || !std::isfinite(values_[j].imag())) {
            throw Error(ErrorKind::NonFinite,
                        "non-finite field value at index " + std::to_string(j));
        }
    }
}

WaveField WaveField::with_time(double t) const {
    WaveField copy = *this;
    copy.time_tag_ = t;
    return copy;
}

WaveField WaveField::scaled(cplx factor) const {
    std::vector<cplx> v(values_);
    for (auto& z : v) z *= factor;
    return WaveField(grid_, std::move(v), time_tag_);
}

void Trajectory::validate() const {
    if (snapshots.size() != time_grid.steps()) {
        throw Error(ErrorKind::InvalidArgument, "trajectory has " +
                                                    std::to_string(snapshots.size()) +
                                                    " snapshots but time grid has " +
                                                    std::to_string(time_grid.steps()));
    }
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        require_same_grid(grid, snapshots[k].grid(), "trajectory snapshot");
        const double expected = time_grid.time(k);
        const double tol = 1e-9 * std::max(1.0, std::abs(expected));
        if (std::abs(snapshots[k].time_tag() - expected) > tol) {
            throw Error(ErrorKind::InvalidArgument,
                        "snapshot " + std::to_string(k) + " time tag does not match time grid");
        }
    }
}

namespace {

struct PlanPair {
    fftw_plan forward;
    fftw_plan backward;
};

// The FFTW planner is not thread-safe; execution of an existing plan on new
// arrays is.
class PlanCache {
public:
    const PlanPair& get(std::size_t n) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> a(n), b(n);
        auto* pa = reinterpret_cast<fftw_complex*>(a.data());
        auto* pb = reinterpret_cast<fftw_complex*>(b.data());
        const auto flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        PlanPair p{fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD, flags),
                   fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD, flags)};
        return plans_.emplace(n, p).first->second;
    }

    ~PlanCache() {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.backward);
        }
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void execute(fftw_plan plan, std::span<const cplx> in, std::span<cplx> out) {
    if (in.size() != out.size()) {
        throw Error(ErrorKind::InvalidArgument, "fft input/output length mismatch");
    }
    // FFTW's new-array interface takes a non-const input; it does not write
    // to it for out-of-place plans.
    auto* pin = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    auto* pout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan, pin, pout);
}

} // namespace

void fft_forward(std::span<const cplx> in, std::span<cplx> out) {
    const auto& p = plan_cache().get(in.size());
    if (in.data() == out.data()) {
        std::vector<cplx> tmp(in.begin(), in.end());
        execute(p.forward, tmp, out);
    } else {
        execute(p.forward, in, out);
    }
}

void fft_inverse(std::span<const cplx> in, std::span<cplx> out) {
    const auto& p = plan_cache().get(in.size());
    if (in.data() == out.data()) {
        std::vector<cplx> tmp(in.begin(), in.end());
        execute(p.backward, tmp, out);
    } else {
        execute(p.backward, in, out);
    }
}

void second_derivative_inplace(const SpatialGrid& grid, std::span<cplx> values) {
    const std::size_t n = grid.n();
    if (values.size() != n) {
        throw Error(ErrorKind::GridMismatch, "second derivative: row length != grid size");
    }
    std::vector<cplx> spec(n);
    fft_forward(values, spec);
    const auto k = grid.wavenumbers();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) spec[j] *= -k[j] * k[j] * inv_n;
    fft_inverse(spec, values);
}

WaveField spectral_second_derivative(const WaveField& f) {
    std::vector<cplx> v(f.values().begin(), f.values().end());
    second_derivative_inplace(f.grid(), v);
    return WaveField(f.grid(), std::move(v), f.time_tag());
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where) {
    if (!(a == b)) {
        throw Error(ErrorKind::GridMismatch, std::string(where) + ": grid mismatch");
    }
}

cplx inner_product(const WaveField& f, const WaveField& h) {
    require_same_grid(f.grid(), h.grid(), "inner_product");
    cplx sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) sum += std::conj(f[j]) * h[j];
    return sum * f.grid().dx();
}

cplx inner_product_spectral(const WaveField& f, const WaveField& h) {
    require_same_grid(f.grid(), h.grid(), "inner_product_spectral");
    const std::size_t n = f.size();
    std::vector<cplx> fs(n), hs(n);
    fft_forward(f.values(), fs);
    fft_forward(h.values(), hs);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += std::conj(fs[j]) * hs[j];
    return sum * (f.grid().dx() / static_cast<double>(n));
}

std::vector<double> abs_squared(const WaveField& f) {
    std::vector<double> out(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = std::norm(f[j]);
    return out;
}

double max_abs_difference(const WaveField& a, const WaveField& b) {
    require_same_grid(a.grid(), b.grid(), "max_abs_difference");
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

} // namespace gpden
