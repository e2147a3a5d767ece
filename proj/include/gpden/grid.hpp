#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gpden/error.hpp"

namespace gpden {

using cplx = std::complex<double>;

/**
 * Uniform periodic grid on [x_min, x_max) with n points (n a power of two,
 * n >= 8). Wavenumbers use the unshifted FFT layout:
 *   k_j = 2*pi*j/L for j < n/2,  k_j = 2*pi*(j - n)/L for j >= n/2.
 *
 * Copies share the point and wavenumber tables.
 */
class SpatialGrid {
public:
    static SpatialGrid make(std::size_t n, double x_min, double x_max);

    std::size_t n() const { return data_->n; }
    double x_min() const { return data_->x_min; }
    double x_max() const { return data_->x_max; }
    double length() const { return data_->x_max - data_->x_min; }
    double dx() const { return data_->dx; }
    std::span<const double> points() const { return data_->points; }
    std::span<const double> wavenumbers() const { return data_->wavenumbers; }

    bool operator==(const SpatialGrid& other) const;

private:
    struct Data {
        std::size_t n;
        double x_min;
        double x_max;
        double dx;
        std::vector<double> points;
        std::vector<double> wavenumbers;
    };
    explicit SpatialGrid(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
    std::shared_ptr<const Data> data_;
};

// t_k = t0 + k*dt, k = 0 .. steps-1.
class TimeGrid {
public:
    static TimeGrid make(double t0, double dt, std::size_t steps);

    double t0() const { return t0_; }
    double dt() const { return dt_; }
    std::size_t steps() const { return steps_; }
    double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
    std::vector<double> times() const;

private:
    TimeGrid(double t0, double dt, std::size_t steps) : t0_(t0), dt_(dt), steps_(steps) {}
    double t0_;
    double dt_;
    std::size_t steps_;
};

class WaveField {
public:
    // Throws if the length does not match the grid or any entry is non-finite.
    WaveField(SpatialGrid grid, std::vector<cplx> values, double time_tag = 0.0);

    const SpatialGrid& grid() const { return grid_; }
    std::span<const cplx> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    const cplx& operator[](std::size_t i) const { return values_[i]; }
    double time_tag() const { return time_tag_; }

    WaveField with_time(double t) const;
    WaveField scaled(cplx factor) const;

private:
    SpatialGrid grid_;
    std::vector<cplx> values_;
    double time_tag_;
};

struct Trajectory {
    SpatialGrid grid;
    TimeGrid time_grid;  // stored sub-grid: snapshot k lives at time_grid.time(k)
    std::vector<WaveField> snapshots;
    double g = 0.0;
    std::string potential_id;

    // Checks snapshot count, grids, and time tags.
    void validate() const;
    std::size_t size() const { return snapshots.size(); }
};

// Unnormalized transforms of length grid.n(); forward uses exp(-i k x).
void fft_forward(std::span<const cplx> in, std::span<cplx> out);
void fft_inverse(std::span<const cplx> in, std::span<cplx> out);

// In-place spectral d^2/dx^2 of a contiguous periodic sample row.
void second_derivative_inplace(const SpatialGrid& grid, std::span<cplx> values);

WaveField spectral_second_derivative(const WaveField& f);

// dx * sum conj(f_j) h_j
cplx inner_product(const WaveField& f, const WaveField& h);

// Same quantity evaluated from the discrete spectra: (dx/n) * sum conj(F_k) H_k.
cplx inner_product_spectral(const WaveField& f, const WaveField& h);

std::vector<double> abs_squared(const WaveField& f);

double max_abs_difference(const WaveField& a, const WaveField& b);

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where);

} // namespace gpden
