#include "gpden/potentials.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace gpden {

PotentialSpec PotentialSpec::harmonic(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw Error(ErrorKind::InvalidArgument, "harmonic potential requires omega > 0");
    }
    return PotentialSpec(HarmonicPotential{omega});
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFinite, "tabulated potential has non-finite entries");
        }
    }
    return PotentialSpec(TabulatedPotential{std::move(values)});
}

std::string PotentialSpec::id() const {
    struct Visitor {
        std::string operator()(const ZeroPotential&) const { return "zero"; }
        std::string operator()(const HarmonicPotential& h) const {
            std::ostringstream s;
            s.precision(17);
            s << "harmonic(" << h.omega << ")";
            return s.str();
        }
        std::string operator()(const TabulatedPotential& t) const {
            return "tabulated(" + std::to_string(t.values.size()) + ")";
        }
    };
    return std::visit(Visitor{}, kind_);
}

std::vector<double> evaluate_potential(const PotentialSpec& spec, const SpatialGrid& grid) {
    const auto x = grid.points();
    std::vector<double> u(grid.n(), 0.0);
    if (const auto* h = std::get_if<HarmonicPotential>(&spec.kind())) {
        const double w2 = h->omega * h->omega;
        for (std::size_t j = 0; j < u.size(); ++j) u[j] = 0.5 * w2 * x[j] * x[j];
    } else if (const auto* t = std::get_if<TabulatedPotential>(&spec.kind())) {
        if (t->values.size() != grid.n()) {
            throw Error(ErrorKind::GridMismatch,
                        "tabulated potential has " + std::to_string(t->values.size()) +
                            " values for a grid of " + std::to_string(grid.n()));
        }
        u = t->values;
    }
    return u;
}

GridAdequacy assess_grid(const WaveField& f) {
    const std::size_t n = f.size();
    double peak = 0.0;
    for (const auto& z : f.values()) peak = std::max(peak, std::abs(z));
    const double boundary = std::max(std::abs(f[0]), std::abs(f[n - 1]));

    std::vector<cplx> spec(n);
    fft_forward(f.values(), spec);
    const auto k = f.grid().wavenumbers();
    const double k_cut = 0.9 * std::numbers::pi / f.grid().dx();
    double total = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = std::norm(spec[j]);
        total += p;
        if (std::abs(k[j]) >= k_cut) tail += p;
    }
    return {peak > 0.0 ? boundary / peak : 0.0, total > 0.0 ? tail / total : 0.0};
}

StationaryState hermite_eigenstate(int n, const SpatialGrid& grid) {
    if (n < 0) {
        throw Error(ErrorKind::InvalidArgument, "oscillator level must be >= 0");
    }
    const auto x = grid.points();
    const std::size_t m = grid.n();
    std::vector<double> prev(m, 0.0), cur(m);
    const double c0 = std::pow(std::numbers::pi, -0.25);
    for (std::size_t j = 0; j < m; ++j) cur[j] = c0 * std::exp(-0.5 * x[j] * x[j]);
    for (int level = 0; level < n; ++level) {
        const double a = std::sqrt(2.0 / (level + 1.0));
        const double b = std::sqrt(level / (level + 1.0));
        for (std::size_t j = 0; j < m; ++j) {
            const double next = a * x[j] * cur[j] - b * prev[j];
            prev[j] = cur[j];
            cur[j] = next;
        }
    }
    std::vector<cplx> v(cur.begin(), cur.end());
    WaveField field(grid, std::move(v));
    const auto adequacy = assess_grid(field);
    if (adequacy.boundary_amplitude >= 1e-12) {
        std::clog << "warning: oscillator level " << n << " has relative boundary amplitude "
                  << adequacy.boundary_amplitude << " on [" << grid.x_min() << ", "
                  << grid.x_max() << ")\n";
    }
    return {std::move(field), n + 0.5, StateKind::LinearEigenstate, n};
}

WaveField gaussian_packet(double x0, double p0, double width, const SpatialGrid& grid) {
    return free_gaussian_exact(x0, p0, width, 0.0, grid);
}

WaveField free_gaussian_exact(double x0, double p0, double width, double t,
                              const SpatialGrid& grid) {
    if (!(width > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "gaussian width must be > 0");
    }
    const double w2 = width * width;
    const cplx spread(w2, t);  // w^2 + i t
    const cplx prefactor = std::pow(std::numbers::pi * w2, -0.25) / std::sqrt(spread / w2);
    const auto x = grid.points();
    std::vector<cplx> v(grid.n());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double centred = x[j] - x0 - p0 * t;
        const cplx arg = -centred * centred / (2.0 * spread) +
                         cplx(0.0, p0 * (x[j] - x0) - 0.5 * p0 * p0 * t);
        v[j] = prefactor * std::exp(arg);
    }
    return WaveField(grid, std::move(v), t);
}

namespace {
void check_soliton_args(double amplitude, double g) {
    if (!(g < 0.0)) {
        throw Error(ErrorKind::InvalidArgument,
                    "bright soliton requires attractive nonlinearity g < 0");
    }
    if (!(amplitude > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "soliton amplitude must be > 0");
    }
}
} // namespace

StationaryState bright_soliton(double amplitude, double x0, double v, double g,
                               const SpatialGrid& grid) {
    check_soliton_args(amplitude, g);
    const double k = amplitude * std::sqrt(-g);
    const double mu = -0.5 * k * k;
    return {bright_soliton_exact(amplitude, x0, v, g, 0.0, grid), mu, StateKind::GpeSoliton, 0};
}

WaveField bright_soliton_exact(double amplitude, double x0, double v, double g, double t,
                               const SpatialGrid& grid) {
    check_soliton_args(amplitude, g);
    const double k = amplitude * std::sqrt(-g);
    const double mu = -0.5 * k * k;
    const double omega = 0.5 * v * v + mu;
    const auto x = grid.points();
    std::vector<cplx> out(grid.n());
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double envelope = amplitude / std::cosh(k * (x[j] - x0 - v * t));
        out[j] = std::polar(envelope, v * x[j] - omega * t);
    }
    return WaveField(grid, std::move(out), t);
}

} // namespace gpden
