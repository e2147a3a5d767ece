#include "gpden/propagator.hpp"

#include <cmath>
#include <sstream>

namespace gpden {

void EvolveParams::validate() const {
    if (!std::isfinite(g)) throw Error(ErrorKind::InvalidArgument, "g must be finite");
    if (store_stride < 1) throw Error(ErrorKind::InvalidArgument, "store_stride must be >= 1");
    if ((time_grid.steps() - 1) % store_stride != 0) {
        std::ostringstream msg;
        msg << "store_stride " << store_stride << " does not divide the " << time_grid.steps() - 1
            << " solver steps";
        throw Error(ErrorKind::InvalidArgument, msg.str());
    }
}

TimeGrid EvolveParams::stored_time_grid() const {
    return TimeGrid::make(time_grid.t0(), time_grid.dt() * static_cast<double>(store_stride),
                          (time_grid.steps() - 1) / store_stride + 1);
}

void GroundStateParams::validate() const {
    if (!(target_norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "target_norm must be > 0");
    if (!(dtau > 0.0)) throw Error(ErrorKind::InvalidArgument, "dtau must be > 0");
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be > 0");
    if (!(initial_width > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "initial_width must be > 0");
    }
    if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
}

SplitStepper::SplitStepper(const SpatialGrid& grid, const PotentialSpec& potential, double g,
                           double dt)
    : grid_(grid), potential_(evaluate_potential(potential, grid)), g_(g), dt_(dt) {
    const auto k = grid.wavenumbers();
    const double inv_n = 1.0 / static_cast<double>(grid.n());
    kinetic_phase_.resize(grid.n());
    // 1/n normalization of the inverse transform folded into the multiplier.
    for (std::size_t j = 0; j < k.size(); ++j) {
        kinetic_phase_[j] = std::polar(inv_n, -0.5 * k[j] * k[j] * dt);
    }
}

void SplitStepper::half_potential(std::vector<cplx>& psi) const {
    const double h = 0.5 * dt_;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double phase = (potential_[j] + g_ * std::norm(psi[j])) * h;
        psi[j] *= std::polar(1.0, -phase);
    }
}

void SplitStepper::step(std::vector<cplx>& psi) const {
    half_potential(psi);
    std::vector<cplx> spec(psi.size());
    fft_forward(psi, spec);
    for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= kinetic_phase_[j];
    fft_inverse(spec, psi);
    half_potential(psi);
}

namespace {

bool all_finite(const std::vector<cplx>& v) {
    for (const auto& z : v) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

double discrete_norm(const std::vector<cplx>& v, double dx) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s * dx;
}

// Fraction of the particle number in the outer 10% of the domain on each side.
double edge_fraction(const std::vector<cplx>& v) {
    const std::size_t n = v.size();
    const std::size_t band = std::max<std::size_t>(1, n / 10);
    double edge = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = std::norm(v[j]);
        total += p;
        if (j < band || j >= n - band) edge += p;
    }
    return total > 0.0 ? edge / total : 0.0;
}

// Imaginary-time counterpart of SplitStepper: every phase becomes a real decay.
class DiffusionStepper {
public:
    DiffusionStepper(const SpatialGrid& grid, const PotentialSpec& potential, double g, double dtau)
        : potential_(evaluate_potential(potential, grid)), g_(g), dtau_(dtau) {
        const auto k = grid.wavenumbers();
        const double inv_n = 1.0 / static_cast<double>(grid.n());
        kinetic_.resize(grid.n());
        for (std::size_t j = 0; j < k.size(); ++j) {
            kinetic_[j] = inv_n * std::exp(-0.5 * k[j] * k[j] * dtau);
        }
    }

    void step(std::vector<cplx>& psi) const {
        half(psi);
        std::vector<cplx> spec(psi.size());
        fft_forward(psi, spec);
        for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= kinetic_[j];
        fft_inverse(spec, psi);
        half(psi);
    }

    // Energy offset subtracted in the potential sub-steps. Tracking mu keeps
    // the unnormalised norm nearly fixed, so the nonlinear term sees the
    // constrained density and the fixed point has no O(dtau) bias.
    void set_shift(double mu) { shift_ = mu; }
    double shift() const { return shift_; }

private:
    // Exact pointwise flow of d|psi|^2/dtau = -2 (c + g |psi|^2) |psi|^2 with
    // c = U - shift over half a step. A plain exponential of the density would
    // leave an O(dtau) bias in the fixed point when g != 0.
    void half(std::vector<cplx>& psi) const {
        const double tau = 0.5 * dtau_;
        for (std::size_t j = 0; j < psi.size(); ++j) {
            const double c = potential_[j] - shift_;
            const double growth = std::abs(c) * tau > 1e-12 ? -std::expm1(-2.0 * c * tau) / c : 2.0 * tau;
            const double ratio = std::exp(-2.0 * c * tau) / (1.0 + g_ * std::norm(psi[j]) * growth);
            psi[j] *= std::sqrt(ratio);
        }
    }

    std::vector<double> potential_;
    std::vector<double> kinetic_;
    double g_;
    double dtau_;
    double shift_ = 0.0;
};

} // namespace

WaveField strang_step(const WaveField& f, const EvolveParams& params, double dt) {
    SplitStepper stepper(f.grid(), params.potential, params.g, dt);
    std::vector<cplx> psi(f.values().begin(), f.values().end());
    stepper.step(psi);
    if (!all_finite(psi)) {
        throw Error(ErrorKind::NonFinite, "split step produced non-finite values at step 1");
    }
    return WaveField(f.grid(), std::move(psi), f.time_tag() + dt);
}

Trajectory evolve(const WaveField& initial, const EvolveParams& params) {
    params.validate();
    const SpatialGrid& grid = initial.grid();
    const TimeGrid stored = params.stored_time_grid();
    SplitStepper stepper(grid, params.potential, params.g, params.time_grid.dt());

    Trajectory traj{grid, stored, {}, params.g, params.potential.id()};
    traj.snapshots.reserve(stored.steps());
    traj.snapshots.push_back(initial.with_time(stored.time(0)));

    std::vector<cplx> psi(initial.values().begin(), initial.values().end());
    std::size_t step_index = 0;
    for (std::size_t s = 1; s < stored.steps(); ++s) {
        for (std::size_t r = 0; r < params.store_stride; ++r) {
            stepper.step(psi);
            ++step_index;
        }
        if (!all_finite(psi)) {
            throw Error(ErrorKind::NonFinite,
                        "evolution blew up by solver step " + std::to_string(step_index));
        }
        traj.snapshots.emplace_back(grid, psi, stored.time(s));
    }
    return traj;
}

double norm(const WaveField& f) {
    double s = 0.0;
    for (const auto& z : f.values()) s += std::norm(z);
    return s * f.grid().dx();
}

namespace {
// (1/2) int |psi'|^2 via Parseval on the discrete spectrum.
double kinetic_energy(const WaveField& f) {
    const std::size_t n = f.size();
    std::vector<cplx> spec(n);
    fft_forward(f.values(), spec);
    const auto k = f.grid().wavenumbers();
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += k[j] * k[j] * std::norm(spec[j]);
    return 0.5 * s * f.grid().dx() / static_cast<double>(n);
}

struct PotentialTerms {
    double external = 0.0;  // int U |psi|^2
    double quartic = 0.0;   // int |psi|^4
};

PotentialTerms potential_terms(const WaveField& f, const PotentialSpec& potential) {
    const auto u = evaluate_potential(potential, f.grid());
    PotentialTerms t;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double rho = std::norm(f[j]);
        t.external += u[j] * rho;
        t.quartic += rho * rho;
    }
    t.external *= f.grid().dx();
    t.quartic *= f.grid().dx();
    return t;
}
} // namespace

double energy(const WaveField& f, const PotentialSpec& potential, double g) {
    const auto t = potential_terms(f, potential);
    return kinetic_energy(f) + t.external + 0.5 * g * t.quartic;
}

double chemical_potential(const WaveField& f, const PotentialSpec& potential, double g) {
    const auto t = potential_terms(f, potential);
    return (kinetic_energy(f) + t.external + g * t.quartic) / norm(f);
}

WaveField apply_hamiltonian(const WaveField& f, const PotentialSpec& potential, double g) {
    std::vector<cplx> d2(f.values().begin(), f.values().end());
    second_derivative_inplace(f.grid(), d2);
    const auto u = evaluate_potential(potential, f.grid());
    for (std::size_t j = 0; j < f.size(); ++j) {
        d2[j] = -0.5 * d2[j] + (u[j] + g * std::norm(f[j])) * f[j];
    }
    return WaveField(f.grid(), std::move(d2), f.time_tag());
}

GroundStateResult imaginary_time_ground_state(const GroundStateParams& p,
                                              const SpatialGrid& grid) {
    p.validate();
    if (p.potential.is_zero() && p.g >= 0.0) {
        throw Error(ErrorKind::NonConfining,
                    "no bound state: zero potential without attractive nonlinearity");
    }

    const double centre = 0.5 * (grid.x_min() + grid.x_max());
    const WaveField guess = gaussian_packet(centre, 0.0, p.initial_width, grid);
    std::vector<cplx> psi(guess.values().begin(), guess.values().end());
    const double dx = grid.dx();
    auto renormalize = [&] {
        const double scale = std::sqrt(p.target_norm / discrete_norm(psi, dx));
        for (auto& z : psi) z *= scale;
    };
    renormalize();

    DiffusionStepper stepper(grid, p.potential, p.g, p.dtau);
    GroundStateResult result{{WaveField(grid, psi), 0.0, StateKind::GpeGround, 0}, 0, 0.0, {}};
    double e_prev = energy(WaveField(grid, psi), p.potential, p.g);

    for (std::size_t it = 1; it <= p.max_iter; ++it) {
        stepper.step(psi);
        if (!all_finite(psi)) {
            throw Error(ErrorKind::NonFinite,
                        "imaginary-time flow blew up at iteration " + std::to_string(it));
        }
        // norm ratio after one step is exp(-2 (mu - shift) dtau)
        stepper.set_shift(stepper.shift() -
                          0.5 * std::log(discrete_norm(psi, dx) / p.target_norm) / p.dtau);
        renormalize();
        WaveField field(grid, psi);
        const double e = energy(field, p.potential, p.g);
        result.energy_history.push_back(e);

        if (it % 64 == 0 && edge_fraction(psi) > 1e-6) {
            throw Error(ErrorKind::NonConfining,
                        "norm escaped to the domain boundary after " + std::to_string(it) +
                            " iterations; configuration has no bound state");
        }

        const double rate_residual = std::sqrt(std::abs(e - e_prev) / (2.0 * p.dtau));
        e_prev = e;
        if (rate_residual >= p.tol) continue;

        const double mu = chemical_potential(field, p.potential, p.g);
        const WaveField h = apply_hamiltonian(field, p.potential, p.g);
        double worst = 0.0;
        for (std::size_t j = 0; j < field.size(); ++j) {
            worst = std::max(worst, std::abs(h[j] - mu * field[j]));
        }
        if (worst < 10.0 * p.tol) {
            result.state = {std::move(field), mu, StateKind::GpeGround, 0};
            result.iterations = it;
            result.residual_max = worst;
            return result;
        }
    }
    std::ostringstream msg;
    msg << "imaginary-time flow did not converge within " << p.max_iter
        << " iterations (tol " << p.tol << ", dtau " << p.dtau << ")";
    throw Error(ErrorKind::NotConverged, msg.str());
}

} // namespace gpden
