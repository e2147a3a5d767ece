#pragma once

#include <cstddef>
#include <vector>

#include "gpden/grid.hpp"
#include "gpden/potentials.hpp"

namespace gpden {

/// Real-time evolution parameters. `time_grid` is the solver grid
/// (time_grid.steps() points, so steps-1 solver steps); every store_stride-th
/// state is kept, which requires (steps - 1) % store_stride == 0.
struct EvolveParams {
    double g = 0.0;
    PotentialSpec potential;
    TimeGrid time_grid = TimeGrid::make(0.0, 1e-3, 2);
    std::size_t store_stride = 1;

    void validate() const;
    TimeGrid stored_time_grid() const;
};

struct GroundStateParams {
    double g = 0.0;
    PotentialSpec potential;
    double target_norm = 1.0;
    double dtau = 1e-3;
    double tol = 1e-6;
    std::size_t max_iter = 200000;
    double initial_width = 2.0;  // width of the Gaussian starting guess

    void validate() const;
};

/// Symmetric split step for i dpsi/dt = (-1/2 d^2/dx^2 + U + g|psi|^2) psi,
/// precomputed for one grid, potential and step size:
///   half step  psi *= exp(-i (U + g|psi|^2) dt/2)
///   kinetic    psi_hat *= exp(-i k^2 dt/2)
///   half step  with |psi|^2 recomputed from the post-kinetic field.
/// Negative dt runs the scheme backwards.
class SplitStepper {
public:
    SplitStepper(const SpatialGrid& grid, const PotentialSpec& potential, double g, double dt);

    void step(std::vector<cplx>& psi) const;
    double dt() const { return dt_; }

private:
    void half_potential(std::vector<cplx>& psi) const;

    SpatialGrid grid_;
    std::vector<double> potential_;
    std::vector<cplx> kinetic_phase_;
    double g_;
    double dt_;
};

WaveField strang_step(const WaveField& f, const EvolveParams& params, double dt);

// Snapshot 0 is `initial` retagged to time_grid.t0().
Trajectory evolve(const WaveField& initial, const EvolveParams& params);

struct GroundStateResult {
    StationaryState state;
    std::size_t iterations = 0;
    double residual_max = 0.0;            // ||H phi - mu phi||_inf at exit
    std::vector<double> energy_history;   // energy after each renormalized step
};

/// Normalized gradient flow in imaginary time (dt -> -i dtau in the
/// split step), renormalizing to target_norm after every step. Energy E
/// decreases at rate dE/dtau = -2 ||(H - mu) phi||^2, so the flow stops once
/// sqrt(|E_k - E_{k-1}| / (2 dtau)) < tol and the measured stationary
/// residual is below 10 tol.
GroundStateResult imaginary_time_ground_state(const GroundStateParams& p,
                                              const SpatialGrid& grid);

// Particle number N = dx * sum |psi|^2.
double norm(const WaveField& f);

// Integral of (1/2)|psi'|^2 + U|psi|^2 + (g/2)|psi|^4.
double energy(const WaveField& f, const PotentialSpec& potential, double g);

// <psi, (-1/2 d^2 + U + g|psi|^2) psi> / <psi, psi>.
double chemical_potential(const WaveField& f, const PotentialSpec& potential, double g);

// (-1/2 d^2 + U + g|psi|^2) psi
WaveField apply_hamiltonian(const WaveField& f, const PotentialSpec& potential, double g);

} // namespace gpden
