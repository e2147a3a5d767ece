#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "gpden/grid.hpp"
#include "gpden/potentials.hpp"

namespace gpden {

using ComplexMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Purity { Pure, Mixed, Unknown };

// rho(x_i, x'_j) at one time.
struct DensityMatrix {
    SpatialGrid grid;
    ComplexMatrix values;
    double time_tag = 0.0;
    Purity purity_hint = Purity::Unknown;

    cplx trace() const;     // dx * sum_i rho_ii
    double purity() const;  // dx^2 * sum |rho_ij|^2
    double hermiticity_defect() const;
};

// R(x_i, x'_j, t, t').
struct GeneralizedDensityMatrix {
    SpatialGrid grid;
    ComplexMatrix values;
    double t = 0.0;
    double t_prime = 0.0;
};

/// Convex combination of pure-state trajectories sharing one spatial and
/// one time grid.
struct MixtureSpec {
    std::vector<double> weights;
    std::vector<Trajectory> components;

    // Weights in [0, 1] summing to 1 within 1e-12; shared grids; unit-norm
    // snapshots (skippable for diagnostics on unnormalized states).
    void validate(bool require_unit_norm = true) const;
    std::size_t steps() const;
    const SpatialGrid& grid() const;
};

// a_i conj(b_j), computed with one fixed formula so that equal-time and
// exchanged products agree bit for bit.
ComplexMatrix outer_product(std::span<const cplx> a, std::span<const cplx> b);

DensityMatrix pure_rho(const WaveField& f);
DensityMatrix mixture_rho(const MixtureSpec& spec, std::size_t k);
GeneralizedDensityMatrix generalized_R(const Trajectory& traj, std::size_t k, std::size_t l);
GeneralizedDensityMatrix mixture_R(const MixtureSpec& spec, std::size_t k, std::size_t l);

// exp(-i E (t - t')) phi(x) conj(phi(x'))
GeneralizedDensityMatrix stationary_R(const StationaryState& state, double t, double t_prime);

// Largest squared singular value over the squared Frobenius norm.
double dominant_singular_fraction(const ComplexMatrix& m);

} // namespace gpden
