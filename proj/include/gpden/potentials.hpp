#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gpden/grid.hpp"

namespace gpden {

struct ZeroPotential {};
struct HarmonicPotential {
    double omega = 1.0;
};
struct TabulatedPotential {
    std::vector<double> values;
};

// U(x); real-valued by construction.
class PotentialSpec {
public:
    using Kind = std::variant<ZeroPotential, HarmonicPotential, TabulatedPotential>;

    PotentialSpec() = default;
    static PotentialSpec zero() { return PotentialSpec(ZeroPotential{}); }
    static PotentialSpec harmonic(double omega);
    static PotentialSpec tabulated(std::vector<double> values);

    const Kind& kind() const { return kind_; }
    bool is_zero() const { return std::holds_alternative<ZeroPotential>(kind_); }
    bool is_harmonic() const { return std::holds_alternative<HarmonicPotential>(kind_); }
    std::string id() const;

private:
    explicit PotentialSpec(Kind k) : kind_(std::move(k)) {}
    Kind kind_ = ZeroPotential{};
};

std::vector<double> evaluate_potential(const PotentialSpec& spec, const SpatialGrid& grid);

enum class StateKind { LinearEigenstate, GpeGround, GpeSoliton };

struct StationaryState {
    WaveField field;
    double energy;  // E for linear eigenstates, chemical potential mu otherwise
    StateKind kind;
    int level = 0;  // oscillator quantum number for LinearEigenstate
};

/// Boundary and spectral-tail diagnostics for a sampled field. A grid is
/// "adequate" for a field when the amplitude at the outermost points is below
/// 1e-12 and the top 10% of |k| carries less than 1e-12 of the norm.
struct GridAdequacy {
    double boundary_amplitude;
    double spectral_tail_fraction;
    bool adequate() const { return boundary_amplitude < 1e-12 && spectral_tail_fraction < 1e-12; }
};

GridAdequacy assess_grid(const WaveField& f);

/// Dimensionless oscillator eigenstate phi_n (hbar = m = omega = 1), built
/// with the normalized three-term recurrence
///   phi_{n+1} = sqrt(2/(n+1)) x phi_n - sqrt(n/(n+1)) phi_{n-1}
/// so no factorials appear. Energy n + 1/2. Warns on std::clog if the grid is
/// too narrow for the state.
StationaryState hermite_eigenstate(int n, const SpatialGrid& grid);

// (pi w^2)^{-1/4} exp(-(x-x0)^2/(2 w^2) + i p0 (x-x0))
WaveField gaussian_packet(double x0, double p0, double width, const SpatialGrid& grid);

// Closed-form free (U = 0) evolution of gaussian_packet to time t.
WaveField free_gaussian_exact(double x0, double p0, double width, double t,
                              const SpatialGrid& grid);

/// Bright soliton of the attractive cubic equation at t = 0:
///   C sech(K (x - x0)) e^{i v x},  K = C sqrt(|g|),  mu = -K^2/2.
/// Requires g < 0 and C > 0.
StationaryState bright_soliton(double amplitude, double x0, double v, double g,
                               const SpatialGrid& grid);

// C sech(K(x - x0 - v t)) exp(i (v x - (v^2/2 + mu) t))
WaveField bright_soliton_exact(double amplitude, double x0, double v, double g, double t,
                               const SpatialGrid& grid);

} // namespace gpden
