#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpden/density.hpp"
#include "gpden/grid.hpp"
#include "gpden/potentials.hpp"

namespace gpden {

enum class Equation { VonNeumann, GeneralizedLinear, GeneralizedGpe };

// "eq4", "eq9", "eq16"
const char* equation_id(Equation eq);
Equation parse_equation(const std::string& id);

struct ResidualReport {
    Equation equation;
    double max_abs = 0.0;
    double l2 = 0.0;  // sqrt(dx dx' sum |D_ij|^2)
    double t = 0.0;
    std::optional<double> t_prime;  // empty for the single-time equation
    std::size_t n = 0;
    double dt_sample = 0.0;
    std::size_t argmax_i = 0;
    std::size_t argmax_j = 0;
};

/// Defect of the equal-time equation
///   D = i d_t rho + 1/2 (d_x^2 - d_x'^2) rho - (U(x) - U(x')) rho
/// with d_t a central difference over snapshots k-1, k+1 and spectral
/// derivatives along both indices. Only for g = 0 sources.
ResidualReport von_neumann_residual(const Trajectory& traj, const PotentialSpec& potential,
                                    std::size_t k);
ResidualReport von_neumann_residual(const MixtureSpec& spec, const PotentialSpec& potential,
                                    std::size_t k);

/// Two-time defect
///   D = i d_t R + i d_t' R + 1/2 (d_x^2 - d_x'^2) R - (U(x) - U(x')) R,
/// d_t from R(k+-1, l), d_t' from R(k, l+-1). Only for g = 0 sources.
ResidualReport generalized_linear_residual(const Trajectory& traj, const PotentialSpec& potential,
                                           std::size_t k, std::size_t l);
ResidualReport generalized_linear_residual(const MixtureSpec& spec,
                                           const PotentialSpec& potential, std::size_t k,
                                           std::size_t l);

/// Nonlinear nonlocal two-time defect: the linear defect minus
///   g R(x,x',t,t') [R(x,x,t,t) - R(x',x',t',t')],
/// the bracket taken from the equal-time diagonals at t_k and t_l.
ResidualReport gpe_generalized_residual(const Trajectory& traj, const PotentialSpec& potential,
                                        double g, std::size_t k, std::size_t l);

// Always throws: the nonlinear two-time equation is derived for single states
// and does not close on convex mixtures.
ResidualReport gpe_generalized_residual(const MixtureSpec& spec, const PotentialSpec& potential,
                                        double g, std::size_t k, std::size_t l);

// Computes the same defect on a mixture anyway, with the mixture's own
// diagonals in the bracket. Used to exhibit the non-closure floor.
ResidualReport gpe_mixture_defect_diagnostic(const MixtureSpec& spec,
                                             const PotentialSpec& potential, double g,
                                             std::size_t k, std::size_t l);

// `count` interior indices in [1, steps-2], uniformly spaced.
std::vector<std::size_t> interior_indices(std::size_t steps, std::size_t count);

struct ConvergenceLevel {
    double dt_sample;
    double max_abs;
};

struct ConvergenceReport {
    Equation equation;
    std::vector<ConvergenceLevel> levels;  // decreasing dt_sample
    std::vector<double> pair_orders;       // log2(r_coarse / r_fine) per adjacent pair
    double estimated_order = 0.0;
    bool at_floor = false;

    // Rejects fewer than 3 levels or dt_sample not strictly decreasing. Flags
    // a floor when a halving changes max_abs by < 10% or the finest residual
    // is below 1e-10.
    static ConvergenceReport from_levels(Equation eq, std::vector<ConvergenceLevel> levels);
};

// `residual_at(level)` returns the level's max_abs residual and dt_sample;
// levels 0..refinement_levels-1 are requested in order.
ConvergenceReport convergence_order(
    Equation eq, std::size_t refinement_levels,
    const std::function<ConvergenceLevel(std::size_t level)>& residual_at);

} // namespace gpden
