#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpden/density.hpp"
#include "gpden/grid.hpp"
#include "gpden/potentials.hpp"
#include "gpden/propagator.hpp"
#include "gpden/residual.hpp"

namespace gpden {

struct ScenarioInfo {
    std::string id;
    std::string description;
    std::vector<std::string> equations;  // equation ids the scenario can verify
};

const std::vector<ScenarioInfo>& scenario_catalog();

// Complete default configuration object for a catalog entry ("custom" gives
// the generic defaults).
nlohmann::json scenario_defaults(const std::string& scenario);

/// Initial state description. `kind` is one of gaussian, hermite, soliton,
/// ground, hermite_mixture, soliton_mixture.
struct InitialStateConfig {
    std::string kind = "gaussian";
    double x0 = 0.0;
    double p0 = 0.0;
    double width = 1.0;
    int level = 0;
    double amplitude = 1.0;
    double velocity = 0.0;
    std::vector<int> levels;         // hermite_mixture
    std::vector<double> amplitudes;  // soliton_mixture
    std::vector<double> weights;     // both mixtures
    double target_norm = 1.0;        // ground
    double dtau = 1e-3;
    double tol = 1e-6;
    std::size_t max_iter = 200000;

    bool is_mixture() const { return kind == "hermite_mixture" || kind == "soliton_mixture"; }
};

struct ScenarioConfig {
    std::string scenario = "custom";
    std::size_t n = 256;
    double x_min = -16.0;
    double x_max = 16.0;
    double t0 = 0.0;
    double dt = 1e-3;
    std::size_t steps = 401;
    std::size_t store_stride = 10;
    double g = 0.0;
    PotentialSpec potential;
    InitialStateConfig initial;
    std::string sampling = "evolve";  // evolve | analytic
    std::vector<Equation> equations;
    std::size_t pairs = 5;
    std::size_t refinement_levels = 0;
    bool mixture_diagnostic = false;
    std::vector<std::string> input_trajectories;  // verify mode
    std::vector<double> input_weights;
    std::string output_directory = "out";
    bool write_csv = true;
    bool write_json = false;
    nlohmann::json echo;  // fully resolved configuration object
};

/// Overlay `user` on the scenario defaults, then apply `key.path=value`
/// overrides (values parsed as JSON, falling back to plain strings).
nlohmann::json resolve_config(const nlohmann::json& user, const std::vector<std::string>& sets);

// Validates every field before any compute; errors carry the field path.
ScenarioConfig parse_config(const nlohmann::json& resolved);

/// Pure-state components and weights produced by a configuration at a given
/// refinement level (level L halves the solver step and sample spacing L
/// times while keeping the stored time span).
struct ScenarioSource {
    std::vector<Trajectory> components;
    std::vector<double> weights;
    bool mixture = false;

    MixtureSpec as_mixture() const { return {weights, components}; }
};

ScenarioSource build_source(const ScenarioConfig& cfg, std::size_t level = 0);

// Residuals of one equation over the configured time-pair sample (k-only for
// eq4). Sample indices are chosen at level 0 and scaled by 2^level.
std::vector<ResidualReport> sample_residuals(const ScenarioConfig& cfg, const ScenarioSource& src,
                                             Equation eq, std::size_t level = 0);

ConvergenceReport convergence_for(const ScenarioConfig& cfg, Equation eq, std::size_t levels);

// Convergence study of a catalog scenario under its default configuration.
ConvergenceReport convergence_order(const std::string& scenario_id, Equation eq,
                                    std::size_t refinement_levels);

} // namespace gpden
