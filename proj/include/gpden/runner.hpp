#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpden/scenarios.hpp"

namespace gpden {

inline constexpr const char* kVersion = "0.1.0";

// Relative output directories are resolved under this variable when set.
inline constexpr const char* kOutputRootEnv = "GPDEN_OUTPUT_ROOT";

struct OutputRecord {
    std::string file;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    nlohmann::json config;
    std::string started;
    std::string finished;
    nlohmann::json versions;
    std::vector<OutputRecord> outputs;
    std::filesystem::path directory;

    nlohmann::json to_json() const;
};

std::filesystem::path resolve_output_directory(const std::string& configured);

/// Builds the scenario source, writes residuals (and convergence.json when
/// refinement_levels >= 3), observables, trajectory dumps and |R| heatmaps,
/// then manifest.json last. Data files contain no wall-clock data.
RunManifest run(const ScenarioConfig& config);

// Residuals only, on trajectory dumps named in input.trajectories.
RunManifest verify(const ScenarioConfig& config);

} // namespace gpden
