#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gpden/density.hpp"
#include "gpden/grid.hpp"
#include "gpden/residual.hpp"

namespace gpden::io {

// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

/// Trajectory dump (text):
///   line 1: n x_min x_max t0 dt steps g
///   then one line per snapshot: re_0 im_0 re_1 im_1 ... re_{n-1} im_{n-1}
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path, std::string potential_id = {});

/// Matrix dump, row-major. CSV: header line "n,x_min,x_max,t,t_prime", then
/// n lines of n "re,im" pairs separated by commas. JSON: an object with the
/// same header keys plus "values": [[re, im], ...] in row-major order.
void write_matrix_csv(const std::filesystem::path& path, const GeneralizedDensityMatrix& m);
void write_matrix_json(const std::filesystem::path& path, const GeneralizedDensityMatrix& m);

// Columns: equation_id,t,t_prime,n,dt_sample,max_abs,l2. The single-time
// equation repeats t in the t_prime column.
void write_residuals_csv(const std::filesystem::path& path,
                         const std::vector<ResidualReport>& reports);
void write_residuals_json(const std::filesystem::path& path,
                          const std::vector<ResidualReport>& reports);
void write_convergence_json(const std::filesystem::path& path,
                            const std::vector<ConvergenceReport>& reports);

std::string sha256_file(const std::filesystem::path& path);

} // namespace gpden::io
