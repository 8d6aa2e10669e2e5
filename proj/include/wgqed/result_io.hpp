#pragma once

// Result tables (CSV), comparison of two tables, and the binary
// projected-trajectory format.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgqed/observables.hpp"

namespace wgqed {

/// Column groups accepted in a scenario's `outputs` list.
inline const std::vector<std::string> kOutputNames{"populations", "n_total", "I_out", "R", "R_ld"};

/// Shortest exact decimal (%.17g); "nan" and "inf" for non-finite values.
std::string format_double(double v);

std::vector<std::string> result_columns(int n, const std::vector<std::string>& outputs);

/// Columns t, P_1..P_N, n_total, I_out, R, R_ld (restricted to `outputs` when non-empty).
void write_result_csv(std::ostream& os, const ScenarioResult& r, const std::vector<std::string>& outputs = {});
void write_result_csv(const std::filesystem::path& path, const ScenarioResult& r,
                      const std::vector<std::string>& outputs = {});

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::ptrdiff_t column(const std::string& name) const;
};

Table read_csv(const std::filesystem::path& path);

struct ColumnDeviation {
  std::string name;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::size_t compared = 0;
  /// Entries where exactly one side is NaN.
  std::size_t nan_mismatch = 0;
};

struct CompareReport {
  std::vector<ColumnDeviation> columns;
  double tol = 0.0;
  double max_deviation = 0.0;
  bool interpolated = false;
  bool pass = false;
};

/// Per-column deviations over the shared columns. Time grids must match
/// (relative 1e-9) or b is linearly interpolated onto a's overlap.
CompareReport compare_tables(const Table& a, const Table& b, double tol);
nlohmann::json to_json(const CompareReport& r);

nlohmann::json to_json(const BurstMetrics& b);

/// Binary file: "WGQEDTRJ", uint32 version, then sizes and little-endian
/// doubles for t, the metric and the u vectors.
inline constexpr std::uint32_t kTrajectoryVersion = 1;
void write_trajectory(const std::filesystem::path& path, const ProjectedTrajectory& traj);
ProjectedTrajectory read_trajectory(const std::filesystem::path& path);

}  // namespace wgqed
