#pragma once

#include "dbwave/config.hpp"
#include "dbwave/picard.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dbwave {

inline constexpr const char* version = "0.1.0";

/// Trajectory CSV column order.
inline constexpr const char* trajectory_header =
    "t,l2_u,h1semi_u,lp_u_p,l2_ut,l2g1_ut,E,H,L,identity_residual";

inline constexpr const char* sweep_header =
    "cell,amplitude,alpha,r,p,m,E0,grad_u0,E0_below_d,grad_above_alpha1,termination,t_final,"
    "mu_hat,r_squared,error";

/// Well constants for a config: injected B, or the embedding constant on a
/// uniform mesh of thresholds.mesh_n elements seeded by config.seed. Throws
/// std::invalid_argument unless p > 2.
ThresholdConstants compute_thresholds(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ThresholdConstants& thresholds);

std::string trajectory_csv(const std::vector<EnergyReport>& reports);

struct RunOutcome {
  Trajectory trajectory;
  std::optional<ThresholdConstants> thresholds;
  double E0 = 0.0;
  double grad_u0 = 0.0;
  std::optional<GrowthFit> fit;
  std::string fit_error;
  std::optional<std::size_t> floor_violations;
  std::string floor_note;
  double identity_residual_max = 0.0;
};

/// Integrates one configuration and evaluates the growth diagnostics. Well
/// constants are used when p > 2 and the source is on; `thresholds` skips
/// their computation.
RunOutcome simulate(const RunConfig& config,
                    const std::optional<ThresholdConstants>& thresholds = std::nullopt);

/// Writes trajectory.csv and manifest.json into `out`. The manifest is written
/// even when the run throws; the exception is then recorded and rethrown.
RunOutcome cmd_run(const RunConfig& config, const std::filesystem::path& out);

/// Writes thresholds.json into `out` and returns the constants.
ThresholdConstants cmd_thresholds(const RunConfig& config, const std::filesystem::path& out);

struct SweepRow {
  std::size_t cell = 0;
  double amplitude = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  double p = 0.0;
  double m = 0.0;
  double E0 = 0.0;
  double grad_u0 = 0.0;
  bool E0_below_d = false;
  bool grad_above_alpha1 = false;
  std::string termination;
  double t_final = 0.0;
  std::optional<double> mu_hat;
  std::optional<double> r_squared;
  std::string error;
};

/// One row per (amplitude, alpha, r) cell, amplitude varying slowest. Cells
/// run on `jobs` threads; rows are ordered by cell index.
std::vector<SweepRow> run_sweep(const RunConfig& config, int jobs);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Writes sweep_summary.csv and thresholds.json (when p > 2) into `out`.
std::vector<SweepRow> cmd_sweep(const RunConfig& config, const std::filesystem::path& out, int jobs);

struct PicardStudy {
  double horizon = 0.0;
  PicardRun run;
  double direct_gap = 0.0;  ///< Y_T distance between the last iterate and the direct solve
};

std::vector<PicardStudy> run_picard(const RunConfig& config);

/// Writes picard.csv (one row per iterate distance) and picard.json.
std::vector<PicardStudy> cmd_picard(const RunConfig& config, const std::filesystem::path& out);

struct OracleRow {
  int n_modes = 0;
  double gap = 0.0;
  double identity_residual = 0.0;
  std::string error;
};

/// FEM run of the config against spectral runs at each oracle.n_modes, on the
/// FEM output grid.
std::vector<OracleRow> run_oracle_compare(const RunConfig& config);

/// Writes oracle_compare.csv.
std::vector<OracleRow> cmd_oracle_compare(const RunConfig& config, const std::filesystem::path& out);

}  // namespace dbwave
