#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "voidplace/fields.hpp"
#include "voidplace/grid.hpp"
#include "voidplace/ingest.hpp"
#include "voidplace/robustness.hpp"
#include "voidplace/sensing.hpp"

namespace voidplace {

/// Grid bounds and resolution as configured (validated into a SpaceTimeGrid
/// by make_grid).
struct GridConfig {
  double s_min = 0.0;
  double s_max = 10.0;
  double t_min = 0.0;
  double t_max = 24.0;
  std::size_t n_s = 200;
  std::size_t n_t = 48;
};

/// Target arrival model: either a log-Gaussian process around log_mean, or
/// a base intensity loaded from CSV with log-Gaussian perturbations around
/// it. The kernel serves both roles.
struct TargetConfig {
  SeparableKernel kernel{0.8, 0.5, 1.0};
  double log_mean = -5.0;
  std::string intensity_csv;  ///< empty: synthetic log-Gaussian model
};

/// Environment degradation model: latent GP plus the bounded squash.
struct EnvironmentConfig {
  SeparableKernel kernel{0.8, 0.5, 1.0};
  double beta_omega = 1.5;
};

/// Candidate sensors: common sensitivity and how many evenly spread
/// locations (0 means one candidate per spatial cell).
struct SensorConfig {
  double theta = 1.2;
  std::size_t candidate_count = 0;
};

/// How planning sees the random environment. "expected_detection" scores
/// the planner against the exact per-cell expectation of the detection
/// layers (deterministic quadrature over the interference marginal);
/// "mc_detection" estimates the same expectation by averaging the layers
/// over omega_draws sampled fields; "mc_mean" plugs the averaged omega
/// field into the detection formulas; "draw" commits to a single
/// environment realization.
struct PlanningConfig {
  std::string omega_mode = "expected_detection";
  int omega_draws = 64;
};

/// Budget sweep and evaluation depth for the placement and bounds commands.
struct PlaceConfig {
  std::size_t k_min = 1;
  std::size_t k_max = 8;
  int realizations = 200;
};

/// Margin diagnostics: map/scatter/histogram shape and the penalty sweep.
struct MarginConfig {
  std::size_t scatter_cells = 4000;
  std::size_t hist_bins = 40;
  /// Assumed-penalty sweep anchored at the operational beta and extending
  /// into over-hedged territory, where the planning benefit decays together
  /// with the share of positive-margin cells.
  std::vector<double> beta_list{5.0, 10.0, 20.0, 50.0, 100.0, 200.0};
  std::size_t sweep_k = 4;
  int sweep_realizations = 100;
  double sensor_s = 5.0;  ///< representative sensor location for the map
};

/// Finite-sample experiment: its own short-window grid and scale, the
/// candidate count m, and the estimation sweep parameters.
struct RobustnessSection {
  GridConfig grid{0.0, 10.0, 0.0, 0.25, 192, 1};
  double log_mean = -0.8;
  std::size_t sensor_count = 10;
  RobustnessConfig run{{100, 400, 1600, 6400}, 0.1, 3, 200};
};

/// AIS ingestion: source file or synthetic fallback, transect geometry,
/// observation window, event collapsing, and smoothing bandwidths.
struct IngestConfig {
  std::string ais_csv;
  bool synthetic = false;
  SegmentProjection segment;
  std::string window_start = "2020-01-01T00:00:00";
  std::string window_end = "2020-04-01T00:00:00";
  bool fold_daily = true;
  std::string event_mode = "per_vessel_bin";  ///< or "per_ping"
  double bandwidth_s = 0.5;
  double bandwidth_t = 1.0;
  int samples = 30;
};

/// Everything a command needs; every experiment is a pure function of this
/// plus nothing else.
struct ExperimentConfig {
  GridConfig grid;
  TargetConfig target;
  EnvironmentConfig environment;
  AvailabilityParams availability{5.0, 0.2};
  SensorConfig sensors;
  PlanningConfig planning;
  PlaceConfig place;
  MarginConfig margin;
  RobustnessSection robustness;
  IngestConfig ingest;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

/// Parses a JSON config document. Missing keys take defaults; unknown keys,
/// type mismatches, and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const std::string& json_text);

/// parse_config over a file; unreadable file throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full effective config as JSON (defaults applied), stable key order;
/// parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const ExperimentConfig& config);

/// The configured grid, validated.
SpaceTimeGrid make_grid(const GridConfig& grid_config);

}  // namespace voidplace
