#pragma once

#include <string>

#include "voidplace/config.hpp"

namespace voidplace {

/// Writes one latent draw and its squashed environment field (z.csv,
/// omega.csv) plus the run manifest.
void cmd_simulate_env(const ExperimentConfig& config);

/// Builds the arrival intensity, from AIS data or the synthetic model, and
/// writes it (intensity.csv) with the configured number of perturbation
/// samples (sample_XX.csv).
void cmd_fit_intensity(const ExperimentConfig& config);

/// Runs the four placement policies over the budget range, scores them on a
/// shared realization ensemble, and writes per-policy placements plus
/// summary.csv.
void cmd_place(const ExperimentConfig& config);

/// Certifies the false-alarm-aware greedy placement at each budget: one
/// certificate JSON per K plus summary.csv of bounds and thresholds.
void cmd_bounds(const ExperimentConfig& config);

/// Margin diagnostics for a representative sensor: full map, seeded cell
/// scatter, histogram, summary stats, and the operational-penalty sweep.
void cmd_margin(const ExperimentConfig& config);

/// Finite-sample estimation experiment on the short-window grid: combined
/// stability.csv plus the three panel CSVs.
void cmd_robustness(const ExperimentConfig& config);

/// Dispatch by CLI command name (e.g. "simulate-env"); unknown names throw
/// ConfigError.
void run_command(const std::string& name, const ExperimentConfig& config);

}  // namespace voidplace
