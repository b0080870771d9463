#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "voidplace/grid.hpp"
#include "voidplace/placement.hpp"
#include "voidplace/sensing.hpp"

namespace voidplace {

/// Replaces the effective-detection layer with empirical frequencies: each
/// p_tilde entry becomes the mean of N Bernoulli draws at that probability,
/// so estimates land on the lattice {0, 1/N, ..., 1}. Entry (i, g) draws
/// from its own stream split(i).split(g) off the seed, so the estimate of
/// one entry is independent of matrix layout and of every other entry.
/// The raw p and alpha layers are carried over unchanged.
DetectionMatrix estimate_p_hat(const DetectionMatrix& matrix, int n,
                               std::uint64_t seed);

/// Uniform concentration radius sqrt(ln(2 m L / delta) / (2 N)) covering all
/// m * L sensor-cell estimates simultaneously with probability 1 - delta.
double hoeffding_eps(int n, std::size_t m, std::size_t cells, double delta);

/// Fraction of independent estimation rounds whose worst entrywise error
/// exceeds the concentration radius. The union bound is conservative, so
/// the observed rate typically sits far below delta.
double concentration_trial(const DetectionMatrix& matrix, int n, double delta,
                           int trials, std::uint64_t seed);

/// Sensitivity constant C_K = K * total mass: the worst-case effect of a
/// uniform detection perturbation on the expected undetected count.
double c_k(const ScalarField& intensity, std::size_t k);

/// Deterministic error propagation for one placement: the objective gap
/// between estimated and true detection layers against its Lipschitz bound
/// C_K * max entrywise error (K = placement size).
struct PropagationReport {
  double u_true = 0.0;
  double u_hat = 0.0;
  double deviation = 0.0;  ///< |u_hat - u_true|
  double max_error = 0.0;  ///< max entrywise |p_hat - p_tilde| over the whole matrix
  double c_k = 0.0;
  double lipschitz_bound = 0.0;  ///< c_k * max_error
  bool within_bound = false;
};

PropagationReport propagation_check(const ScalarField& intensity,
                                    const DetectionMatrix& true_matrix,
                                    const DetectionMatrix& estimated_matrix,
                                    const std::vector<std::size_t>& selected);

/// Void-probability floor for greedy placement built from estimates:
/// exp(-Lambda/e - (1 - 1/e) u_star_ref - (2 - 1/e) c_k eps_n). At eps_n = 0
/// this is exactly coverage_bound(Lambda, u_star_ref).
double stability_bound(double lambda_total, double u_star_ref, double c_k,
                       double eps_n);

/// Estimation experiment shape: sample sizes, confidence, budget, trials.
struct RobustnessConfig {
  std::vector<int> n_list;
  double delta = 0.1;
  std::size_t k = 3;
  int trials = 200;
};

/// One (sample size, trial) outcome of the estimate-then-place experiment.
struct StabilityRow {
  int n = 0;
  int trial = 0;
  double eps_n = 0.0;
  double max_error = 0.0;     ///< worst entrywise estimation error
  double u_deviation = 0.0;   ///< |U_hat - U_true| at the estimated-greedy placement
  double c_k_eps = 0.0;       ///< C_K * eps_n
  double realized_void = 0.0; ///< true void probability of that placement
  double stability_bound = 0.0;
  bool event_holds = false;   ///< max_error <= eps_n
};

/// Full sweep over config.n_list x trials on a fixed (intensity, omega)
/// instance: estimate the detection layer, re-run greedy on the estimate,
/// and score the result against the truth. The bound column uses
/// u_star_ref = expected misses of greedy on the true layer, which upper
/// bounds the optimum's. Under the concentration event every row satisfies
/// realized_void >= stability_bound.
std::vector<StabilityRow> stability_experiment(const ScalarField& intensity,
                                               const ScalarField& omega,
                                               const SensorSet& candidates,
                                               const AvailabilityParams& avail,
                                               const RobustnessConfig& config,
                                               std::uint64_t seed);

/// CSV export: header `N,eps_N,max_error,U_deviation,C_K_eps,realized_void,stability_bound,trial`.
void save_stability_csv(const std::vector<StabilityRow>& rows,
                        const std::filesystem::path& path);

}  // namespace voidplace
