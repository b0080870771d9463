#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "voidplace/fields.hpp"
#include "voidplace/grid.hpp"
#include "voidplace/sensing.hpp"

namespace voidplace {

/// Relative detection gain from raising theta: d ln p / d theta. For the
/// Gaussian footprint p = exp(-(s-a)^2 e^omega / theta) this is
/// (s-a)^2 e^omega / theta^2.
double lhs_relative_detection_gain(double s, const Sensor& sensor,
                                   double omega);

/// Availability cost of raising theta: -(alpha'/alpha) d chi / d theta =
/// beta * 2 omega (theta - 1) / (1 + beta chi). Negative for theta < 1,
/// where raising theta still moves zeta toward its minimum.
double rhs_false_alarm_penalty(double theta, double omega,
                               const AvailabilityParams& avail);

/// Margin m = LHS - RHS per cell for one sensor. Cells with m > 0 are where
/// raising that sensor's theta improves effective detection.
struct MarginDiagnostics {
  ScalarField lhs;
  ScalarField rhs;
  ScalarField margin;
  double positive_fraction = 0.0;  ///< fraction of cells with m strictly > 0
};

MarginDiagnostics margin_map(const ScalarField& omega, const Sensor& sensor,
                             const AvailabilityParams& avail);

/// Outcome of nudging one sensor's theta by dtheta on a fixed instance.
/// The monotonicity claims are guaranteed only when the premise (margin
/// nonnegative at every cell) holds; callers treat premise failures as
/// out-of-scope instances, not as check failures.
struct EffectCheck {
  bool premise_holds = false;
  double min_margin = 0.0;
  /// max over cells of p_tilde(theta) - p_tilde(theta + dtheta); positive
  /// beyond the slack means some cell's effective detection dropped
  double worst_p_tilde_drop = 0.0;
  double u_before = 0.0;
  double u_after = 0.0;
  bool p_tilde_monotone = false;
  bool u_monotone = false;
  bool nu_monotone = false;
  bool passed = false;  ///< all three monotonicity checks
};

/// Evaluates the effect of theta -> theta + dtheta for a single sensor
/// against a fixed intensity and environment field. `slack` absorbs floating
/// point noise in the entrywise and aggregate comparisons.
EffectCheck theorem1_effect_check(const ScalarField& intensity,
                                  const Sensor& sensor,
                                  const ScalarField& omega,
                                  const AvailabilityParams& avail,
                                  double dtheta, double slack = 1e-12);

/// One row of the penalty sweep: margin positivity and the paired void
/// probability gain of false-alarm-aware planning over raw-detection
/// planning, both evaluated under the false-alarm-aware truth.
struct SweepRow {
  double beta = 0.0;
  double positive_fraction = 0.0;
  double gain = 0.0;       ///< nu(FA-aware plan) - nu(raw plan)
  double std_error = 0.0;  ///< paired standard error of the gain
};

/// Sweep over assumed operational penalties, conditioned on one seeded
/// environment draw. Each row plans a placement on the
/// availability-weighted surrogate alpha*p with the row's beta; the raw
/// baseline plans on p alone (beta-independent). Placements are exhaustive
/// while the subset count stays moderate (greedy otherwise, whose myopia
/// can drown the effect under study). Both placements are scored
/// by Monte Carlo void probability over shared target arrivals and
/// detection coins (common random numbers) under the fixed `truth`
/// availability, so the sweep traces how sensitive the planning benefit is
/// to the assumed penalty: zero when the planner ignores penalties, largest
/// near the true one, decaying when it over-hedges. The margin positivity
/// column uses the same field, the row's beta, and the candidate nearest
/// the spatial midpoint.
std::vector<SweepRow> benefit_sweep(const ScalarField& intensity,
                                    const SensorSet& candidates, std::size_t k,
                                    const std::vector<double>& beta_list,
                                    const SeparableKernel& env_kernel,
                                    const SquashParams& squash_params,
                                    const AvailabilityParams& truth,
                                    int realizations, std::uint64_t seed);

/// CSV export: header `s_index,t_index,lhs,rhs,margin`.
void save_margin_csv(const MarginDiagnostics& diag,
                     const std::filesystem::path& path);

/// CSV export: header `beta,positive_fraction,gain,stderr`.
void save_sweep_csv(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path);

}  // namespace voidplace
