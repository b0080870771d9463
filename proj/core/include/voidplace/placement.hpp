#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "voidplace/fields.hpp"
#include "voidplace/grid.hpp"
#include "voidplace/sensing.hpp"

namespace voidplace {

/// An ordered selection of candidate indices, at most `budget` of them,
/// with the marginal coverage gain recorded per pick when the builder
/// computes one (greedy does, random and brute force do not).
struct Placement {
  std::vector<std::size_t> selected;
  std::vector<double> gains;
  std::size_t budget = 0;
};

/// Monte Carlo void-probability estimate plus the companion ensemble means.
struct VoidEstimate {
  double nu_mean = 0.0;       ///< mean of exp(-U_r)
  double nu_std_error = 0.0;  ///< sample std of exp(-U_r) / sqrt(n)
  double u_mean = 0.0;        ///< mean undetected count across realizations
  double mass_mean = 0.0;     ///< mean total intensity mass across realizations
};

/// Expected undetected targets sum_g lambda_g |g| prod_{i in selected}
/// (1 - p_tilde_{i,g}); the empty selection gives the total mass.
double expected_undetected(const ScalarField& intensity,
                           const DetectionMatrix& detection,
                           const std::vector<std::size_t>& selected);

/// A frozen set of (lambda, omega) realizations shared across every placement
/// evaluated against it. Realization r draws from split(r).split(0) and
/// split(r).split(1) of the seed, so two ensembles with the same samplers,
/// seed, and count are identical; comparing policies on one ensemble is the
/// common-random-numbers evaluation.
class EvalEnsemble {
 public:
  EvalEnsemble(const FieldSampler& lambda_sampler,
               const FieldSampler& omega_sampler, int realizations,
               std::uint64_t seed);

  [[nodiscard]] int realizations() const {
    return static_cast<int>(lambdas_.size());
  }
  [[nodiscard]] const ScalarField& lambda(int r) const { return lambdas_[static_cast<std::size_t>(r)]; }
  [[nodiscard]] const ScalarField& omega(int r) const { return omegas_[static_cast<std::size_t>(r)]; }
  [[nodiscard]] double mass_mean() const { return mass_mean_; }

  /// Void probability of one selection, with the detection stack rebuilt
  /// against each realization's omega (availability always applied; the
  /// evaluation model is the false-alarm-aware truth).
  [[nodiscard]] VoidEstimate evaluate(const SensorSet& candidates,
                                      const std::vector<std::size_t>& selected,
                                      const AvailabilityParams& avail) const;

  /// Void probabilities of every prefix of `selected`, element k covering the
  /// first k sensors; index 0 is the empty placement. One pass per
  /// realization, so a K-sweep over a nested greedy order costs the same as
  /// evaluating the full selection once.
  [[nodiscard]] std::vector<VoidEstimate> evaluate_prefixes(
      const SensorSet& candidates, const std::vector<std::size_t>& selected,
      const AvailabilityParams& avail) const;

  /// Realized undetected counts, one per realization; paired statistics
  /// across placements come from differencing these under a shared ensemble.
  [[nodiscard]] std::vector<double> undetected_counts(
      const SensorSet& candidates, const std::vector<std::size_t>& selected,
      const AvailabilityParams& avail) const;

 private:
  std::vector<ScalarField> lambdas_;
  std::vector<ScalarField> omegas_;
  double mass_mean_ = 0.0;
};

/// Convenience wrapper: builds a fresh ensemble and evaluates one selection.
VoidEstimate void_probability_mc(const FieldSampler& lambda_sampler,
                                 const FieldSampler& omega_sampler,
                                 const SensorSet& candidates,
                                 const std::vector<std::size_t>& selected,
                                 const AvailabilityParams& avail,
                                 int realizations, std::uint64_t seed);

/// Greedy coverage maximization: k steps, each adding the candidate with the
/// largest decrease in expected undetected targets, ties to the lowest index.
/// The recorded gain sequence is nonincreasing. Throws std::invalid_argument
/// if k exceeds the candidate count.
Placement greedy_place(const ScalarField& intensity,
                       const DetectionMatrix& detection, std::size_t k);

/// Exact coverage maximizer by subset enumeration, ties to the
/// lexicographically smallest subset. Guarded to at most one million subsets
/// (std::invalid_argument beyond that).
Placement brute_force_place(const ScalarField& intensity,
                            const DetectionMatrix& detection, std::size_t k);

/// Uniform sample of k distinct candidate indices.
Placement random_place(std::size_t candidate_count, std::size_t k,
                       std::uint64_t seed);

/// exp(-Lambda/e - (1 - 1/e) * u_bar_ref): void-probability floor for greedy
/// placement via its coverage guarantee. Any upper bound on the optimal
/// placement's expected misses is a valid u_bar_ref.
double coverage_bound(double lambda_total, double u_bar_ref);

/// (1 - 1/e) * exp(-u_bar_ref): the floor obtained by discounting the
/// Jensen surrogate by the greedy approximation factor.
double approx_bound(double u_bar_ref);

/// Coverage level tau = -e ln(1 - 1/e) ~ 1.2468 below which coverage_bound
/// beats approx_bound at equal u_bar_ref.
double dominance_threshold();

/// Greedy-coverage level tau' = -(e-1) ln(1 - 1/e) ~ 0.788 that certifies
/// the coverage bound exceeds (1 - 1/e) times the Jensen surrogate.
double switching_threshold();

/// Everything the bound comparison needs for one budget: the greedy
/// placement's ensemble statistics, both floors, and the threshold flags.
/// Lambda, U_bar, and nu_mc come from the same ensemble, so the recorded
/// inequalities nu_mc >= jensen_bound >= max(coverage_bound, approx_bound)
/// hold realization-wise, not only in expectation.
struct CertificateReport {
  std::size_t budget = 0;
  std::vector<std::size_t> selected;
  double lambda_total = 0.0;  ///< ensemble mean mass
  double u_bar = 0.0;         ///< ensemble mean undetected count
  double coverage = 0.0;      ///< lambda_total - u_bar
  double nu_mc = 0.0;
  double nu_std_error = 0.0;
  double jensen_bound = 0.0;  ///< exp(-u_bar)
  double coverage_bound = 0.0;
  double approx_bound = 0.0;
  double tau = 0.0;
  double tau_prime = 0.0;
  bool dominance_flag = false;  ///< coverage < tau
  bool switching_flag = false;  ///< coverage < tau'
};

/// Runs greedy on the planning inputs, evaluates it on the ensemble, and
/// fills in bounds with u_bar_ref = the ensemble's expected misses.
CertificateReport certify(const ScalarField& planning_intensity,
                          const DetectionMatrix& planning_matrix,
                          const SensorSet& candidates, std::size_t k,
                          const EvalEnsemble& ensemble,
                          const AvailabilityParams& avail);

/// JSON rendering of a report, stable key order.
std::string certificate_to_json(const CertificateReport& report);

/// CSV export: header `rank,candidate_index,location_km,marginal_gain`.
/// Gains column is empty when the placement carries no gain sequence.
void save_placement_csv(const Placement& placement,
                        const SensorSet& candidates,
                        const std::filesystem::path& path);

}  // namespace voidplace
