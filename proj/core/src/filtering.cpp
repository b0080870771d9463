#include "voidplace/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "voidplace/io.hpp"
#include "voidplace/placement.hpp"
#include "voidplace/rng.hpp"

namespace voidplace {

double lhs_relative_detection_gain(double s, const Sensor& sensor,
                                   double omega) {
  const double d = s - sensor.location;
  return d * d * std::exp(omega) / (sensor.theta * sensor.theta);
}

double rhs_false_alarm_penalty(double theta, double omega,
                               const AvailabilityParams& avail) {
  const double chi = false_alarm_rate(omega, theta, avail.xi);
  const double dchi = 2.0 * omega * (theta - 1.0);
  return avail.beta * dchi / (1.0 + avail.beta * chi);
}

MarginDiagnostics margin_map(const ScalarField& omega, const Sensor& sensor,
                             const AvailabilityParams& avail) {
  const SpaceTimeGrid& grid = omega.grid;
  MarginDiagnostics diag{ScalarField::constant(grid, 0.0),
                         ScalarField::constant(grid, 0.0),
                         ScalarField::constant(grid, 0.0), 0.0};
  std::size_t positive = 0;
  for (std::size_t i_s = 0; i_s < grid.n_s; ++i_s) {
    const double s = grid.s_center(i_s);
    for (std::size_t i_t = 0; i_t < grid.n_t; ++i_t) {
      const std::size_t g = grid.flat_index(i_s, i_t);
      const double w = omega.values[g];
      const double lhs = lhs_relative_detection_gain(s, sensor, w);
      const double rhs = rhs_false_alarm_penalty(sensor.theta, w, avail);
      diag.lhs.values[g] = lhs;
      diag.rhs.values[g] = rhs;
      diag.margin.values[g] = lhs - rhs;
      if (lhs - rhs > 0.0) ++positive;
    }
  }
  diag.positive_fraction =
      static_cast<double>(positive) / static_cast<double>(grid.size());
  return diag;
}

EffectCheck theorem1_effect_check(const ScalarField& intensity,
                                  const Sensor& sensor,
                                  const ScalarField& omega,
                                  const AvailabilityParams& avail,
                                  double dtheta, double slack) {
  if (!(dtheta > 0.0)) {
    throw std::invalid_argument("dtheta must be positive");
  }
  if (!(intensity.grid == omega.grid)) {
    throw std::invalid_argument("intensity and omega grid mismatch");
  }
  const MarginDiagnostics diag = margin_map(omega, sensor, avail);
  EffectCheck check;
  check.min_margin =
      *std::min_element(diag.margin.values.begin(), diag.margin.values.end());
  check.premise_holds = check.min_margin >= 0.0;

  const Sensor bumped{sensor.location, sensor.theta + dtheta};
  const DetectionMatrix before =
      build_detection_matrix(intensity.grid, {sensor}, omega, avail);
  const DetectionMatrix after =
      build_detection_matrix(intensity.grid, {bumped}, omega, avail);
  double worst_drop = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < before.cell_count; ++g) {
    worst_drop = std::max(worst_drop, before.p_tilde[g] - after.p_tilde[g]);
  }
  check.worst_p_tilde_drop = worst_drop;
  check.p_tilde_monotone = worst_drop <= slack;
  check.u_before = expected_undetected(intensity, before, {0});
  check.u_after = expected_undetected(intensity, after, {0});
  check.u_monotone = check.u_after <= check.u_before + slack;
  check.nu_monotone =
      std::exp(-check.u_after) >= std::exp(-check.u_before) - slack;
  check.passed =
      check.p_tilde_monotone && check.u_monotone && check.nu_monotone;
  return check;
}

namespace {

// subsets the exhaustive placer would enumerate, saturating to avoid
// overflow; the sweep prefers exact placements because greedy's myopia is
// larger than the surrogate effect it is trying to measure
double subset_count(std::size_t m, std::size_t k) {
  double count = 1.0;
  for (std::size_t j = 1; j <= k; ++j) {
    count *= static_cast<double>(m - k + j) / static_cast<double>(j);
    if (count > 1e18) return 1e18;
  }
  return count;
}

// exact for any mean: a sum of independent Poisson chunks is Poisson with
// the summed mean, and each chunk keeps exp(-chunk) far from underflow
int sample_poisson(SplitRng& rng, double mean) {
  int count = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double chunk = std::min(remaining, 30.0);
    remaining -= chunk;
    const double floor = std::exp(-chunk);
    double prod = rng.uniform();
    while (prod >= floor) {
      ++count;
      prod *= rng.uniform();
    }
  }
  return count;
}

}  // namespace

std::vector<SweepRow> benefit_sweep(const ScalarField& intensity,
                                    const SensorSet& candidates, std::size_t k,
                                    const std::vector<double>& beta_list,
                                    const SeparableKernel& env_kernel,
                                    const SquashParams& squash_params,
                                    const AvailabilityParams& truth,
                                    int realizations, std::uint64_t seed) {
  if (beta_list.empty()) {
    throw std::invalid_argument("beta list must be nonempty");
  }
  if (candidates.empty() || k > candidates.size()) {
    throw std::invalid_argument("invalid candidate set or budget");
  }
  if (realizations < 1) {
    throw std::invalid_argument("realizations must be positive");
  }
  const SpaceTimeGrid& grid = intensity.grid;
  const SplitRng root(seed);

  // the sweep conditions on one drawn environment: the margin share, both
  // planning arms, and the evaluation all see the same field, so every row
  // describes a single operating state
  SplitRng env_rng = root.split(1);
  const ScalarField env_omega =
      omega_sampler(grid, env_kernel, squash_params)(env_rng);

  // the representative sensor for margin diagnostics: nearest the spatial
  // midpoint, lowest index on ties
  const double mid = 0.5 * (grid.s_min + grid.s_max);
  std::size_t rep = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (std::abs(candidates[i].location - mid) <
        std::abs(candidates[rep].location - mid)) {
      rep = i;
    }
  }

  // one shared batch of target arrivals; the detection coin is reused by
  // both arms and every row, so the gain column is a paired estimate
  struct Target {
    std::size_t cell = 0;
    double coin = 0.0;
  };
  std::vector<std::vector<Target>> batches(
      static_cast<std::size_t>(realizations));
  {
    std::vector<double> cumulative(grid.size());
    double acc = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      acc += intensity.values[g];
      cumulative[g] = acc;
    }
    const double mass = total_mass(intensity);
    SplitRng arrivals = root.split(2);
    for (auto& batch : batches) {
      const int count = sample_poisson(arrivals, mass);
      batch.resize(static_cast<std::size_t>(count));
      for (Target& target : batch) {
        const double level = arrivals.uniform() * acc;
        target.cell = static_cast<std::size_t>(
            std::lower_bound(cumulative.begin(), cumulative.end(), level) -
            cumulative.begin());
        if (target.cell >= grid.size()) target.cell = grid.size() - 1;
        target.coin = arrivals.uniform();
      }
    }
  }

  const auto hit_profile = [&](const DetectionMatrix& matrix,
                               const std::vector<std::size_t>& selected) {
    std::vector<double> hit(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double miss = 1.0;
      for (std::size_t i : selected) {
        miss *= 1.0 - matrix.p_tilde[matrix.index(i, g)];
      }
      hit[g] = 1.0 - miss;
    }
    return hit;
  };

  // exact placements whenever enumeration is affordable; greedy's myopia
  // can cost more void probability than the penalty model under study
  const bool exhaustive = subset_count(candidates.size(), k) <= 250000.0;
  const auto place = [&](const DetectionMatrix& matrix) {
    return exhaustive ? brute_force_place(intensity, matrix, k)
                      : greedy_place(intensity, matrix, k);
  };

  // the scoring stack and the raw baseline do not move with the assumed
  // penalty: raw p carries no availability term at all
  const DetectionMatrix truth_matrix =
      build_detection_matrix(grid, candidates, env_omega, truth, true);
  const DetectionMatrix raw_matrix =
      build_detection_matrix(grid, candidates, env_omega, truth, false);
  const Placement raw_plan = place(raw_matrix);
  const std::vector<double> hit_raw = hit_profile(truth_matrix,
                                                  raw_plan.selected);

  std::vector<SweepRow> rows;
  rows.reserve(beta_list.size());
  for (double beta : beta_list) {
    const AvailabilityParams assumed{beta, truth.xi};
    const DetectionMatrix plan_matrix =
        build_detection_matrix(grid, candidates, env_omega, assumed, true);
    const Placement aware_plan = place(plan_matrix);
    const std::vector<double> hit_aware =
        hit_profile(truth_matrix, aware_plan.selected);

    SweepRow row;
    row.beta = beta;
    row.positive_fraction =
        margin_map(env_omega, candidates[rep], assumed).positive_fraction;
    const double n = static_cast<double>(realizations);
    std::vector<double> diff;
    diff.reserve(batches.size());
    for (const auto& batch : batches) {
      bool void_aware = true;
      bool void_raw = true;
      for (const Target& target : batch) {
        if (target.coin >= hit_aware[target.cell]) void_aware = false;
        if (target.coin >= hit_raw[target.cell]) void_raw = false;
      }
      diff.push_back((void_aware ? 1.0 : 0.0) - (void_raw ? 1.0 : 0.0));
      row.gain += diff.back();
    }
    row.gain /= n;
    if (realizations > 1) {
      double ss = 0.0;
      for (double d : diff) ss += (d - row.gain) * (d - row.gain);
      row.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    rows.push_back(row);
  }
  return rows;
}

void save_margin_csv(const MarginDiagnostics& diag,
                     const std::filesystem::path& path) {
  const SpaceTimeGrid& grid = diag.margin.grid;
  std::ostringstream out;
  out << "s_index,t_index,lhs,rhs,margin\n";
  for (std::size_t i = 0; i < grid.n_s; ++i) {
    for (std::size_t j = 0; j < grid.n_t; ++j) {
      out << i << ',' << j << ',' << dtos(diag.lhs.at(i, j)) << ','
          << dtos(diag.rhs.at(i, j)) << ',' << dtos(diag.margin.at(i, j))
          << "\n";
    }
  }
  write_text_atomic(path, out.str());
}

void save_sweep_csv(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path) {
  std::ostringstream out;
  out << "beta,positive_fraction,gain,stderr\n";
  for (const SweepRow& row : rows) {
    out << dtos(row.beta) << ',' << dtos(row.positive_fraction) << ','
        << dtos(row.gain) << ',' << dtos(row.std_error) << "\n";
  }
  write_text_atomic(path, out.str());
}

}  // namespace voidplace
