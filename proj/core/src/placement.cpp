#include "voidplace/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "voidplace/io.hpp"
#include "voidplace/rng.hpp"

namespace voidplace {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

// lambda_g * |g| per cell, the quadrature weights every objective sums over.
std::vector<double> cell_weights(const ScalarField& intensity) {
  const double measure = intensity.grid.cell_measure();
  std::vector<double> w(intensity.values.size());
  for (std::size_t g = 0; g < w.size(); ++g) {
    w[g] = intensity.values[g] * measure;
  }
  return w;
}

void check_selection(const DetectionMatrix& detection,
                     const std::vector<std::size_t>& selected) {
  for (std::size_t i : selected) {
    if (i >= detection.sensor_count) {
      throw std::invalid_argument("selected index outside candidate set");
    }
  }
}

// Undetected count for one realized (lambda, omega) pair; the detection
// stack is built on the fly for just the selected sensors.
double realized_undetected(const ScalarField& lambda, const ScalarField& omega,
                           const SensorSet& candidates,
                           const std::vector<std::size_t>& selected,
                           const AvailabilityParams& avail) {
  const SpaceTimeGrid& grid = lambda.grid;
  const double measure = grid.cell_measure();
  double total = 0.0;
  for (std::size_t i_s = 0; i_s < grid.n_s; ++i_s) {
    const double s = grid.s_center(i_s);
    for (std::size_t i_t = 0; i_t < grid.n_t; ++i_t) {
      const std::size_t g = grid.flat_index(i_s, i_t);
      const double w = omega.values[g];
      double res = 1.0;
      for (std::size_t i : selected) {
        const Sensor& sensor = candidates[i];
        const double ell = effective_length(sensor.theta, w);
        const double p = detect_prob(s, sensor.location, ell);
        const double a = availability(
            false_alarm_rate(w, sensor.theta, avail.xi), avail.beta);
        res *= 1.0 - a * p;
      }
      total += lambda.values[g] * measure * res;
    }
  }
  return total;
}

VoidEstimate summarize(const std::vector<double>& u_values,
                       const std::vector<double>& masses) {
  const auto n = u_values.size();
  VoidEstimate est;
  std::vector<double> nu(n);
  for (std::size_t r = 0; r < n; ++r) {
    nu[r] = std::exp(-u_values[r]);
    est.nu_mean += nu[r];
    est.u_mean += u_values[r];
    est.mass_mean += masses[r];
  }
  est.nu_mean /= static_cast<double>(n);
  est.u_mean /= static_cast<double>(n);
  est.mass_mean /= static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : nu) ss += (v - est.nu_mean) * (v - est.nu_mean);
    est.nu_std_error =
        std::sqrt(ss / static_cast<double>(n - 1)) /
        std::sqrt(static_cast<double>(n));
  }
  return est;
}

}  // namespace

double expected_undetected(const ScalarField& intensity,
                           const DetectionMatrix& detection,
                           const std::vector<std::size_t>& selected) {
  if (detection.cell_count != intensity.values.size()) {
    throw std::invalid_argument("detection matrix cell count mismatch");
  }
  check_selection(detection, selected);
  const std::vector<double> w = cell_weights(intensity);
  double total = 0.0;
  for (std::size_t g = 0; g < w.size(); ++g) {
    double res = 1.0;
    for (std::size_t i : selected) {
      res *= 1.0 - detection.p_tilde[detection.index(i, g)];
    }
    total += w[g] * res;
  }
  return total;
}

EvalEnsemble::EvalEnsemble(const FieldSampler& lambda_sampler,
                           const FieldSampler& omega_sampler,
                           int realizations, std::uint64_t seed) {
  if (realizations < 1) {
    throw std::invalid_argument("need at least one realization");
  }
  const SplitRng root(seed);
  lambdas_.reserve(static_cast<std::size_t>(realizations));
  omegas_.reserve(static_cast<std::size_t>(realizations));
  for (int r = 0; r < realizations; ++r) {
    const SplitRng branch = root.split(static_cast<std::uint64_t>(r));
    SplitRng lambda_rng = branch.split(0);
    SplitRng omega_rng = branch.split(1);
    lambdas_.push_back(lambda_sampler(lambda_rng));
    omegas_.push_back(omega_sampler(omega_rng));
    if (!(lambdas_.back().grid == omegas_.back().grid)) {
      throw std::invalid_argument("lambda and omega samplers disagree on grid");
    }
    mass_mean_ += total_mass(lambdas_.back());
  }
  mass_mean_ /= static_cast<double>(realizations);
}

VoidEstimate EvalEnsemble::evaluate(const SensorSet& candidates,
                                    const std::vector<std::size_t>& selected,
                                    const AvailabilityParams& avail) const {
  std::vector<VoidEstimate> prefixes =
      evaluate_prefixes(candidates, selected, avail);
  return prefixes.back();
}

std::vector<VoidEstimate> EvalEnsemble::evaluate_prefixes(
    const SensorSet& candidates, const std::vector<std::size_t>& selected,
    const AvailabilityParams& avail) const {
  for (std::size_t i : selected) {
    if (i >= candidates.size()) {
      throw std::invalid_argument("selected index outside candidate set");
    }
  }
  const std::size_t n_prefix = selected.size() + 1;
  const auto n_real = lambdas_.size();
  std::vector<std::vector<double>> u(n_prefix,
                                     std::vector<double>(n_real, 0.0));
  std::vector<double> masses(n_real, 0.0);
  for (std::size_t r = 0; r < n_real; ++r) {
    const ScalarField& lambda = lambdas_[r];
    const ScalarField& omega = omegas_[r];
    const SpaceTimeGrid& grid = lambda.grid;
    std::vector<double> weights = cell_weights(lambda);
    std::vector<double> u_acc(n_prefix, 0.0);
    for (std::size_t i_s = 0; i_s < grid.n_s; ++i_s) {
      const double s = grid.s_center(i_s);
      for (std::size_t i_t = 0; i_t < grid.n_t; ++i_t) {
        const std::size_t g = grid.flat_index(i_s, i_t);
        const double w_env = omega.values[g];
        double res = weights[g];
        u_acc[0] += res;
        for (std::size_t k = 0; k < selected.size(); ++k) {
          const Sensor& sensor = candidates[selected[k]];
          const double ell = effective_length(sensor.theta, w_env);
          const double p = detect_prob(s, sensor.location, ell);
          const double a = availability(
              false_alarm_rate(w_env, sensor.theta, avail.xi), avail.beta);
          res *= 1.0 - a * p;
          u_acc[k + 1] += res;
        }
      }
    }
    masses[r] = u_acc[0];
    for (std::size_t k = 0; k < n_prefix; ++k) u[k][r] = u_acc[k];
  }
  std::vector<VoidEstimate> out;
  out.reserve(n_prefix);
  for (std::size_t k = 0; k < n_prefix; ++k) {
    out.push_back(summarize(u[k], masses));
  }
  return out;
}

std::vector<double> EvalEnsemble::undetected_counts(
    const SensorSet& candidates, const std::vector<std::size_t>& selected,
    const AvailabilityParams& avail) const {
  std::vector<double> u(lambdas_.size());
  for (std::size_t r = 0; r < lambdas_.size(); ++r) {
    u[r] = realized_undetected(lambdas_[r], omegas_[r], candidates, selected,
                               avail);
  }
  return u;
}

VoidEstimate void_probability_mc(const FieldSampler& lambda_sampler,
                                 const FieldSampler& omega_sampler,
                                 const SensorSet& candidates,
                                 const std::vector<std::size_t>& selected,
                                 const AvailabilityParams& avail,
                                 int realizations, std::uint64_t seed) {
  EvalEnsemble ensemble(lambda_sampler, omega_sampler, realizations, seed);
  return ensemble.evaluate(candidates, selected, avail);
}

Placement greedy_place(const ScalarField& intensity,
                       const DetectionMatrix& detection, std::size_t k) {
  if (detection.cell_count != intensity.values.size()) {
    throw std::invalid_argument("detection matrix cell count mismatch");
  }
  if (k > detection.sensor_count) {
    throw std::invalid_argument("budget exceeds candidate count");
  }
  std::vector<double> residual = cell_weights(intensity);
  std::vector<bool> used(detection.sensor_count, false);
  Placement placement;
  placement.budget = k;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = detection.sensor_count;
    double best_gain = -1.0;
    for (std::size_t i = 0; i < detection.sensor_count; ++i) {
      if (used[i]) continue;
      double gain = 0.0;
      const double* pt = detection.p_tilde.data() + detection.index(i, 0);
      for (std::size_t g = 0; g < detection.cell_count; ++g) {
        gain += residual[g] * pt[g];
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    used[best] = true;
    placement.selected.push_back(best);
    placement.gains.push_back(best_gain);
    const double* pt = detection.p_tilde.data() + detection.index(best, 0);
    for (std::size_t g = 0; g < detection.cell_count; ++g) {
      residual[g] *= 1.0 - pt[g];
    }
  }
  return placement;
}

Placement brute_force_place(const ScalarField& intensity,
                            const DetectionMatrix& detection, std::size_t k) {
  if (detection.cell_count != intensity.values.size()) {
    throw std::invalid_argument("detection matrix cell count mismatch");
  }
  const std::size_t n = detection.sensor_count;
  if (k > n) {
    throw std::invalid_argument("budget exceeds candidate count");
  }
  double subsets = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    subsets *= static_cast<double>(n - j) / static_cast<double>(j + 1);
  }
  if (subsets > 1e6) {
    throw std::invalid_argument("subset enumeration too large");
  }
  const std::vector<double> weights = cell_weights(intensity);
  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  std::vector<std::size_t> best_comb;
  double best_u = std::numeric_limits<double>::infinity();
  const auto evaluate = [&](const std::vector<std::size_t>& subset) {
    double total = 0.0;
    for (std::size_t g = 0; g < weights.size(); ++g) {
      double res = weights[g];
      for (std::size_t i : subset) {
        res *= 1.0 - detection.p_tilde[detection.index(i, g)];
      }
      total += res;
    }
    return total;
  };
  if (k == 0) {
    return Placement{{}, {}, 0};
  }
  while (true) {
    // strict improvement keeps the lexicographically first optimum
    const double u = evaluate(comb);
    if (u < best_u) {
      best_u = u;
      best_comb = comb;
    }
    // next combination in lexicographic order
    std::size_t j = k;
    while (j > 0 && comb[j - 1] == n - k + (j - 1)) --j;
    if (j == 0) break;
    ++comb[j - 1];
    for (std::size_t m = j; m < k; ++m) comb[m] = comb[m - 1] + 1;
  }
  Placement placement;
  placement.budget = k;
  placement.selected = best_comb;
  return placement;
}

Placement random_place(std::size_t candidate_count, std::size_t k,
                       std::uint64_t seed) {
  if (k > candidate_count) {
    throw std::invalid_argument("budget exceeds candidate count");
  }
  std::vector<std::size_t> indices(candidate_count);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  SplitRng rng(seed);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t pick = j + rng.uniform_below(candidate_count - j);
    std::swap(indices[j], indices[pick]);
  }
  Placement placement;
  placement.budget = k;
  placement.selected.assign(indices.begin(),
                            indices.begin() + static_cast<std::ptrdiff_t>(k));
  return placement;
}

double coverage_bound(double lambda_total, double u_bar_ref) {
  return std::exp(-lambda_total * kInvE - (1.0 - kInvE) * u_bar_ref);
}

double approx_bound(double u_bar_ref) {
  return (1.0 - kInvE) * std::exp(-u_bar_ref);
}

double dominance_threshold() {
  return -std::exp(1.0) * std::log(1.0 - kInvE);
}

double switching_threshold() {
  return -(std::exp(1.0) - 1.0) * std::log(1.0 - kInvE);
}

CertificateReport certify(const ScalarField& planning_intensity,
                          const DetectionMatrix& planning_matrix,
                          const SensorSet& candidates, std::size_t k,
                          const EvalEnsemble& ensemble,
                          const AvailabilityParams& avail) {
  const Placement placement = greedy_place(planning_intensity,
                                           planning_matrix, k);
  const VoidEstimate est =
      ensemble.evaluate(candidates, placement.selected, avail);
  CertificateReport report;
  report.budget = k;
  report.selected = placement.selected;
  report.lambda_total = est.mass_mean;
  report.u_bar = est.u_mean;
  report.coverage = est.mass_mean - est.u_mean;
  report.nu_mc = est.nu_mean;
  report.nu_std_error = est.nu_std_error;
  report.jensen_bound = std::exp(-est.u_mean);
  report.coverage_bound = voidplace::coverage_bound(est.mass_mean, est.u_mean);
  report.approx_bound = voidplace::approx_bound(est.u_mean);
  report.tau = dominance_threshold();
  report.tau_prime = switching_threshold();
  report.dominance_flag = report.coverage < report.tau;
  report.switching_flag = report.coverage < report.tau_prime;
  return report;
}

std::string certificate_to_json(const CertificateReport& report) {
  nlohmann::ordered_json j;
  j["budget"] = report.budget;
  j["selected"] = report.selected;
  j["lambda_total"] = report.lambda_total;
  j["u_bar"] = report.u_bar;
  j["coverage"] = report.coverage;
  j["nu_mc"] = report.nu_mc;
  j["nu_std_error"] = report.nu_std_error;
  j["jensen_bound"] = report.jensen_bound;
  j["coverage_bound"] = report.coverage_bound;
  j["approx_bound"] = report.approx_bound;
  j["tau"] = report.tau;
  j["tau_prime"] = report.tau_prime;
  j["dominance_flag"] = report.dominance_flag;
  j["switching_flag"] = report.switching_flag;
  return j.dump(2) + "\n";
}

void save_placement_csv(const Placement& placement,
                        const SensorSet& candidates,
                        const std::filesystem::path& path) {
  std::ostringstream out;
  out << "rank,candidate_index,location_km,marginal_gain\n";
  for (std::size_t r = 0; r < placement.selected.size(); ++r) {
    const std::size_t i = placement.selected[r];
    out << (r + 1) << ',' << i << ',' << dtos(candidates.at(i).location)
        << ',';
    if (r < placement.gains.size()) out << dtos(placement.gains[r]);
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

}  // namespace voidplace
