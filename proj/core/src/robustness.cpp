#include "voidplace/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "voidplace/fields.hpp"
#include "voidplace/io.hpp"
#include "voidplace/rng.hpp"

namespace voidplace {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

DetectionMatrix estimate_p_hat(const DetectionMatrix& matrix, int n,
                               std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("sample count must be positive");
  }
  DetectionMatrix estimated = matrix;
  const SplitRng root(seed);
  for (std::size_t i = 0; i < matrix.sensor_count; ++i) {
    const SplitRng row = root.split(i);
    for (std::size_t g = 0; g < matrix.cell_count; ++g) {
      SplitRng stream = row.split(g);
      const double p = matrix.p_tilde[matrix.index(i, g)];
      int hits = 0;
      for (int d = 0; d < n; ++d) {
        if (stream.bernoulli(p)) ++hits;
      }
      estimated.p_tilde[matrix.index(i, g)] =
          static_cast<double>(hits) / static_cast<double>(n);
    }
  }
  return estimated;
}

double hoeffding_eps(int n, std::size_t m, std::size_t cells, double delta) {
  if (n < 1 || m < 1 || cells < 1 || delta <= 0.0 || delta >= 1.0) {
    throw std::invalid_argument("invalid concentration parameters");
  }
  const double pairs = static_cast<double>(m) * static_cast<double>(cells);
  return std::sqrt(std::log(2.0 * pairs / delta) /
                   (2.0 * static_cast<double>(n)));
}

double concentration_trial(const DetectionMatrix& matrix, int n, double delta,
                           int trials, std::uint64_t seed) {
  if (trials < 1) {
    throw std::invalid_argument("trial count must be positive");
  }
  const double eps =
      hoeffding_eps(n, matrix.sensor_count, matrix.cell_count, delta);
  const SplitRng root(seed);
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    SplitRng trial_rng = root.split(static_cast<std::uint64_t>(t));
    const DetectionMatrix estimated =
        estimate_p_hat(matrix, n, trial_rng.next_u64());
    if (max_abs_diff(estimated.p_tilde, matrix.p_tilde) > eps) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(trials);
}

double c_k(const ScalarField& intensity, std::size_t k) {
  if (k < 1) {
    throw std::invalid_argument("budget must be positive");
  }
  return static_cast<double>(k) * total_mass(intensity);
}

PropagationReport propagation_check(const ScalarField& intensity,
                                    const DetectionMatrix& true_matrix,
                                    const DetectionMatrix& estimated_matrix,
                                    const std::vector<std::size_t>& selected) {
  if (true_matrix.sensor_count != estimated_matrix.sensor_count ||
      true_matrix.cell_count != estimated_matrix.cell_count) {
    throw std::invalid_argument("matrix shape mismatch");
  }
  PropagationReport report;
  report.u_true = expected_undetected(intensity, true_matrix, selected);
  report.u_hat = expected_undetected(intensity, estimated_matrix, selected);
  report.deviation = std::abs(report.u_hat - report.u_true);
  report.max_error =
      max_abs_diff(estimated_matrix.p_tilde, true_matrix.p_tilde);
  report.c_k = selected.empty() ? 0.0 : c_k(intensity, selected.size());
  report.lipschitz_bound = report.c_k * report.max_error;
  // tiny relative cushion so exact-equality cases are not lost to rounding
  report.within_bound =
      report.deviation <=
      report.lipschitz_bound * (1.0 + 1e-12) + 1e-15;
  return report;
}

double stability_bound(double lambda_total, double u_star_ref, double c_k,
                       double eps_n) {
  return std::exp(-lambda_total * kInvE - (1.0 - kInvE) * u_star_ref -
                  (2.0 - kInvE) * c_k * eps_n);
}

std::vector<StabilityRow> stability_experiment(const ScalarField& intensity,
                                               const ScalarField& omega,
                                               const SensorSet& candidates,
                                               const AvailabilityParams& avail,
                                               const RobustnessConfig& config,
                                               std::uint64_t seed) {
  if (config.n_list.empty()) {
    throw std::invalid_argument("sample size list must be nonempty");
  }
  const DetectionMatrix truth =
      build_detection_matrix(intensity.grid, candidates, omega, avail);
  const Placement reference = greedy_place(intensity, truth, config.k);
  const double u_star_ref =
      expected_undetected(intensity, truth, reference.selected);
  const double lambda_total = total_mass(intensity);
  const double sensitivity = c_k(intensity, config.k);
  const SplitRng root(seed);
  std::vector<StabilityRow> rows;
  rows.reserve(config.n_list.size() *
               static_cast<std::size_t>(config.trials));
  for (std::size_t idx = 0; idx < config.n_list.size(); ++idx) {
    const int n = config.n_list[idx];
    const double eps =
        hoeffding_eps(n, truth.sensor_count, truth.cell_count, config.delta);
    const double bound =
        stability_bound(lambda_total, u_star_ref, sensitivity, eps);
    const SplitRng branch = root.split(idx);
    for (int trial = 0; trial < config.trials; ++trial) {
      SplitRng trial_rng = branch.split(static_cast<std::uint64_t>(trial));
      const DetectionMatrix estimated =
          estimate_p_hat(truth, n, trial_rng.next_u64());
      const Placement fitted = greedy_place(intensity, estimated, config.k);
      const double u_hat =
          expected_undetected(intensity, estimated, fitted.selected);
      const double u_true =
          expected_undetected(intensity, truth, fitted.selected);
      StabilityRow row;
      row.n = n;
      row.trial = trial;
      row.eps_n = eps;
      row.max_error = max_abs_diff(estimated.p_tilde, truth.p_tilde);
      row.u_deviation = std::abs(u_hat - u_true);
      row.c_k_eps = sensitivity * eps;
      row.realized_void = std::exp(-u_true);
      row.stability_bound = bound;
      row.event_holds = row.max_error <= eps;
      rows.push_back(row);
    }
  }
  return rows;
}

void save_stability_csv(const std::vector<StabilityRow>& rows,
                        const std::filesystem::path& path) {
  std::ostringstream out;
  out << "N,eps_N,max_error,U_deviation,C_K_eps,realized_void,"
         "stability_bound,trial\n";
  for (const StabilityRow& row : rows) {
    out << row.n << ',' << dtos(row.eps_n) << ',' << dtos(row.max_error)
        << ',' << dtos(row.u_deviation) << ',' << dtos(row.c_k_eps) << ','
        << dtos(row.realized_void) << ',' << dtos(row.stability_bound) << ','
        << row.trial << "\n";
  }
  write_text_atomic(path, out.str());
}

}  // namespace voidplace
