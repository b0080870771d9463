#include "voidplace/sensing.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "voidplace/io.hpp"

namespace voidplace {

namespace {

void validate_sensors(const SpaceTimeGrid& grid, const SensorSet& sensors) {
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    if (!(sensors[i].theta > 0.0)) {
      throw std::invalid_argument("sensor " + std::to_string(i) +
                                  ": theta must be positive");
    }
    if (!grid.contains_s(sensors[i].location)) {
      throw std::invalid_argument("sensor " + std::to_string(i) +
                                  ": location outside grid");
    }
  }
}

// 64-point Gauss-Legendre rule on [-1, 1] via Newton iteration on the
// Legendre recurrence; fully deterministic, built once
struct QuadRule {
  std::array<double, 64> x{};
  std::array<double, 64> w{};
};

const QuadRule& gauss_legendre_64() {
  static const QuadRule rule = [] {
    QuadRule r;
    constexpr int n = 64;
    constexpr double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double t = std::cos(pi * (i + 0.75) / (n + 0.5));
      double pn = 0.0;
      double pn1 = 0.0;
      for (int iter = 0; iter < 64; ++iter) {
        pn = 1.0;
        pn1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double pn2 = pn1;
          pn1 = pn;
          pn = ((2 * j + 1) * t * pn1 - j * pn2) / (j + 1);
        }
        const double deriv = n * (t * pn - pn1) / (t * t - 1.0);
        const double step = pn / deriv;
        t -= step;
        if (std::abs(step) < 1e-15) break;
      }
      pn = 1.0;
      pn1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double pn2 = pn1;
        pn1 = pn;
        pn = ((2 * j + 1) * t * pn1 - j * pn2) / (j + 1);
      }
      const double deriv = n * (t * pn - pn1) / (t * t - 1.0);
      r.x[i] = -t;
      r.x[n - 1 - i] = t;
      r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - t * t) * deriv * deriv);
    }
    return r;
  }();
  return rule;
}

}  // namespace

double effective_length(double theta, double omega) {
  return theta * std::exp(-omega);
}

double detect_prob(double s, double sensor_location, double ell) {
  const double d = s - sensor_location;
  return std::exp(-d * d / ell);
}

double zeta(double theta, double xi) {
  const double d = theta - 1.0;
  return d * d + xi;
}

double false_alarm_rate(double omega, double theta, double xi) {
  return omega * zeta(theta, xi);
}

double availability(double chi, double beta) {
  return 1.0 / (1.0 + beta * chi);
}

DetectionMatrix build_detection_matrix(const SpaceTimeGrid& grid,
                                       const SensorSet& sensors,
                                       const ScalarField& omega,
                                       const AvailabilityParams& avail,
                                       bool with_availability) {
  if (!(omega.grid == grid)) {
    throw std::invalid_argument("interference field grid mismatch");
  }
  validate_sensors(grid, sensors);
  DetectionMatrix matrix;
  matrix.sensor_count = sensors.size();
  matrix.cell_count = grid.size();
  const std::size_t total = matrix.sensor_count * matrix.cell_count;
  matrix.p.resize(total);
  matrix.alpha.resize(total);
  matrix.p_tilde.resize(total);
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const Sensor& sensor = sensors[i];
    for (std::size_t i_s = 0; i_s < grid.n_s; ++i_s) {
      const double s = grid.s_center(i_s);
      for (std::size_t i_t = 0; i_t < grid.n_t; ++i_t) {
        const std::size_t g = grid.flat_index(i_s, i_t);
        const std::size_t idx = matrix.index(i, g);
        const double w = omega.values[g];
        const double ell = effective_length(sensor.theta, w);
        const double p = detect_prob(s, sensor.location, ell);
        double a = 1.0;
        if (with_availability) {
          a = availability(false_alarm_rate(w, sensor.theta, avail.xi),
                           avail.beta);
        }
        matrix.p[idx] = p;
        matrix.alpha[idx] = a;
        matrix.p_tilde[idx] = a * p;
      }
    }
  }
  return matrix;
}

DetectionMatrix expected_detection_matrix(const SpaceTimeGrid& grid,
                                          const SensorSet& sensors,
                                          double sigma,
                                          const SquashParams& squash_params,
                                          const AvailabilityParams& avail,
                                          bool with_availability) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("environment sigma must be nonnegative");
  }
  validate_sensors(grid, sensors);

  // z <= 0 squashes to omega = 0, a point mass of exactly 1/2; the positive
  // half is integrated in standardized units out to 8 sigma, beyond which
  // the Gaussian mass is below 1e-15
  constexpr double kTail = 8.0;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  const QuadRule& rule = gauss_legendre_64();
  const std::size_t nodes = rule.x.size();
  std::vector<double> node_omega(nodes);
  std::vector<double> node_mass(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double u = 0.5 * kTail * (rule.x[k] + 1.0);
    const double z = sigma * u;
    node_omega[k] =
        std::min(1.0, 1.0 - std::exp(-squash_params.beta_omega * z));
    node_mass[k] =
        0.5 * kTail * rule.w[k] * kInvSqrt2Pi * std::exp(-0.5 * u * u);
  }

  DetectionMatrix matrix;
  matrix.sensor_count = sensors.size();
  matrix.cell_count = grid.size();
  const std::size_t total = matrix.sensor_count * matrix.cell_count;
  matrix.p.resize(total);
  matrix.alpha.resize(total);
  matrix.p_tilde.resize(total);

  std::vector<double> decay(nodes);  // exp(omega) / theta per node
  std::vector<double> node_alpha(nodes);
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const Sensor& sensor = sensors[i];
    double alpha_mean = 1.0;
    for (std::size_t k = 0; k < nodes; ++k) {
      decay[k] = std::exp(node_omega[k]) / sensor.theta;
      node_alpha[k] =
          with_availability
              ? availability(
                    false_alarm_rate(node_omega[k], sensor.theta, avail.xi),
                    avail.beta)
              : 1.0;
    }
    if (with_availability) {
      alpha_mean = 0.5;  // alpha(0) = 1 on the omega = 0 half
      for (std::size_t k = 0; k < nodes; ++k) {
        alpha_mean += node_mass[k] * node_alpha[k];
      }
    }
    for (std::size_t i_s = 0; i_s < static_cast<std::size_t>(grid.n_s);
         ++i_s) {
      const double d = grid.s_center(static_cast<int>(i_s)) - sensor.location;
      const double d2 = d * d;
      const double calm_p = std::exp(-d2 / sensor.theta);
      double p_mean = 0.5 * calm_p;
      double p_tilde_mean = 0.5 * calm_p;
      for (std::size_t k = 0; k < nodes; ++k) {
        const double p_k = std::exp(-d2 * decay[k]);
        p_mean += node_mass[k] * p_k;
        p_tilde_mean += node_mass[k] * node_alpha[k] * p_k;
      }
      for (std::size_t i_t = 0; i_t < static_cast<std::size_t>(grid.n_t);
           ++i_t) {
        const std::size_t idx = matrix.index(
            i, grid.flat_index(static_cast<int>(i_s), static_cast<int>(i_t)));
        matrix.p[idx] = p_mean;
        matrix.alpha[idx] = alpha_mean;
        matrix.p_tilde[idx] = with_availability ? p_tilde_mean : p_mean;
      }
    }
  }
  return matrix;
}

DetectionMatrix mc_mean_detection_matrix(const SpaceTimeGrid& grid,
                                         const SensorSet& sensors,
                                         const FieldSampler& omega,
                                         int draws, SplitRng& rng,
                                         const AvailabilityParams& avail,
                                         bool with_availability) {
  if (draws < 1) {
    throw std::invalid_argument("detection averaging needs draws >= 1");
  }
  DetectionMatrix mean =
      build_detection_matrix(grid, sensors, omega(rng), avail,
                             with_availability);
  for (int d = 1; d < draws; ++d) {
    const DetectionMatrix next =
        build_detection_matrix(grid, sensors, omega(rng), avail,
                               with_availability);
    for (std::size_t i = 0; i < mean.p.size(); ++i) {
      mean.p[i] += next.p[i];
      mean.alpha[i] += next.alpha[i];
      mean.p_tilde[i] += next.p_tilde[i];
    }
  }
  const double inv = 1.0 / draws;
  for (std::size_t i = 0; i < mean.p.size(); ++i) {
    mean.p[i] *= inv;
    mean.alpha[i] *= inv;
    mean.p_tilde[i] *= inv;
  }
  return mean;
}

void save_detection_csv(const DetectionMatrix& matrix,
                        const std::filesystem::path& path) {
  std::ostringstream out;
  out << "sensor_index,cell_index,p,alpha,p_tilde\n";
  for (std::size_t i = 0; i < matrix.sensor_count; ++i) {
    for (std::size_t g = 0; g < matrix.cell_count; ++g) {
      const std::size_t idx = matrix.index(i, g);
      out << i << ',' << g << ',' << dtos(matrix.p[idx]) << ','
          << dtos(matrix.alpha[idx]) << ',' << dtos(matrix.p_tilde[idx])
          << "\n";
    }
  }
  write_text_atomic(path, out.str());
}

}  // namespace voidplace
