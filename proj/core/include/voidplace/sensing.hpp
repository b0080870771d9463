#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "voidplace/fields.hpp"
#include "voidplace/grid.hpp"

namespace voidplace {

/// A sensor at spatial location `location` (km) with sensitivity theta > 0.
struct Sensor {
  double location = 0.0;
  double theta = 1.0;
};

using SensorSet = std::vector<Sensor>;

/// False-alarm penalty parameters: availability alpha = 1 / (1 + beta * chi)
/// with confusability floor xi > 0.
struct AvailabilityParams {
  double beta = 5.0;
  double xi = 0.2;
};

/// Interference-shrunk footprint: ell = theta * exp(-omega).
double effective_length(double theta, double omega);

/// Raw detection probability exp(-(s - a)^2 / ell) for footprint ell > 0.
/// The squared distance is divided by ell itself, not its square.
double detect_prob(double s, double sensor_location, double ell);

/// Sensitivity-driven confusability zeta = (theta - 1)^2 + xi.
double zeta(double theta, double xi);

/// False-alarm rate chi = omega * zeta(theta).
double false_alarm_rate(double omega, double theta, double xi);

/// Fraction of time the sensor is usable: alpha = 1 / (1 + beta * chi).
double availability(double chi, double beta);

/// Per-sensor, per-cell detection layers on a grid, row-major by sensor:
/// entry (i, g) lives at i * cell_count + g. `p` is the raw probability,
/// `alpha` the availability at that cell's interference level, and
/// `p_tilde = alpha * p` the effective probability.
struct DetectionMatrix {
  std::size_t sensor_count = 0;
  std::size_t cell_count = 0;
  std::vector<double> p;
  std::vector<double> alpha;
  std::vector<double> p_tilde;

  [[nodiscard]] std::size_t index(std::size_t sensor, std::size_t cell) const {
    return sensor * cell_count + cell;
  }
};

/// Builds all three layers for `sensors` against an interference field.
/// Availability is evaluated at the target cell's omega. With
/// `with_availability` false, alpha is pinned to 1 and p_tilde equals p
/// (a planner that ignores false alarms). Throws std::invalid_argument on
/// theta <= 0, sensor locations outside the grid's spatial extent, or an
/// omega field on a different grid.
DetectionMatrix build_detection_matrix(const SpaceTimeGrid& grid,
                                       const SensorSet& sensors,
                                       const ScalarField& omega,
                                       const AvailabilityParams& avail,
                                       bool with_availability = true);

/// Expected detection layers when each cell's interference is marginally
/// omega = clamp(1 - exp(-beta_omega * z), 0, 1) with z ~ N(0, sigma^2):
/// entries are E[p], E[alpha], and E[alpha * p] under that law. The
/// negative-z half contributes its mass at omega = 0 in closed form; the
/// positive half is integrated by fixed Gauss-Legendre quadrature, so the
/// result is deterministic and free of sampling noise. Spatial correlation
/// never enters: each entry depends on one cell's marginal only.
DetectionMatrix expected_detection_matrix(const SpaceTimeGrid& grid,
                                          const SensorSet& sensors,
                                          double sigma,
                                          const SquashParams& squash_params,
                                          const AvailabilityParams& avail,
                                          bool with_availability = true);

/// Monte Carlo mean of the detection layers over environment draws: each
/// entry of p, alpha, and p_tilde is averaged across `draws` fields from
/// `omega`. The per-draw identity p_tilde = alpha * p does not survive
/// averaging; p_tilde here is E[alpha * p], the expected effective
/// detection a planner should score against when the environment is
/// random. Prefer expected_detection_matrix when the environment is the
/// squashed-Gaussian model; this general form serves arbitrary samplers.
/// Throws std::invalid_argument when draws < 1.
DetectionMatrix mc_mean_detection_matrix(const SpaceTimeGrid& grid,
                                         const SensorSet& sensors,
                                         const FieldSampler& omega,
                                         int draws, SplitRng& rng,
                                         const AvailabilityParams& avail,
                                         bool with_availability = true);

/// CSV export: header `sensor_index,cell_index,p,alpha,p_tilde`.
void save_detection_csv(const DetectionMatrix& matrix,
                        const std::filesystem::path& path);

}  // namespace voidplace
