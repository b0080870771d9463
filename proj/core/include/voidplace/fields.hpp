#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "voidplace/grid.hpp"
#include "voidplace/rng.hpp"

namespace voidplace {

/// Separable squared-exponential covariance: sigma^2 * exp(-d_s^2 / 2 ell_s^2)
/// * exp(-d_t^2 / 2 ell_t^2).
struct SeparableKernel {
  double sigma = 0.8;   ///< field standard deviation
  double ell_s = 0.5;   ///< spatial length scale (km)
  double ell_t = 1.0;   ///< temporal length scale (h)
};

/// Bounded squashing of the latent field: omega = clamp(1 - exp(-beta * z), 0, 1).
struct SquashParams {
  double beta_omega = 1.5;
};

double kernel_eval(const SeparableKernel& kernel, double s1, double t1,
                   double s2, double t2);

/// Draws stationary GP fields on the grid's cell centers.
///
/// The separable kernel factors the L x L covariance into a spatial n_s x n_s
/// block (which carries sigma^2) and a unit-variance temporal n_t x n_t block.
/// Both are Cholesky-factored once at construction; a draw is then
/// chol_s * E * chol_t^T for an n_s x n_t matrix E of iid standard normals,
/// consumed from the stream row by row (space-major). The full covariance is
/// never materialized.
///
/// A small diagonal jitter (1e-9 relative to each factor's variance scale) is
/// added before factorization; squared-exponential Gram matrices at fine
/// spacing are numerically near-singular without it. Factorization failure
/// throws std::runtime_error.
class GpSampler {
 public:
  GpSampler(const SpaceTimeGrid& grid, const SeparableKernel& kernel);

  /// One field draw: mean + correlated zero-mean sample. Deterministic in the
  /// stream state; consumes exactly n_s * n_t normals.
  [[nodiscard]] ScalarField draw(SplitRng& rng, double mean = 0.0) const;

  [[nodiscard]] const SpaceTimeGrid& grid() const { return grid_; }

 private:
  SpaceTimeGrid grid_;
  std::vector<double> chol_s_;  // n_s x n_s lower factor, row-major
  std::vector<double> chol_t_;  // n_t x n_t lower factor, row-major
};

/// One GP draw with constant mean; deterministic in (grid, kernel, mean, seed).
ScalarField sample_gp(const SpaceTimeGrid& grid, const SeparableKernel& kernel,
                      double mean, std::uint64_t seed);

/// omega = clamp(1 - exp(-beta * z), 0, 1) per cell. The clamp keeps the
/// output in [0, 1] for negative latent values.
ScalarField squash(const ScalarField& z, const SquashParams& params);

/// lambda = exp(gp_draw + log_mean) per cell; strictly positive.
ScalarField sample_lgcp_intensity(const SpaceTimeGrid& grid,
                                  const SeparableKernel& kernel,
                                  const ScalarField& log_mean,
                                  std::uint64_t seed);
ScalarField sample_lgcp_intensity(const SpaceTimeGrid& grid,
                                  const SeparableKernel& kernel,
                                  double log_mean, std::uint64_t seed);

/// Midpoint quadrature of the intensity integral: sum_g lambda_g * |g|.
double total_mass(const ScalarField& intensity);

/// Intensity CSV: header `s_index,t_index,lambda`, one row per cell.
void save_intensity_csv(const ScalarField& intensity,
                        const std::filesystem::path& path);

/// Loads an intensity CSV onto `grid`; rejects non-finite or negative values,
/// wrong cell counts, and out-of-range indices (DataError).
ScalarField load_intensity_csv(const SpaceTimeGrid& grid,
                               const std::filesystem::path& path);

/// Scalar field CSV with a caller-named value column (used for z / omega /
/// margin exports that share the intensity layout).
void save_field_csv(const ScalarField& field, const std::string& value_name,
                    const std::filesystem::path& path);

/// A stochastic field source: one draw per call from the supplied stream.
/// Deterministic samplers simply ignore the stream.
using FieldSampler = std::function<ScalarField(SplitRng&)>;

/// Sampler that always returns `field`.
FieldSampler fixed_sampler(ScalarField field);

/// Environment sampler: GP draw squashed to [0, 1].
FieldSampler omega_sampler(const SpaceTimeGrid& grid,
                           const SeparableKernel& kernel,
                           const SquashParams& squash_params);

/// LGCP intensity sampler around a constant log-mean.
FieldSampler lgcp_sampler(const SpaceTimeGrid& grid,
                          const SeparableKernel& kernel, double log_mean);

/// Mean-corrected log-Gaussian perturbations of a base intensity:
/// base * exp(G - sigma^2 / 2), so each draw has expectation `base` per cell.
FieldSampler perturbation_sampler(ScalarField base,
                                  const SeparableKernel& kernel);

/// Average of `draws` sampler outputs; used for planning-time expected fields.
ScalarField mean_field(const FieldSampler& sampler, int draws, SplitRng rng);

}  // namespace voidplace
