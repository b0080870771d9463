#include "voidplace/fields.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "voidplace/io.hpp"

namespace voidplace {

namespace {

using Matrix = Eigen::MatrixXd;

// Lower Cholesky factor of the 1-d squared-exponential Gram matrix over the
// given coordinates, scaled by `variance`, with relative jitter 1e-9 on the
// diagonal. Row-major copy out so the header stays Eigen-free.
std::vector<double> chol_factor_1d(const std::vector<double>& coords,
                                   double ell, double variance) {
  const auto n = static_cast<Eigen::Index>(coords.size());
  Matrix k(n, n);
  const double inv = 1.0 / (2.0 * ell * ell);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = coords[static_cast<std::size_t>(i)] -
                       coords[static_cast<std::size_t>(j)];
      k(i, j) = variance * std::exp(-d * d * inv);
    }
  }
  k.diagonal().array() += 1e-9 * variance;
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("covariance factorization failed");
  }
  Matrix lower = llt.matrixL();
  std::vector<double> out(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out[static_cast<std::size_t>(i * n + j)] = lower(i, j);
    }
  }
  return out;
}

}  // namespace

double kernel_eval(const SeparableKernel& kernel, double s1, double t1,
                   double s2, double t2) {
  const double ds = s1 - s2;
  const double dt = t1 - t2;
  return kernel.sigma * kernel.sigma *
         std::exp(-ds * ds / (2.0 * kernel.ell_s * kernel.ell_s)) *
         std::exp(-dt * dt / (2.0 * kernel.ell_t * kernel.ell_t));
}

GpSampler::GpSampler(const SpaceTimeGrid& grid, const SeparableKernel& kernel)
    : grid_(grid) {
  if (kernel.sigma <= 0.0 || kernel.ell_s <= 0.0 || kernel.ell_t <= 0.0) {
    throw std::invalid_argument("kernel parameters must be positive");
  }
  std::vector<double> s_coords(grid.n_s);
  for (std::size_t i = 0; i < grid.n_s; ++i) s_coords[i] = grid.s_center(i);
  std::vector<double> t_coords(grid.n_t);
  for (std::size_t j = 0; j < grid.n_t; ++j) t_coords[j] = grid.t_center(j);
  chol_s_ = chol_factor_1d(s_coords, kernel.ell_s, kernel.sigma * kernel.sigma);
  chol_t_ = chol_factor_1d(t_coords, kernel.ell_t, 1.0);
}

ScalarField GpSampler::draw(SplitRng& rng, double mean) const {
  const auto n_s = static_cast<Eigen::Index>(grid_.n_s);
  const auto n_t = static_cast<Eigen::Index>(grid_.n_t);
  Matrix e(n_s, n_t);
  for (Eigen::Index i = 0; i < n_s; ++i) {
    for (Eigen::Index j = 0; j < n_t; ++j) {
      e(i, j) = rng.normal();
    }
  }
  Eigen::Map<const Matrix> ls(chol_s_.data(), n_s, n_s);
  Eigen::Map<const Matrix> lt(chol_t_.data(), n_t, n_t);
  // Row-major std::vector maps as the transpose of the stored factor, so the
  // stored lower triangles appear here as upper ones: ls.transpose() is the
  // true L_s and lt is already L_t^T.
  Matrix x = ls.transpose() * e * lt;
  std::vector<double> values(grid_.size());
  for (Eigen::Index i = 0; i < n_s; ++i) {
    for (Eigen::Index j = 0; j < n_t; ++j) {
      values[static_cast<std::size_t>(i * n_t + j)] = mean + x(i, j);
    }
  }
  return ScalarField(grid_, std::move(values));
}

ScalarField sample_gp(const SpaceTimeGrid& grid, const SeparableKernel& kernel,
                      double mean, std::uint64_t seed) {
  GpSampler sampler(grid, kernel);
  SplitRng rng(seed);
  return sampler.draw(rng, mean);
}

ScalarField squash(const ScalarField& z, const SquashParams& params) {
  std::vector<double> values(z.values.size());
  for (std::size_t g = 0; g < values.size(); ++g) {
    values[g] = std::clamp(1.0 - std::exp(-params.beta_omega * z.values[g]),
                           0.0, 1.0);
  }
  return ScalarField(z.grid, std::move(values));
}

ScalarField sample_lgcp_intensity(const SpaceTimeGrid& grid,
                                  const SeparableKernel& kernel,
                                  const ScalarField& log_mean,
                                  std::uint64_t seed) {
  if (!(log_mean.grid == grid)) {
    throw std::invalid_argument("log-mean field grid mismatch");
  }
  ScalarField field = sample_gp(grid, kernel, 0.0, seed);
  for (std::size_t g = 0; g < field.values.size(); ++g) {
    field.values[g] = std::exp(field.values[g] + log_mean.values[g]);
  }
  return field;
}

ScalarField sample_lgcp_intensity(const SpaceTimeGrid& grid,
                                  const SeparableKernel& kernel,
                                  double log_mean, std::uint64_t seed) {
  return sample_lgcp_intensity(grid, kernel,
                               ScalarField::constant(grid, log_mean), seed);
}

double total_mass(const ScalarField& intensity) {
  const double measure = intensity.grid.cell_measure();
  double sum = 0.0;
  for (double v : intensity.values) sum += v;
  return sum * measure;
}

void save_field_csv(const ScalarField& field, const std::string& value_name,
                    const std::filesystem::path& path) {
  std::ostringstream out;
  out << "s_index,t_index," << value_name << "\n";
  for (std::size_t i = 0; i < field.grid.n_s; ++i) {
    for (std::size_t j = 0; j < field.grid.n_t; ++j) {
      out << i << ',' << j << ',' << dtos(field.at(i, j)) << "\n";
    }
  }
  write_text_atomic(path, out.str());
}

void save_intensity_csv(const ScalarField& intensity,
                        const std::filesystem::path& path) {
  save_field_csv(intensity, "lambda", path);
}

ScalarField load_intensity_csv(const SpaceTimeGrid& grid,
                               const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open intensity file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("empty intensity file: " + path.string());
  }
  std::vector<double> values(grid.size(),
                             std::numeric_limits<double>::quiet_NaN());
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw DataError("intensity row " + std::to_string(line_no) +
                      ": expected 3 columns");
    }
    std::size_t i_s = 0;
    std::size_t i_t = 0;
    double lambda = 0.0;
    try {
      i_s = static_cast<std::size_t>(std::stoull(fields[0]));
      i_t = static_cast<std::size_t>(std::stoull(fields[1]));
      lambda = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw DataError("intensity row " + std::to_string(line_no) +
                      ": unparseable value");
    }
    if (i_s >= grid.n_s || i_t >= grid.n_t) {
      throw DataError("intensity row " + std::to_string(line_no) +
                      ": cell index out of range");
    }
    if (!std::isfinite(lambda) || lambda < 0.0) {
      throw DataError("intensity row " + std::to_string(line_no) +
                      ": lambda must be finite and nonnegative");
    }
    values[grid.flat_index(i_s, i_t)] = lambda;
    ++rows;
  }
  if (rows != grid.size()) {
    throw DataError("intensity file has " + std::to_string(rows) +
                    " rows, grid needs " + std::to_string(grid.size()));
  }
  for (double v : values) {
    if (std::isnan(v)) {
      throw DataError("intensity file leaves cells unset (duplicate rows)");
    }
  }
  return ScalarField(grid, std::move(values));
}

FieldSampler fixed_sampler(ScalarField field) {
  return [field = std::move(field)](SplitRng&) { return field; };
}

FieldSampler omega_sampler(const SpaceTimeGrid& grid,
                           const SeparableKernel& kernel,
                           const SquashParams& squash_params) {
  auto sampler = std::make_shared<GpSampler>(grid, kernel);
  return [sampler, squash_params](SplitRng& rng) {
    return squash(sampler->draw(rng), squash_params);
  };
}

FieldSampler lgcp_sampler(const SpaceTimeGrid& grid,
                          const SeparableKernel& kernel, double log_mean) {
  auto sampler = std::make_shared<GpSampler>(grid, kernel);
  return [sampler, log_mean](SplitRng& rng) {
    ScalarField field = sampler->draw(rng, log_mean);
    for (double& v : field.values) v = std::exp(v);
    return field;
  };
}

FieldSampler perturbation_sampler(ScalarField base,
                                  const SeparableKernel& kernel) {
  auto sampler = std::make_shared<GpSampler>(base.grid, kernel);
  const double half_var = 0.5 * kernel.sigma * kernel.sigma;
  return [sampler, base = std::move(base), half_var](SplitRng& rng) {
    ScalarField field = sampler->draw(rng);
    for (std::size_t g = 0; g < field.values.size(); ++g) {
      field.values[g] = base.values[g] * std::exp(field.values[g] - half_var);
    }
    return field;
  };
}

ScalarField mean_field(const FieldSampler& sampler, int draws, SplitRng rng) {
  if (draws < 1) {
    throw std::invalid_argument("mean_field needs at least one draw");
  }
  ScalarField first = sampler(rng);
  std::vector<double> acc = first.values;
  for (int d = 1; d < draws; ++d) {
    ScalarField next = sampler(rng);
    for (std::size_t g = 0; g < acc.size(); ++g) acc[g] += next.values[g];
  }
  const double inv = 1.0 / static_cast<double>(draws);
  for (double& v : acc) v *= inv;
  return ScalarField(first.grid, std::move(acc));
}

}  // namespace voidplace
