#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace voidplace {

/// Uniform discretization of the 1-D space x time window into n_s x n_t
/// cells. Cell (i_s, i_t) is flattened space-major: index = i_s * n_t + i_t.
/// Immutable after construction; all integrals downstream are midpoint sums
/// over cell centers weighted by the (constant) cell measure.
struct SpaceTimeGrid {
  double s_min = 0.0;
  double s_max = 1.0;
  double t_min = 0.0;
  double t_max = 1.0;
  int n_s = 1;
  int n_t = 1;

  [[nodiscard]] double ds() const { return (s_max - s_min) / n_s; }
  [[nodiscard]] double dt() const { return (t_max - t_min) / n_t; }

  /// |g| = ds * dt, identical for every cell.
  [[nodiscard]] double cell_measure() const { return ds() * dt(); }

  /// Total cell count L.
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(n_s) * static_cast<std::size_t>(n_t);
  }

  [[nodiscard]] std::size_t flat_index(int i_s, int i_t) const {
    return static_cast<std::size_t>(i_s) * n_t + i_t;
  }

  [[nodiscard]] std::pair<int, int> split_index(std::size_t index) const {
    return {static_cast<int>(index / n_t), static_cast<int>(index % n_t)};
  }

  [[nodiscard]] double s_center(int i_s) const {
    return s_min + (i_s + 0.5) * ds();
  }
  [[nodiscard]] double t_center(int i_t) const {
    return t_min + (i_t + 0.5) * dt();
  }

  /// Midpoint of the cell holding `index`; inverse of flat_index.
  [[nodiscard]] std::pair<double, double> cell_center(std::size_t index) const;

  [[nodiscard]] bool contains_s(double s) const {
    return s >= s_min && s <= s_max;
  }

  friend bool operator==(const SpaceTimeGrid&, const SpaceTimeGrid&) = default;
};

/// Validates bounds and counts; throws std::invalid_argument on inverted
/// bounds or non-positive bin counts.
SpaceTimeGrid make_grid(double s_min, double s_max, double t_min, double t_max,
                        int n_s, int n_t);

/// One real value per grid cell, stored space-major (values[i_s * n_t + i_t]).
struct ScalarField {
  SpaceTimeGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(const SpaceTimeGrid& g, std::vector<double> v);

  static ScalarField constant(const SpaceTimeGrid& g, double value);

  [[nodiscard]] double at(int i_s, int i_t) const {
    return values[grid.flat_index(i_s, i_t)];
  }
  double& at(int i_s, int i_t) { return values[grid.flat_index(i_s, i_t)]; }

  [[nodiscard]] double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  [[nodiscard]] std::size_t size() const { return values.size(); }
};

}  // namespace voidplace
