#include "voidplace/grid.hpp"

namespace voidplace {

SpaceTimeGrid make_grid(double s_min, double s_max, double t_min, double t_max,
                        int n_s, int n_t) {
  if (!(s_max > s_min)) {
    throw std::invalid_argument("make_grid: require s_max > s_min");
  }
  if (!(t_max > t_min)) {
    throw std::invalid_argument("make_grid: require t_max > t_min");
  }
  if (n_s < 1 || n_t < 1) {
    throw std::invalid_argument("make_grid: bin counts must be >= 1");
  }
  return SpaceTimeGrid{s_min, s_max, t_min, t_max, n_s, n_t};
}

std::pair<double, double> SpaceTimeGrid::cell_center(std::size_t index) const {
  if (index >= size()) {
    throw std::out_of_range("SpaceTimeGrid::cell_center: index out of range");
  }
  const auto [i_s, i_t] = split_index(index);
  return {s_center(i_s), t_center(i_t)};
}

ScalarField::ScalarField(const SpaceTimeGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("ScalarField: value count does not match grid");
  }
}

ScalarField ScalarField::constant(const SpaceTimeGrid& g, double value) {
  return ScalarField(g, std::vector<double>(g.size(), value));
}

}  // namespace voidplace
