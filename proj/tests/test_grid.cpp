#include <stdexcept>

#include "doctest.h"
#include "voidplace/grid.hpp"

using namespace voidplace;

TEST_CASE("grid geometry at the default resolution") {
  const SpaceTimeGrid g = make_grid(0.0, 10.0, 0.0, 24.0, 200, 48);
  CHECK(g.ds() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(g.dt() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.cell_measure() == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(g.size() == 9600);
}

TEST_CASE("flat index is space-major and inverts") {
  const SpaceTimeGrid g = make_grid(0.0, 1.0, 0.0, 1.0, 7, 5);
  CHECK(g.flat_index(0, 0) == 0);
  CHECK(g.flat_index(0, 4) == 4);
  CHECK(g.flat_index(1, 0) == 5);
  CHECK(g.flat_index(3, 2) == 17);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto [i_s, i_t] = g.split_index(idx);
    CHECK(g.flat_index(i_s, i_t) == idx);
    CHECK(i_s >= 0);
    CHECK(i_s < 7);
    CHECK(i_t >= 0);
    CHECK(i_t < 5);
  }
}

TEST_CASE("cell centers are midpoints") {
  const SpaceTimeGrid g = make_grid(0.0, 10.0, 0.0, 24.0, 200, 48);
  CHECK(g.s_center(0) == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(g.s_center(199) == doctest::Approx(9.975).epsilon(1e-12));
  CHECK(g.t_center(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(g.t_center(47) == doctest::Approx(23.75).epsilon(1e-12));

  const auto [s, t] = g.cell_center(g.flat_index(10, 3));
  CHECK(s == doctest::Approx(g.s_center(10)));
  CHECK(t == doctest::Approx(g.t_center(3)));
  CHECK_THROWS_AS((void)g.cell_center(g.size()), std::out_of_range);
}

TEST_CASE("grid validation rejects bad shapes") {
  CHECK_THROWS_AS(make_grid(1.0, 0.0, 0.0, 1.0, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 2.0, 2.0, 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 0.0, 1.0, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 0.0, 1.0, 4, -1), std::invalid_argument);
}

TEST_CASE("spatial containment includes both boundaries") {
  const SpaceTimeGrid g = make_grid(2.0, 5.0, 0.0, 1.0, 3, 1);
  CHECK(g.contains_s(2.0));
  CHECK(g.contains_s(5.0));
  CHECK(g.contains_s(3.7));
  CHECK_FALSE(g.contains_s(1.999999));
  CHECK_FALSE(g.contains_s(5.000001));
}

TEST_CASE("scalar field storage matches grid layout") {
  const SpaceTimeGrid g = make_grid(0.0, 1.0, 0.0, 1.0, 3, 2);
  ScalarField f = ScalarField::constant(g, 1.5);
  CHECK(f.size() == 6);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f[i] == 1.5);
  }
  f.at(2, 1) = -4.0;
  CHECK(f[g.flat_index(2, 1)] == -4.0);
  CHECK(f.at(2, 1) == -4.0);

  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(5, 0.0)),
                  std::invalid_argument);
}
