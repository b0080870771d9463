#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "test_util.hpp"
#include "voidplace/fields.hpp"
#include "voidplace/io.hpp"
#include "voidplace/sensing.hpp"

using namespace voidplace;

TEST_CASE("effective length shrinks exponentially with interference") {
  CHECK(effective_length(1.2, 0.0) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(effective_length(1.2, 0.3) ==
        doctest::Approx(0.888981864818061439).epsilon(1e-12));
  CHECK(effective_length(2.0, 1.0) ==
        doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(effective_length(1.0, 0.5) < 1.0);
}

TEST_CASE("detection divides squared distance by the footprint itself") {
  CHECK(detect_prob(3.0, 3.0, 1.7) == doctest::Approx(1.0).epsilon(1e-12));
  // d^2 = 4, ell = 2: exp(-4/2), not exp(-4/4)
  CHECK(detect_prob(5.0, 3.0, 2.0) ==
        doctest::Approx(0.135335283236612692).epsilon(1e-12));
  CHECK(detect_prob(5.0, 3.0, 2.0) != doctest::Approx(std::exp(-1.0)));
  // symmetric in the offset
  CHECK(detect_prob(1.0, 3.0, 2.0) ==
        doctest::Approx(detect_prob(5.0, 3.0, 2.0)).epsilon(1e-12));
}

TEST_CASE("confusability is minimized at unit sensitivity") {
  CHECK(zeta(1.0, 0.2) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(zeta(1.2, 0.2) == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(zeta(0.8, 0.2) == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(zeta(1.0, 0.2) <= zeta(1.001, 0.2));
  CHECK(zeta(1.0, 0.2) <= zeta(0.999, 0.2));
}

TEST_CASE("false alarm rate vanishes in a clean environment") {
  CHECK(false_alarm_rate(0.0, 1.7, 0.2) == doctest::Approx(0.0));
  CHECK(false_alarm_rate(0.5, 1.2, 0.2) ==
        doctest::Approx(0.12).epsilon(1e-12));
}

TEST_CASE("availability decays from one as alarms accumulate") {
  CHECK(availability(0.0, 5.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(availability(0.12, 5.0) == doctest::Approx(0.625).epsilon(1e-12));
  double prev = 1.0;
  for (double chi = 0.1; chi < 2.0; chi += 0.1) {
    const double a = availability(chi, 5.0);
    CHECK(a < prev);
    CHECK(a > 0.0);
    prev = a;
  }
}

TEST_CASE("detection matrix stacks the three layers consistently") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 4, 2);
  const ScalarField omega = ScalarField::constant(grid, 0.5);
  const SensorSet sensors = {{5.0, 1.2}, {2.0, 1.0}};
  const AvailabilityParams avail{5.0, 0.2};

  const DetectionMatrix m = build_detection_matrix(grid, sensors, omega, avail);
  REQUIRE(m.sensor_count == 2);
  REQUIRE(m.cell_count == grid.size());
  for (std::size_t i = 0; i < m.sensor_count; ++i) {
    for (std::size_t g = 0; g < m.cell_count; ++g) {
      const std::size_t e = m.index(i, g);
      CHECK(m.p_tilde[e] == doctest::Approx(m.alpha[e] * m.p[e]).epsilon(1e-12));
      CHECK(m.p[e] > 0.0);
      CHECK(m.p[e] <= 1.0);
      CHECK(m.alpha[e] > 0.0);
      CHECK(m.alpha[e] <= 1.0);
    }
  }

  // frozen entry: sensor 0 against the cell at s = 6.25
  const std::size_t cell = grid.flat_index(2, 0);
  const std::size_t e = m.index(0, cell);
  CHECK(m.p[e] == doctest::Approx(0.11686071915456906).epsilon(1e-12));
  CHECK(m.alpha[e] == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(m.p_tilde[e] == doctest::Approx(0.0730379494716056626).epsilon(1e-12));
}

TEST_CASE("availability can be switched off for planning baselines") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 4, 2);
  const ScalarField omega = ScalarField::constant(grid, 0.8);
  const SensorSet sensors = {{5.0, 1.2}};
  const AvailabilityParams avail{5.0, 0.2};

  const DetectionMatrix with = build_detection_matrix(grid, sensors, omega,
                                                      avail, true);
  const DetectionMatrix without = build_detection_matrix(grid, sensors, omega,
                                                         avail, false);
  for (std::size_t g = 0; g < with.cell_count; ++g) {
    CHECK(without.alpha[g] == 1.0);
    CHECK(without.p_tilde[g] == without.p[g]);
    CHECK(without.p[g] == with.p[g]);
    CHECK(with.p_tilde[g] < without.p_tilde[g]);
  }
}

TEST_CASE("detection matrix rejects inconsistent inputs") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 4, 2);
  const SpaceTimeGrid other = make_grid(0.0, 10.0, 0.0, 24.0, 5, 2);
  const ScalarField omega = ScalarField::constant(grid, 0.5);
  const ScalarField omega_other = ScalarField::constant(other, 0.5);
  const AvailabilityParams avail{5.0, 0.2};

  CHECK_THROWS_AS(build_detection_matrix(grid, {{5.0, 0.0}}, omega, avail),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_detection_matrix(grid, {{5.0, -1.0}}, omega, avail),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_detection_matrix(grid, {{11.0, 1.2}}, omega, avail),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      build_detection_matrix(grid, {{5.0, 1.2}}, omega_other, avail),
      std::invalid_argument);
}

TEST_CASE("detection csv lists every sensor-cell pair") {
  TempDir dir("sensing");
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 3, 2);
  const ScalarField omega = ScalarField::constant(grid, 0.2);
  const DetectionMatrix m = build_detection_matrix(
      grid, {{2.0, 1.2}, {8.0, 1.2}}, omega, AvailabilityParams{});
  const auto path = dir.file("detection.csv");
  save_detection_csv(m, path);
  const std::string text = read_file(path);
  CHECK(text.substr(0, text.find('\n')) ==
        "sensor_index,cell_index,p,alpha,p_tilde");
  CHECK(count_lines(text) == m.sensor_count * m.cell_count + 1);
}

TEST_CASE("detection averaging matches the two-field closed form") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 5, 2);
  const AvailabilityParams avail{5.0, 0.2};
  const SensorSet sensors = {{2.5, 1.2}, {7.5, 0.9}};
  const ScalarField calm = ScalarField::constant(grid, 0.0);
  const ScalarField rough = ScalarField::constant(grid, 1.0);

  // alternate deterministically between the two environments
  int calls = 0;
  const FieldSampler flip = [&](SplitRng&) {
    return (calls++ % 2 == 0) ? calm : rough;
  };
  SplitRng rng(1);
  const DetectionMatrix mean =
      mc_mean_detection_matrix(grid, sensors, flip, 4, rng, avail);

  const DetectionMatrix at_calm =
      build_detection_matrix(grid, sensors, calm, avail);
  const DetectionMatrix at_rough =
      build_detection_matrix(grid, sensors, rough, avail);
  for (std::size_t i = 0; i < mean.p.size(); ++i) {
    CHECK(mean.p[i] ==
          doctest::Approx(0.5 * (at_calm.p[i] + at_rough.p[i])).epsilon(1e-12));
    CHECK(mean.p_tilde[i] ==
          doctest::Approx(0.5 * (at_calm.p_tilde[i] + at_rough.p_tilde[i]))
              .epsilon(1e-12));
    // alpha and p fall together as omega rises, so the averaged effective
    // layer sits above the product of the averages
    CHECK(mean.p_tilde[i] >= mean.alpha[i] * mean.p[i] - 1e-12);
  }
}

TEST_CASE("detection averaging is deterministic and degenerate-safe") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 6, 2);
  const AvailabilityParams avail{5.0, 0.2};
  const SensorSet sensors = {{5.0, 1.2}};
  const SeparableKernel kernel{0.8, 0.5, 1.0};
  const FieldSampler env = omega_sampler(grid, kernel, SquashParams{});

  SplitRng a(42);
  SplitRng b(42);
  const DetectionMatrix first =
      mc_mean_detection_matrix(grid, sensors, env, 8, a, avail);
  const DetectionMatrix second =
      mc_mean_detection_matrix(grid, sensors, env, 8, b, avail);
  CHECK(first.p_tilde == second.p_tilde);

  // a single draw reduces to the plain matrix at that draw
  SplitRng c(42);
  SplitRng d(42);
  const DetectionMatrix one =
      mc_mean_detection_matrix(grid, sensors, env, 1, c, avail);
  const DetectionMatrix direct =
      build_detection_matrix(grid, sensors, env(d), avail);
  CHECK(one.p_tilde == direct.p_tilde);

  // a fixed sampler collapses averaging entirely
  const ScalarField frozen = ScalarField::constant(grid, 0.3);
  SplitRng e(7);
  const DetectionMatrix fixed = mc_mean_detection_matrix(
      grid, sensors, fixed_sampler(frozen), 5, e, avail, false);
  const DetectionMatrix plain =
      build_detection_matrix(grid, sensors, frozen, avail, false);
  for (std::size_t i = 0; i < plain.p_tilde.size(); ++i) {
    CHECK(fixed.p_tilde[i] ==
          doctest::Approx(plain.p_tilde[i]).epsilon(1e-14));
  }
  for (double a_val : fixed.alpha) CHECK(a_val == 1.0);

  SplitRng f(9);
  CHECK_THROWS_AS(
      (void)mc_mean_detection_matrix(grid, sensors, env, 0, f, avail),
      std::invalid_argument);
}

TEST_CASE("expected detection matches a large Monte Carlo average") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 1.0, 12, 1);
  const AvailabilityParams avail{5.0, 0.2};
  const SquashParams squash_params{1.5};
  const SeparableKernel kernel{0.8, 0.5, 1.0};
  const SensorSet sensors = {{3.75, 1.2}};

  const DetectionMatrix exact = expected_detection_matrix(
      grid, sensors, kernel.sigma, squash_params, avail);
  SplitRng rng(321);
  const DetectionMatrix sampled = mc_mean_detection_matrix(
      grid, sensors, omega_sampler(grid, kernel, squash_params), 60000, rng,
      avail);
  for (std::size_t i = 0; i < exact.p.size(); ++i) {
    // entries live in [0, 1]; 60000 draws put the MC error well under 0.01
    CHECK(std::abs(exact.p[i] - sampled.p[i]) < 0.01);
    CHECK(std::abs(exact.alpha[i] - sampled.alpha[i]) < 0.01);
    CHECK(std::abs(exact.p_tilde[i] - sampled.p_tilde[i]) < 0.01);
  }
}

TEST_CASE("expected detection degenerates to the calm matrix as sigma -> 0") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 8, 3);
  const AvailabilityParams avail{5.0, 0.2};
  const SensorSet sensors = {{2.5, 1.2}, {8.0, 0.9}};

  const DetectionMatrix tiny = expected_detection_matrix(
      grid, sensors, 1e-12, SquashParams{1.5}, avail);
  const DetectionMatrix calm = build_detection_matrix(
      grid, sensors, ScalarField::constant(grid, 0.0), avail);
  for (std::size_t i = 0; i < tiny.p.size(); ++i) {
    CHECK(tiny.p[i] == doctest::Approx(calm.p[i]).epsilon(1e-9));
    CHECK(tiny.alpha[i] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tiny.p_tilde[i] == doctest::Approx(calm.p_tilde[i]).epsilon(1e-9));
  }
}

TEST_CASE("expected detection is dominated by the calm environment") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 9, 2);
  const AvailabilityParams avail{5.0, 0.2};
  const SensorSet sensors = {{5.0, 1.2}};
  const DetectionMatrix mean = expected_detection_matrix(
      grid, sensors, 0.8, SquashParams{1.5}, avail);
  const DetectionMatrix calm = build_detection_matrix(
      grid, sensors, ScalarField::constant(grid, 0.0), avail);

  // the sensor sits on a cell center, so one column has distance zero and
  // keeps p = 1 under every environment; total quadrature mass is 1
  bool saw_unit = false;
  for (std::size_t g = 0; g < mean.cell_count; ++g) {
    CHECK(mean.p[g] <= calm.p[g] + 1e-12);
    CHECK(mean.p_tilde[g] <= mean.p[g] + 1e-12);
    CHECK(mean.alpha[g] < 1.0);
    if (std::abs(mean.p[g] - 1.0) < 1e-12) saw_unit = true;
  }
  CHECK(saw_unit);

  // the quadrature is deterministic: two builds agree exactly
  const DetectionMatrix again = expected_detection_matrix(
      grid, sensors, 0.8, SquashParams{1.5}, avail);
  CHECK(mean.p_tilde == again.p_tilde);

  // no-availability variant pins alpha and reuses the p expectation
  const DetectionMatrix bare = expected_detection_matrix(
      grid, sensors, 0.8, SquashParams{1.5}, avail, false);
  for (std::size_t g = 0; g < bare.cell_count; ++g) {
    CHECK(bare.alpha[g] == 1.0);
    CHECK(bare.p_tilde[g] == bare.p[g]);
    CHECK(bare.p[g] == mean.p[g]);
  }

  CHECK_THROWS_AS((void)expected_detection_matrix(grid, {{11.0, 1.2}}, 0.8,
                                                  SquashParams{1.5}, avail),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)expected_detection_matrix(grid, sensors, -0.5,
                                                  SquashParams{1.5}, avail),
                  std::invalid_argument);
}
