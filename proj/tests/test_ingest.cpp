#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "voidplace/ingest.hpp"
#include "voidplace/io.hpp"

using namespace voidplace;

namespace {

const SegmentProjection kSegment{};

std::string row_at(const std::string& vessel, const std::string& when,
                   double u, double dlat = 0.0) {
  const double lon = kSegment.lon_a + u * (kSegment.lon_b - kSegment.lon_a);
  const double lat =
      kSegment.lat_a + u * (kSegment.lat_b - kSegment.lat_a) + dlat;
  return vessel + "," + when + "," + std::to_string(lat) + "," +
         std::to_string(lon) + ",extra\n";
}

TimeWindow default_window() {
  TimeWindow w;
  REQUIRE(parse_utc_timestamp("2020-01-01T00:00:00", w.start_epoch_s));
  REQUIRE(parse_utc_timestamp("2020-04-01T00:00:00", w.end_epoch_s));
  w.fold_daily = true;
  return w;
}

AisRecord record_at(double u, std::int64_t epoch, double dlat = 0.0) {
  AisRecord r;
  r.vessel_id = "v";
  r.epoch_seconds = epoch;
  r.lon = kSegment.lon_a + u * (kSegment.lon_b - kSegment.lon_a);
  r.lat = kSegment.lat_a + u * (kSegment.lat_b - kSegment.lat_a) + dlat;
  return r;
}

}  // namespace

TEST_CASE("utc timestamps parse to epoch seconds") {
  std::int64_t epoch = 0;
  REQUIRE(parse_utc_timestamp("2020-01-01T00:00:00", epoch));
  CHECK(epoch == 1577836800);
  REQUIRE(parse_utc_timestamp("2020-01-02T03:04:05", epoch));
  CHECK(epoch == 1577836800 + 86400 + 3 * 3600 + 4 * 60 + 5);

  // a space separator is the other common export form
  REQUIRE(parse_utc_timestamp("2020-01-01 00:00:00", epoch));
  CHECK(epoch == 1577836800);

  // leap day exists in 2020, not 2019
  CHECK(parse_utc_timestamp("2020-02-29T12:00:00", epoch));
  CHECK_FALSE(parse_utc_timestamp("2019-02-29T12:00:00", epoch));

  CHECK_FALSE(parse_utc_timestamp("2020-13-01T00:00:00", epoch));
  CHECK_FALSE(parse_utc_timestamp("2020-01-32T00:00:00", epoch));
  CHECK_FALSE(parse_utc_timestamp("2020-01-01T24:00:00", epoch));
  CHECK_FALSE(parse_utc_timestamp("not a date", epoch));
  CHECK_FALSE(parse_utc_timestamp("", epoch));
}

TEST_CASE("ais parsing locates columns by header name") {
  TempDir dir("ais");
  const auto path = dir.file("traffic.csv");
  // shuffled column order and an ignored extra column
  write_file(path,
             "BaseDateTime,VesselName,LON,LAT,MMSI\n"
             "2020-01-15T06:30:00,alpha,-80.82,32.146,111\n"
             "2020-01-15T07:00:00,beta,-80.83,32.145,222\n");
  const AisParseResult result = parse_ais_csv(path);
  REQUIRE(result.records.size() == 2);
  CHECK(result.skipped == 0);
  CHECK(result.records[0].vessel_id == "111");
  CHECK(result.records[0].lon == doctest::Approx(-80.82));
  CHECK(result.records[0].lat == doctest::Approx(32.146));
  std::int64_t expect = 0;
  REQUIRE(parse_utc_timestamp("2020-01-15T06:30:00", expect));
  CHECK(result.records[0].epoch_seconds == expect);
}

TEST_CASE("malformed ais rows are skipped, structural problems throw") {
  TempDir dir("ais_bad");
  const auto path = dir.file("traffic.csv");
  write_file(path,
             "MMSI,BaseDateTime,LAT,LON\n"
             "111,2020-01-15T06:30:00,32.146,-80.82\n"
             "222,2020-01-15T06:30:00,abc,-80.82\n"
             "333,not-a-time,32.146,-80.82\n"
             "444,2020-01-15T06:30:00,95.0,-80.82\n"
             "555,2020-01-15T06:30:00,32.146,-200.0\n"
             "666,2020-01-15T06:30:00,32.146\n");
  const AisParseResult result = parse_ais_csv(path);
  CHECK(result.records.size() == 1);
  CHECK(result.skipped == 5);

  const auto missing_col = dir.file("nocol.csv");
  write_file(missing_col, "MMSI,BaseDateTime,LAT\n111,2020-01-15T06:30:00,1\n");
  CHECK_THROWS_AS((void)parse_ais_csv(missing_col), DataError);

  CHECK_THROWS_AS((void)parse_ais_csv(dir.file("absent.csv")), DataError);

  // a bare header is an empty dataset, not an error
  const auto empty = dir.file("empty.csv");
  write_file(empty, "MMSI,BaseDateTime,LAT,LON\n");
  const AisParseResult none = parse_ais_csv(empty);
  CHECK(none.records.empty());
  CHECK(none.skipped == 0);
}

TEST_CASE("projection is affine along the transect") {
  const TimeWindow window = default_window();
  const std::int64_t epoch = window.start_epoch_s + 6 * 3600;

  std::vector<AisRecord> records;
  for (double u : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    records.push_back(record_at(u, epoch));
  }
  const std::vector<ArrivalEvent> events =
      project_to_segment(records, kSegment, window);
  REQUIRE(events.size() == 5);
  const std::vector<double> expect = {0.0, 2.5, 5.0, 7.5, 10.0};
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].s_km == doctest::Approx(expect[i]).epsilon(1e-6));
    CHECK(events[i].t_h == doctest::Approx(6.0).epsilon(1e-9));
  }
}

TEST_CASE("projection drops strays outside corridor, span, or window") {
  const TimeWindow window = default_window();
  const std::int64_t inside = window.start_epoch_s + 12 * 3600;

  std::vector<AisRecord> records;
  records.push_back(record_at(0.5, inside));                  // kept
  records.push_back(record_at(0.5, inside, 0.018));           // ~2 km off
  records.push_back(record_at(1.3, inside));                  // past the end
  records.push_back(record_at(-0.2, inside));                 // before start
  records.push_back(record_at(0.5, window.start_epoch_s - 1));   // too early
  records.push_back(record_at(0.5, window.end_epoch_s));         // too late
  const std::vector<ArrivalEvent> events =
      project_to_segment(records, kSegment, window);
  REQUIRE(events.size() == 1);
  CHECK(events[0].s_km == doctest::Approx(5.0).epsilon(1e-6));

  // a quarter of the corridor is still inside
  std::vector<AisRecord> near = {record_at(0.5, inside, 0.002)};
  CHECK(project_to_segment(near, kSegment, window).size() == 1);
}

TEST_CASE("daily folding wraps event time onto the clock") {
  TimeWindow window = default_window();
  const std::int64_t epoch = window.start_epoch_s + 36 * 3600;  // day 2, noon

  const std::vector<AisRecord> records = {record_at(0.5, epoch)};
  const std::vector<ArrivalEvent> folded =
      project_to_segment(records, kSegment, window);
  REQUIRE(folded.size() == 1);
  CHECK(folded[0].t_h == doctest::Approx(12.0).epsilon(1e-9));

  window.fold_daily = false;
  const std::vector<ArrivalEvent> linear =
      project_to_segment(records, kSegment, window);
  REQUIRE(linear.size() == 1);
  CHECK(linear[0].t_h == doctest::Approx(36.0).epsilon(1e-9));
}

TEST_CASE("per-vessel binning keeps one ping per hour bin") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 10, 24);
  std::vector<ArrivalEvent> events = {
      {"a", 1.0, 5.2}, {"a", 1.5, 5.8},   // same vessel, same bin
      {"a", 2.0, 6.1},                    // next bin
      {"b", 1.2, 5.3},                    // other vessel, same bin as a's
      {"a", 3.0, 24.0},                   // upper boundary joins the last bin
      {"a", 3.0, 24.5},                   // outside the span
      {"a", 3.0, -0.1},                   // outside the span
  };
  const std::vector<ArrivalEvent> kept = dedup_per_vessel_bin(events, grid);
  REQUIRE(kept.size() == 4);
  CHECK(kept[0].s_km == doctest::Approx(1.0));  // the first ping survives
  CHECK(kept[0].t_h == doctest::Approx(5.2));
  CHECK(kept[1].t_h == doctest::Approx(6.1));
  CHECK(kept[2].vessel_id == "b");
  CHECK(kept[3].t_h == doctest::Approx(24.0));
}

TEST_CASE("smoothed intensity integrates to the event count") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 40, 24);

  const std::vector<ArrivalEvent> none;
  const ScalarField zero = smooth_intensity(none, grid, 0.5, 1.0);
  for (std::size_t i = 0; i < zero.size(); ++i) {
    CHECK(zero[i] == 0.0);
  }

  // boundary renormalization keeps unit mass even at a corner
  const std::vector<ArrivalEvent> corner = {{"a", 0.1, 0.2}};
  CHECK(total_mass(smooth_intensity(corner, grid, 0.5, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-9));

  const std::vector<ArrivalEvent> three = {
      {"a", 2.0, 4.0}, {"b", 5.0, 12.0}, {"c", 8.0, 20.0}};
  const ScalarField field = smooth_intensity(three, grid, 0.5, 1.0);
  CHECK(total_mass(field) == doctest::Approx(3.0).epsilon(1e-9));
  for (std::size_t i = 0; i < field.size(); ++i) {
    CHECK(field[i] >= 0.0);
  }

  // a wide bandwidth flattens the surface
  const ScalarField wide = smooth_intensity(three, grid, 50.0, 200.0);
  double lo = wide[0];
  double hi = wide[0];
  for (std::size_t i = 0; i < wide.size(); ++i) {
    lo = std::min(lo, wide[i]);
    hi = std::max(hi, wide[i]);
  }
  CHECK(hi / lo < 1.05);

  // the peak sits on the event
  const std::vector<ArrivalEvent> one = {{"a", 5.0, 12.0}};
  const ScalarField peaked = smooth_intensity(one, grid, 0.5, 1.0);
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < peaked.size(); ++i) {
    if (peaked[i] > peaked[argmax]) argmax = i;
  }
  const auto [s, t] = grid.cell_center(argmax);
  CHECK(std::abs(s - 5.0) <= grid.ds());
  CHECK(std::abs(t - 12.0) <= grid.dt());
}

TEST_CASE("posterior stand-ins perturb around the estimate") {
  const SpaceTimeGrid grid = make_grid(0.0, 10.0, 0.0, 24.0, 8, 6);
  const ScalarField base = ScalarField::constant(grid, 1.5);

  const std::vector<ScalarField> draws =
      perturbation_samples(base, SeparableKernel{0.8, 0.5, 1.0}, 5, 3);
  REQUIRE(draws.size() == 5);
  bool differ = false;
  for (std::size_t i = 0; i < draws[0].size(); ++i) {
    REQUIRE(draws[0][i] > 0.0);
    differ = differ || (draws[0][i] != draws[1][i]);
  }
  CHECK(differ);

  // deterministic in the seed
  const std::vector<ScalarField> again =
      perturbation_samples(base, SeparableKernel{0.8, 0.5, 1.0}, 5, 3);
  CHECK(again[2].values == draws[2].values);

  // a vanishing field scale collapses the draws onto the base
  const std::vector<ScalarField> tight =
      perturbation_samples(base, SeparableKernel{1e-9, 0.5, 1.0}, 2, 3);
  for (std::size_t i = 0; i < tight[0].size(); ++i) {
    CHECK(tight[0][i] == doctest::Approx(1.5).epsilon(1e-6));
  }
}
