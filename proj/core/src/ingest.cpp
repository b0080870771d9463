#include "voidplace/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

#include "voidplace/io.hpp"
#include "voidplace/rng.hpp"

namespace voidplace {

namespace {

constexpr double kEarthRadiusKm = 6371.0088;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// days since 1970-01-01 for a civil date (proleptic Gregorian)
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool days_in_month_ok(int y, int m, int d) {
  static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30,
                                      31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int limit = lengths[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) limit = 29;
  return d <= limit;
}

std::size_t find_column(const std::vector<std::string>& header,
                        const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError("missing required column: " + name);
}

}  // namespace

bool parse_utc_timestamp(const std::string& text, std::int64_t& out) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h,
                  &mi, &s) != 7) {
    return false;
  }
  if (sep != 'T' && sep != ' ') return false;
  if (!days_in_month_ok(y, mo, d)) return false;
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) return false;
  out = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
  return true;
}

AisParseResult parse_ais_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open AIS file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("AIS file has no header row: " + path.string());
  }
  const std::vector<std::string> header = split_csv_line(line);
  const std::size_t col_id = find_column(header, "MMSI");
  const std::size_t col_time = find_column(header, "BaseDateTime");
  const std::size_t col_lat = find_column(header, "LAT");
  const std::size_t col_lon = find_column(header, "LON");

  AisParseResult result;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::size_t needed =
        std::max({col_id, col_time, col_lat, col_lon}) + 1;
    if (fields.size() < needed) {
      ++result.skipped;
      continue;
    }
    AisRecord record;
    record.vessel_id = fields[col_id];
    double lat = 0.0;
    double lon = 0.0;
    try {
      std::size_t used = 0;
      lat = std::stod(fields[col_lat], &used);
      if (used != fields[col_lat].size()) throw std::invalid_argument("lat");
      lon = std::stod(fields[col_lon], &used);
      if (used != fields[col_lon].size()) throw std::invalid_argument("lon");
    } catch (const std::exception&) {
      ++result.skipped;
      continue;
    }
    if (record.vessel_id.empty() || lat < -90.0 || lat > 90.0 ||
        lon < -180.0 || lon > 180.0 ||
        !parse_utc_timestamp(fields[col_time], record.epoch_seconds)) {
      ++result.skipped;
      continue;
    }
    record.lat = lat;
    record.lon = lon;
    result.records.push_back(std::move(record));
  }
  return result;
}

std::vector<ArrivalEvent> project_to_segment(
    const std::vector<AisRecord>& records, const SegmentProjection& projection,
    const TimeWindow& window) {
  if (projection.lon_a == projection.lon_b &&
      projection.lat_a == projection.lat_b) {
    throw DataError("segment endpoints coincide");
  }
  if (!(projection.corridor_km > 0.0) || !(projection.rescale_km > 0.0)) {
    throw DataError("corridor and rescale lengths must be positive");
  }
  const double mid_lat = 0.5 * (projection.lat_a + projection.lat_b);
  const double mid_lon = 0.5 * (projection.lon_a + projection.lon_b);
  const double lon_scale = kEarthRadiusKm * std::cos(mid_lat * kDegToRad);
  const auto to_xy = [&](double lon, double lat) {
    return std::pair<double, double>{
        lon_scale * (lon - mid_lon) * kDegToRad,
        kEarthRadiusKm * (lat - mid_lat) * kDegToRad};
  };
  const auto [ax, ay] = to_xy(projection.lon_a, projection.lat_a);
  const auto [bx, by] = to_xy(projection.lon_b, projection.lat_b);
  const double ux = bx - ax;
  const double uy = by - ay;
  const double len2 = ux * ux + uy * uy;

  std::vector<ArrivalEvent> events;
  for (const AisRecord& record : records) {
    if (record.epoch_seconds < window.start_epoch_s ||
        record.epoch_seconds >= window.end_epoch_s) {
      continue;
    }
    const auto [px, py] = to_xy(record.lon, record.lat);
    const double u = ((px - ax) * ux + (py - ay) * uy) / len2;
    if (u < 0.0 || u > 1.0) continue;
    const double ex = px - ax - u * ux;
    const double ey = py - ay - u * uy;
    if (std::sqrt(ex * ex + ey * ey) > projection.corridor_km) continue;
    ArrivalEvent event;
    event.vessel_id = record.vessel_id;
    event.s_km = u * projection.rescale_km;
    if (window.fold_daily) {
      const std::int64_t sec = ((record.epoch_seconds % 86400) + 86400) % 86400;
      event.t_h = static_cast<double>(sec) / 3600.0;
    } else {
      event.t_h = static_cast<double>(record.epoch_seconds -
                                      window.start_epoch_s) /
                  3600.0;
    }
    events.push_back(std::move(event));
  }
  return events;
}

std::vector<ArrivalEvent> dedup_per_vessel_bin(
    const std::vector<ArrivalEvent>& events, const SpaceTimeGrid& grid) {
  std::unordered_set<std::string> seen;
  std::vector<ArrivalEvent> kept;
  for (const ArrivalEvent& event : events) {
    const double rel = (event.t_h - grid.t_min) / grid.dt();
    if (rel < 0.0) continue;
    auto bin = static_cast<std::size_t>(rel);
    if (bin >= grid.n_t) {
      // the upper boundary belongs to the last bin
      if (event.t_h == grid.t_max) {
        bin = grid.n_t - 1;
      } else {
        continue;
      }
    }
    std::string key = event.vessel_id + '#' + std::to_string(bin);
    if (seen.insert(std::move(key)).second) {
      kept.push_back(event);
    }
  }
  return kept;
}

ScalarField smooth_intensity(const std::vector<ArrivalEvent>& events,
                             const SpaceTimeGrid& grid, double bandwidth_s,
                             double bandwidth_t) {
  if (!(bandwidth_s > 0.0) || !(bandwidth_t > 0.0)) {
    throw DataError("bandwidths must be positive");
  }
  ScalarField field = ScalarField::constant(grid, 0.0);
  const double measure = grid.cell_measure();
  std::vector<double> weight(grid.size());
  for (const ArrivalEvent& event : events) {
    double mass = 0.0;
    for (std::size_t i_s = 0; i_s < grid.n_s; ++i_s) {
      const double ds = (grid.s_center(i_s) - event.s_km) / bandwidth_s;
      const double ws = std::exp(-0.5 * ds * ds);
      for (std::size_t i_t = 0; i_t < grid.n_t; ++i_t) {
        const double dt = (grid.t_center(i_t) - event.t_h) / bandwidth_t;
        const double w = ws * std::exp(-0.5 * dt * dt);
        weight[grid.flat_index(i_s, i_t)] = w;
        mass += w * measure;
      }
    }
    // renormalize this point's footprint over the grid so it contributes
    // unit mass even when truncated at the boundary
    for (std::size_t g = 0; g < weight.size(); ++g) {
      field.values[g] += weight[g] / mass;
    }
  }
  return field;
}

std::vector<ScalarField> perturbation_samples(const ScalarField& base,
                                              const SeparableKernel& kernel,
                                              int m, std::uint64_t seed) {
  if (m < 1) {
    throw std::invalid_argument("need at least one sample");
  }
  const FieldSampler sampler = perturbation_sampler(base, kernel);
  const SplitRng root(seed);
  std::vector<ScalarField> samples;
  samples.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    SplitRng rng = root.split(static_cast<std::uint64_t>(j));
    samples.push_back(sampler(rng));
  }
  return samples;
}

}  // namespace voidplace
