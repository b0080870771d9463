#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "voidplace/fields.hpp"
#include "voidplace/grid.hpp"

namespace voidplace {

/// One AIS position report.
struct AisRecord {
  std::string vessel_id;
  std::int64_t epoch_seconds = 0;  ///< UTC
  double lat = 0.0;
  double lon = 0.0;
};

struct AisParseResult {
  std::vector<AisRecord> records;
  std::size_t skipped = 0;  ///< malformed rows dropped, not fatal
};

/// Reads a MarineCadastre-style CSV. Required columns, located by header
/// name: MMSI, BaseDateTime (`YYYY-MM-DDTHH:MM:SS`, UTC), LAT, LON; extra
/// columns are ignored. Rows with unparseable fields or out-of-range
/// coordinates are counted and skipped. Missing required columns or an
/// unreadable file throw DataError.
AisParseResult parse_ais_csv(const std::filesystem::path& path);

/// The reference transect: a geographic segment, a perpendicular inclusion
/// corridor, and the arc-length span it is rescaled onto.
struct SegmentProjection {
  double lon_a = -80.835;
  double lat_a = 32.145;
  double lon_b = -80.811;
  double lat_b = 32.148;
  double corridor_km = 1.0;
  double rescale_km = 10.0;
};

/// Observation window, with an optional fold of multi-day data onto a 24-h
/// clock (event time becomes UTC hour of day instead of hours since start).
struct TimeWindow {
  std::int64_t start_epoch_s = 0;
  std::int64_t end_epoch_s = 0;
  bool fold_daily = true;
};

/// A projected arrival: arc-length position and event hour.
struct ArrivalEvent {
  std::string vessel_id;
  double s_km = 0.0;
  double t_h = 0.0;
};

/// Maps records onto the transect. A record survives when its timestamp lies
/// in [start, end), its projection parameter falls on the segment (not its
/// extension), and its perpendicular offset is within the corridor.
/// Kilometer geometry uses an equirectangular projection about the segment
/// midpoint; arc position is rescaled to [0, rescale_km].
std::vector<ArrivalEvent> project_to_segment(
    const std::vector<AisRecord>& records, const SegmentProjection& projection,
    const TimeWindow& window);

/// Collapses repeated pings: keeps the first event per (vessel, temporal
/// bin of `grid`), preserving input order. Events outside the grid's time
/// span are dropped.
std::vector<ArrivalEvent> dedup_per_vessel_bin(
    const std::vector<ArrivalEvent>& events, const SpaceTimeGrid& grid);

/// Gaussian kernel density on the grid, normalized per point so the field's
/// total mass equals the point count exactly (each point's footprint is
/// renormalized over the grid, which absorbs boundary truncation). Zero
/// points give the zero field.
ScalarField smooth_intensity(const std::vector<ArrivalEvent>& events,
                             const SpaceTimeGrid& grid, double bandwidth_s,
                             double bandwidth_t);

/// M mean-corrected log-Gaussian perturbations base * exp(G - sigma^2/2),
/// one independent seeded draw each; stands in for posterior samples when
/// only a point estimate of the intensity is available.
std::vector<ScalarField> perturbation_samples(const ScalarField& base,
                                              const SeparableKernel& kernel,
                                              int m, std::uint64_t seed);

/// Parses `YYYY-MM-DDTHH:MM:SS` as UTC epoch seconds; returns false on
/// malformed or out-of-range input.
bool parse_utc_timestamp(const std::string& text, std::int64_t& out);

}  // namespace voidplace
