#include "voidplace/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "voidplace/io.hpp"

namespace voidplace {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError(message);
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown config key '" + path + "." + it.key() + "'");
  }
}

const Json* section(const Json& root, const char* name) {
  if (!root.contains(name)) return nullptr;
  const Json& s = root.at(name);
  if (!s.is_object()) fail(std::string("config section '") + name +
                           "' must be an object");
  return &s;
}

void read_double(const Json& obj, const char* key, double& out,
                 const std::string& path) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number()) fail("'" + path + "." + key + "' must be a number");
  out = v.get<double>();
}

void read_count(const Json& obj, const char* key, std::size_t& out,
                const std::string& path) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() ||
      (v.is_number_integer() && !v.is_number_unsigned() &&
       v.get<std::int64_t>() < 0)) {
    fail("'" + path + "." + key + "' must be a nonnegative integer");
  }
  out = v.get<std::size_t>();
}

void read_int(const Json& obj, const char* key, int& out,
              const std::string& path) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) {
    fail("'" + path + "." + key + "' must be an integer");
  }
  out = v.get<int>();
}

void read_bool(const Json& obj, const char* key, bool& out,
               const std::string& path) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_boolean()) fail("'" + path + "." + key + "' must be a boolean");
  out = v.get<bool>();
}

void read_string(const Json& obj, const char* key, std::string& out,
                 const std::string& path) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_string()) fail("'" + path + "." + key + "' must be a string");
  out = v.get<std::string>();
}

void read_double_list(const Json& obj, const char* key,
                      std::vector<double>& out, const std::string& path) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_array()) fail("'" + path + "." + key + "' must be an array");
  std::vector<double> values;
  for (const Json& item : v) {
    if (!item.is_number()) {
      fail("'" + path + "." + key + "' must contain only numbers");
    }
    values.push_back(item.get<double>());
  }
  out = std::move(values);
}

void read_int_list(const Json& obj, const char* key, std::vector<int>& out,
                   const std::string& path) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_array()) fail("'" + path + "." + key + "' must be an array");
  std::vector<int> values;
  for (const Json& item : v) {
    if (!item.is_number_integer()) {
      fail("'" + path + "." + key + "' must contain only integers");
    }
    values.push_back(item.get<int>());
  }
  out = std::move(values);
}

void read_seed(const Json& obj, const char* key, std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (v.is_number_unsigned()) {
    out = v.get<std::uint64_t>();
    return;
  }
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    out = static_cast<std::uint64_t>(v.get<std::int64_t>());
    return;
  }
  fail(std::string("'") + key + "' must be a nonnegative integer");
}

GridConfig parse_grid(const Json& obj, const std::string& path) {
  check_keys(obj, {"s_min", "s_max", "t_min", "t_max", "n_s", "n_t"}, path);
  GridConfig grid;
  read_double(obj, "s_min", grid.s_min, path);
  read_double(obj, "s_max", grid.s_max, path);
  read_double(obj, "t_min", grid.t_min, path);
  read_double(obj, "t_max", grid.t_max, path);
  read_count(obj, "n_s", grid.n_s, path);
  read_count(obj, "n_t", grid.n_t, path);
  return grid;
}

GridConfig parse_grid_section(const Json& root, const char* name,
                              const GridConfig& defaults) {
  const Json* obj = section(root, name);
  if (obj == nullptr) return defaults;
  GridConfig base = parse_grid(*obj, name);
  return base;
}

void require_kernel(const SeparableKernel& kernel, const std::string& path) {
  if (!(kernel.sigma > 0.0) || !(kernel.ell_s > 0.0) ||
      !(kernel.ell_t > 0.0)) {
    fail("'" + path + "' kernel parameters must be positive");
  }
}

void validate(const ExperimentConfig& config) {
  try {
    make_grid(config.grid);
    make_grid(config.robustness.grid);
  } catch (const std::invalid_argument& e) {
    fail(std::string("invalid grid: ") + e.what());
  }
  require_kernel(config.target.kernel, "target");
  require_kernel(config.environment.kernel, "environment");
  if (!(config.environment.beta_omega > 0.0)) {
    fail("'environment.beta_omega' must be positive");
  }
  if (config.availability.beta < 0.0) {
    fail("'availability.beta' must be nonnegative");
  }
  if (config.availability.xi < 0.0 || config.availability.xi > 1.0) {
    fail("'availability.xi' must lie in [0, 1]");
  }
  if (!(config.sensors.theta > 0.0)) {
    fail("'sensors.theta' must be positive");
  }
  if (config.planning.omega_mode != "expected_detection" &&
      config.planning.omega_mode != "mc_detection" &&
      config.planning.omega_mode != "mc_mean" &&
      config.planning.omega_mode != "draw") {
    fail("'planning.omega_mode' must be \"expected_detection\", "
         "\"mc_detection\", \"mc_mean\", or \"draw\"");
  }
  if (config.planning.omega_draws < 1) {
    fail("'planning.omega_draws' must be positive");
  }
  const std::size_t candidates = config.sensors.candidate_count == 0
                                     ? config.grid.n_s
                                     : config.sensors.candidate_count;
  if (config.place.k_min > config.place.k_max) {
    fail("'place.k_min' must not exceed 'place.k_max'");
  }
  if (config.place.k_max > candidates) {
    fail("'place.k_max' exceeds the candidate count");
  }
  if (config.place.realizations < 1) {
    fail("'place.realizations' must be positive");
  }
  if (config.margin.scatter_cells < 1 || config.margin.hist_bins < 1) {
    fail("'margin' sampling sizes must be positive");
  }
  if (config.margin.beta_list.empty()) {
    fail("'margin.beta_list' must be nonempty");
  }
  for (double beta : config.margin.beta_list) {
    if (!(beta > 0.0)) fail("'margin.beta_list' entries must be positive");
  }
  if (config.margin.sweep_k < 1 || config.margin.sweep_k > candidates) {
    fail("'margin.sweep_k' must lie in [1, candidate count]");
  }
  if (config.margin.sweep_realizations < 2) {
    fail("'margin.sweep_realizations' must be at least 2");
  }
  if (config.margin.sensor_s < config.grid.s_min ||
      config.margin.sensor_s > config.grid.s_max) {
    fail("'margin.sensor_s' must lie inside the grid");
  }
  if (config.robustness.sensor_count < 1) {
    fail("'robustness.sensor_count' must be positive");
  }
  if (config.robustness.run.n_list.empty()) {
    fail("'robustness.n_list' must be nonempty");
  }
  for (int n : config.robustness.run.n_list) {
    if (n < 1) fail("'robustness.n_list' entries must be positive");
  }
  if (config.robustness.run.delta <= 0.0 ||
      config.robustness.run.delta >= 1.0) {
    fail("'robustness.delta' must lie in (0, 1)");
  }
  if (config.robustness.run.k < 1 ||
      config.robustness.run.k > config.robustness.sensor_count) {
    fail("'robustness.k' must lie in [1, sensor_count]");
  }
  if (config.robustness.run.trials < 1) {
    fail("'robustness.trials' must be positive");
  }
  if (!(config.ingest.bandwidth_s > 0.0) ||
      !(config.ingest.bandwidth_t > 0.0)) {
    fail("'ingest' bandwidths must be positive");
  }
  if (config.ingest.samples < 1) {
    fail("'ingest.samples' must be positive");
  }
  if (config.ingest.event_mode != "per_vessel_bin" &&
      config.ingest.event_mode != "per_ping") {
    fail("'ingest.event_mode' must be \"per_vessel_bin\" or \"per_ping\"");
  }
  std::int64_t start = 0;
  std::int64_t end = 0;
  if (!parse_utc_timestamp(config.ingest.window_start, start) ||
      !parse_utc_timestamp(config.ingest.window_end, end)) {
    fail("'ingest' window timestamps must be YYYY-MM-DDTHH:MM:SS");
  }
  if (start >= end) {
    fail("'ingest.window_start' must precede 'ingest.window_end'");
  }
  if (config.ingest.segment.lon_a == config.ingest.segment.lon_b &&
      config.ingest.segment.lat_a == config.ingest.segment.lat_b) {
    fail("'ingest.segment' endpoints must be distinct");
  }
  if (!(config.ingest.segment.corridor_km > 0.0) ||
      !(config.ingest.segment.rescale_km > 0.0)) {
    fail("'ingest.segment' lengths must be positive");
  }
  if (config.out_dir.empty()) {
    fail("'out_dir' must be nonempty");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::exception& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("config root must be a JSON object");
  check_keys(root,
             {"grid", "target", "environment", "availability", "sensors",
              "planning", "place", "margin", "robustness", "ingest", "seed",
              "out_dir"},
             "config");

  ExperimentConfig config;
  config.grid = parse_grid_section(root, "grid", config.grid);

  if (const Json* obj = section(root, "target")) {
    check_keys(*obj, {"sigma", "ell_s", "ell_t", "log_mean", "intensity_csv"},
               "target");
    read_double(*obj, "sigma", config.target.kernel.sigma, "target");
    read_double(*obj, "ell_s", config.target.kernel.ell_s, "target");
    read_double(*obj, "ell_t", config.target.kernel.ell_t, "target");
    read_double(*obj, "log_mean", config.target.log_mean, "target");
    read_string(*obj, "intensity_csv", config.target.intensity_csv, "target");
  }
  if (const Json* obj = section(root, "environment")) {
    check_keys(*obj, {"sigma", "ell_s", "ell_t", "beta_omega"}, "environment");
    read_double(*obj, "sigma", config.environment.kernel.sigma, "environment");
    read_double(*obj, "ell_s", config.environment.kernel.ell_s, "environment");
    read_double(*obj, "ell_t", config.environment.kernel.ell_t, "environment");
    read_double(*obj, "beta_omega", config.environment.beta_omega,
                "environment");
  }
  if (const Json* obj = section(root, "availability")) {
    check_keys(*obj, {"beta", "xi"}, "availability");
    read_double(*obj, "beta", config.availability.beta, "availability");
    read_double(*obj, "xi", config.availability.xi, "availability");
  }
  if (const Json* obj = section(root, "sensors")) {
    check_keys(*obj, {"theta", "candidate_count"}, "sensors");
    read_double(*obj, "theta", config.sensors.theta, "sensors");
    read_count(*obj, "candidate_count", config.sensors.candidate_count,
               "sensors");
  }
  if (const Json* obj = section(root, "planning")) {
    check_keys(*obj, {"omega_mode", "omega_draws"}, "planning");
    read_string(*obj, "omega_mode", config.planning.omega_mode, "planning");
    read_int(*obj, "omega_draws", config.planning.omega_draws, "planning");
  }
  if (const Json* obj = section(root, "place")) {
    check_keys(*obj, {"k_min", "k_max", "realizations"}, "place");
    read_count(*obj, "k_min", config.place.k_min, "place");
    read_count(*obj, "k_max", config.place.k_max, "place");
    read_int(*obj, "realizations", config.place.realizations, "place");
  }
  if (const Json* obj = section(root, "margin")) {
    check_keys(*obj,
               {"scatter_cells", "hist_bins", "beta_list", "sweep_k",
                "sweep_realizations", "sensor_s"},
               "margin");
    read_count(*obj, "scatter_cells", config.margin.scatter_cells, "margin");
    read_count(*obj, "hist_bins", config.margin.hist_bins, "margin");
    read_double_list(*obj, "beta_list", config.margin.beta_list, "margin");
    read_count(*obj, "sweep_k", config.margin.sweep_k, "margin");
    read_int(*obj, "sweep_realizations", config.margin.sweep_realizations,
             "margin");
    read_double(*obj, "sensor_s", config.margin.sensor_s, "margin");
  }
  if (const Json* obj = section(root, "robustness")) {
    check_keys(*obj,
               {"grid", "log_mean", "sensor_count", "n_list", "delta", "k",
                "trials"},
               "robustness");
    if (obj->contains("grid")) {
      config.robustness.grid = parse_grid(obj->at("grid"), "robustness.grid");
    }
    read_double(*obj, "log_mean", config.robustness.log_mean, "robustness");
    read_count(*obj, "sensor_count", config.robustness.sensor_count,
               "robustness");
    read_int_list(*obj, "n_list", config.robustness.run.n_list, "robustness");
    read_double(*obj, "delta", config.robustness.run.delta, "robustness");
    read_count(*obj, "k", config.robustness.run.k, "robustness");
    read_int(*obj, "trials", config.robustness.run.trials, "robustness");
  }
  if (const Json* obj = section(root, "ingest")) {
    check_keys(*obj,
               {"ais_csv", "synthetic", "segment", "window_start",
                "window_end", "fold_daily", "event_mode", "bandwidth_s",
                "bandwidth_t", "samples"},
               "ingest");
    read_string(*obj, "ais_csv", config.ingest.ais_csv, "ingest");
    read_bool(*obj, "synthetic", config.ingest.synthetic, "ingest");
    if (obj->contains("segment")) {
      const Json& seg = obj->at("segment");
      if (!seg.is_object()) fail("'ingest.segment' must be an object");
      check_keys(seg,
                 {"lon_a", "lat_a", "lon_b", "lat_b", "corridor_km",
                  "rescale_km"},
                 "ingest.segment");
      read_double(seg, "lon_a", config.ingest.segment.lon_a, "ingest.segment");
      read_double(seg, "lat_a", config.ingest.segment.lat_a, "ingest.segment");
      read_double(seg, "lon_b", config.ingest.segment.lon_b, "ingest.segment");
      read_double(seg, "lat_b", config.ingest.segment.lat_b, "ingest.segment");
      read_double(seg, "corridor_km", config.ingest.segment.corridor_km,
                  "ingest.segment");
      read_double(seg, "rescale_km", config.ingest.segment.rescale_km,
                  "ingest.segment");
    }
    read_string(*obj, "window_start", config.ingest.window_start, "ingest");
    read_string(*obj, "window_end", config.ingest.window_end, "ingest");
    read_bool(*obj, "fold_daily", config.ingest.fold_daily, "ingest");
    read_string(*obj, "event_mode", config.ingest.event_mode, "ingest");
    read_double(*obj, "bandwidth_s", config.ingest.bandwidth_s, "ingest");
    read_double(*obj, "bandwidth_t", config.ingest.bandwidth_t, "ingest");
    read_int(*obj, "samples", config.ingest.samples, "ingest");
  }
  read_seed(root, "seed", config.seed);
  read_string(root, "out_dir", config.out_dir, "config");

  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail("cannot open config file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  OrderedJson j;
  j["grid"] = {{"s_min", config.grid.s_min},   {"s_max", config.grid.s_max},
               {"t_min", config.grid.t_min},   {"t_max", config.grid.t_max},
               {"n_s", config.grid.n_s},       {"n_t", config.grid.n_t}};
  j["target"] = {{"sigma", config.target.kernel.sigma},
                 {"ell_s", config.target.kernel.ell_s},
                 {"ell_t", config.target.kernel.ell_t},
                 {"log_mean", config.target.log_mean},
                 {"intensity_csv", config.target.intensity_csv}};
  j["environment"] = {{"sigma", config.environment.kernel.sigma},
                      {"ell_s", config.environment.kernel.ell_s},
                      {"ell_t", config.environment.kernel.ell_t},
                      {"beta_omega", config.environment.beta_omega}};
  j["availability"] = {{"beta", config.availability.beta},
                       {"xi", config.availability.xi}};
  j["sensors"] = {{"theta", config.sensors.theta},
                  {"candidate_count", config.sensors.candidate_count}};
  j["planning"] = {{"omega_mode", config.planning.omega_mode},
                   {"omega_draws", config.planning.omega_draws}};
  j["place"] = {{"k_min", config.place.k_min},
                {"k_max", config.place.k_max},
                {"realizations", config.place.realizations}};
  j["margin"] = {{"scatter_cells", config.margin.scatter_cells},
                 {"hist_bins", config.margin.hist_bins},
                 {"beta_list", config.margin.beta_list},
                 {"sweep_k", config.margin.sweep_k},
                 {"sweep_realizations", config.margin.sweep_realizations},
                 {"sensor_s", config.margin.sensor_s}};
  j["robustness"] = {
      {"grid",
       {{"s_min", config.robustness.grid.s_min},
        {"s_max", config.robustness.grid.s_max},
        {"t_min", config.robustness.grid.t_min},
        {"t_max", config.robustness.grid.t_max},
        {"n_s", config.robustness.grid.n_s},
        {"n_t", config.robustness.grid.n_t}}},
      {"log_mean", config.robustness.log_mean},
      {"sensor_count", config.robustness.sensor_count},
      {"n_list", config.robustness.run.n_list},
      {"delta", config.robustness.run.delta},
      {"k", config.robustness.run.k},
      {"trials", config.robustness.run.trials}};
  j["ingest"] = {{"ais_csv", config.ingest.ais_csv},
                 {"synthetic", config.ingest.synthetic},
                 {"segment",
                  {{"lon_a", config.ingest.segment.lon_a},
                   {"lat_a", config.ingest.segment.lat_a},
                   {"lon_b", config.ingest.segment.lon_b},
                   {"lat_b", config.ingest.segment.lat_b},
                   {"corridor_km", config.ingest.segment.corridor_km},
                   {"rescale_km", config.ingest.segment.rescale_km}}},
                 {"window_start", config.ingest.window_start},
                 {"window_end", config.ingest.window_end},
                 {"fold_daily", config.ingest.fold_daily},
                 {"event_mode", config.ingest.event_mode},
                 {"bandwidth_s", config.ingest.bandwidth_s},
                 {"bandwidth_t", config.ingest.bandwidth_t},
                 {"samples", config.ingest.samples}};
  j["seed"] = config.seed;
  j["out_dir"] = config.out_dir;
  return j.dump(2) + "\n";
}

SpaceTimeGrid make_grid(const GridConfig& grid_config) {
  try {
    return make_grid(grid_config.s_min, grid_config.s_max, grid_config.t_min,
                     grid_config.t_max, grid_config.n_s, grid_config.n_t);
  } catch (const std::invalid_argument& e) {
    fail(std::string("invalid grid: ") + e.what());
  }
}

}  // namespace voidplace
