#include "voidplace/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "voidplace/filtering.hpp"
#include "voidplace/ingest.hpp"
#include "voidplace/io.hpp"
#include "voidplace/placement.hpp"
#include "voidplace/robustness.hpp"
#include "voidplace/rng.hpp"
#include "voidplace/version.hpp"

namespace voidplace {

namespace fs = std::filesystem;

namespace {

// Stream tags off each command's root rng. A command derives every random
// input from root.split(tag), so adding realizations or reordering outputs
// never shifts another stream.
constexpr std::uint64_t kTagPlanningOmega = 0;
constexpr std::uint64_t kTagFixture = 1;
constexpr std::uint64_t kTagEnsemble = 2;
constexpr std::uint64_t kTagRandomPlacement = 3;
constexpr std::uint64_t kTagSamples = 4;
constexpr std::uint64_t kTagScatter = 5;
constexpr std::uint64_t kTagSweep = 6;
constexpr std::uint64_t kTagEstimation = 7;

SensorSet make_candidates(const SpaceTimeGrid& grid, double theta,
                          std::size_t count) {
  if (count == 0) count = grid.n_s;
  SensorSet sensors;
  sensors.reserve(count);
  const double span = grid.s_max - grid.s_min;
  for (std::size_t i = 0; i < count; ++i) {
    const double loc =
        grid.s_min + (static_cast<double>(i) + 0.5) * span /
                         static_cast<double>(count);
    sensors.push_back(Sensor{loc, theta});
  }
  return sensors;
}

// Mean arrival intensity the planner optimizes against: the CSV field when
// one is configured (it is already a posterior-mean stand-in), otherwise
// the closed-form log-Gaussian mean exp(log_mean + sigma^2/2).
ScalarField planning_intensity(const ExperimentConfig& config,
                               const SpaceTimeGrid& grid) {
  if (!config.target.intensity_csv.empty()) {
    return load_intensity_csv(grid, config.target.intensity_csv);
  }
  const double mean = std::exp(
      config.target.log_mean +
      0.5 * config.target.kernel.sigma * config.target.kernel.sigma);
  return ScalarField::constant(grid, mean);
}

FieldSampler target_sampler(const ExperimentConfig& config,
                            const SpaceTimeGrid& grid) {
  if (!config.target.intensity_csv.empty()) {
    return perturbation_sampler(
        load_intensity_csv(grid, config.target.intensity_csv),
        config.target.kernel);
  }
  return lgcp_sampler(grid, config.target.kernel, config.target.log_mean);
}

FieldSampler environment_sampler(const ExperimentConfig& config,
                                 const SpaceTimeGrid& grid) {
  return omega_sampler(grid, config.environment.kernel,
                       SquashParams{config.environment.beta_omega});
}

ScalarField planning_omega(const ExperimentConfig& config,
                           const SpaceTimeGrid& grid, const SplitRng& root) {
  const FieldSampler sampler = environment_sampler(config, grid);
  SplitRng rng = root.split(kTagPlanningOmega);
  if (config.planning.omega_mode == "draw") {
    return sampler(rng);
  }
  // mc_detection consumers that need a field (margin diagnostics) fall back
  // to the averaged environment
  return mean_field(sampler, config.planning.omega_draws, rng);
}

// Detection layers the environment-aware planners score against. In
// mc_detection mode the layers are expectations over environment draws;
// the other modes plug a single planning field into the formulas. Both
// availability variants consume the same draw sequence, so the policies
// they feed stay on common random numbers.
DetectionMatrix planning_matrix(const ExperimentConfig& config,
                                const SpaceTimeGrid& grid,
                                const SensorSet& candidates,
                                const SplitRng& root,
                                bool with_availability) {
  if (config.planning.omega_mode == "expected_detection") {
    return expected_detection_matrix(
        grid, candidates, config.environment.kernel.sigma,
        SquashParams{config.environment.beta_omega}, config.availability,
        with_availability);
  }
  if (config.planning.omega_mode == "mc_detection") {
    SplitRng rng = root.split(kTagPlanningOmega);
    return mc_mean_detection_matrix(grid, candidates,
                                    environment_sampler(config, grid),
                                    config.planning.omega_draws, rng,
                                    config.availability, with_availability);
  }
  return build_detection_matrix(grid, candidates,
                                planning_omega(config, grid, root),
                                config.availability, with_availability);
}

void write_manifest(const ExperimentConfig& config, const char* command) {
  nlohmann::ordered_json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["seed"] = config.seed;
  manifest["config"] = nlohmann::ordered_json::parse(config_to_json(config));
  write_text_atomic(fs::path(config.out_dir) / "manifest.json",
                    manifest.dump(2) + "\n");
}

struct PolicyCurve {
  std::string name;
  Placement placement;  // selection of size k_max; prefixes give smaller K
  std::vector<VoidEstimate> estimates;  // index K
};

// Builds the four policy selections (all nested in K) and scores them on
// one shared ensemble.
std::vector<PolicyCurve> run_policies(const ExperimentConfig& config,
                                      const SpaceTimeGrid& grid,
                                      const SensorSet& candidates,
                                      const EvalEnsemble& ensemble,
                                      const SplitRng& root) {
  const ScalarField lambda_plan = planning_intensity(config, grid);
  const ScalarField omega_zero = ScalarField::constant(grid, 0.0);
  const std::size_t k_max = config.place.k_max;

  std::vector<PolicyCurve> curves;
  const auto add_curve = [&](std::string name, Placement placement) {
    PolicyCurve curve;
    curve.name = std::move(name);
    curve.estimates = ensemble.evaluate_prefixes(candidates,
                                                 placement.selected,
                                                 config.availability);
    curve.placement = std::move(placement);
    curves.push_back(std::move(curve));
  };

  // nf ignores the environment entirely; nfilt sees the degraded footprint
  // but not the availability loss; fa_aware plans on the full model
  add_curve("nf", greedy_place(
                      lambda_plan,
                      build_detection_matrix(grid, candidates, omega_zero,
                                             config.availability, false),
                      k_max));
  add_curve("nfilt",
            greedy_place(lambda_plan,
                         planning_matrix(config, grid, candidates, root,
                                         false),
                         k_max));
  add_curve("fa_aware",
            greedy_place(lambda_plan,
                         planning_matrix(config, grid, candidates, root,
                                         true),
                         k_max));
  add_curve("random",
            random_place(candidates.size(), k_max,
                         root.split(kTagRandomPlacement).next_u64()));
  return curves;
}

Placement prefix_of(const Placement& placement, std::size_t k) {
  Placement out;
  out.budget = k;
  out.selected.assign(placement.selected.begin(),
                      placement.selected.begin() +
                          static_cast<std::ptrdiff_t>(k));
  if (placement.gains.size() >= k) {
    out.gains.assign(placement.gains.begin(),
                     placement.gains.begin() +
                         static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

}  // namespace

void cmd_simulate_env(const ExperimentConfig& config) {
  const SpaceTimeGrid grid = make_grid(config.grid);
  const GpSampler sampler(grid, config.environment.kernel);
  const SplitRng root(config.seed);
  SplitRng rng = root.split(kTagFixture);
  const ScalarField z = sampler.draw(rng);
  const ScalarField omega =
      squash(z, SquashParams{config.environment.beta_omega});
  const fs::path out(config.out_dir);
  save_field_csv(z, "z", out / "z.csv");
  save_field_csv(omega, "omega", out / "omega.csv");
  write_manifest(config, "simulate-env");
}

void cmd_fit_intensity(const ExperimentConfig& config) {
  if (!config.ingest.synthetic && config.ingest.ais_csv.empty()) {
    throw ConfigError("fit-intensity needs ingest.ais_csv or synthetic=true");
  }
  const SpaceTimeGrid grid = make_grid(config.grid);
  const SplitRng root(config.seed);
  ScalarField intensity = ScalarField::constant(grid, 0.0);
  if (config.ingest.synthetic) {
    intensity = sample_lgcp_intensity(grid, config.target.kernel,
                                      config.target.log_mean,
                                      root.split(kTagFixture).next_u64());
  } else {
    const AisParseResult parsed = parse_ais_csv(config.ingest.ais_csv);
    TimeWindow window;
    window.fold_daily = config.ingest.fold_daily;
    parse_utc_timestamp(config.ingest.window_start, window.start_epoch_s);
    parse_utc_timestamp(config.ingest.window_end, window.end_epoch_s);
    std::vector<ArrivalEvent> events =
        project_to_segment(parsed.records, config.ingest.segment, window);
    if (config.ingest.event_mode == "per_vessel_bin") {
      events = dedup_per_vessel_bin(events, grid);
    }
    if (events.empty()) {
      std::cerr << "warning: no AIS events inside the corridor and window; "
                   "intensity is zero\n";
    } else {
      intensity = smooth_intensity(events, grid, config.ingest.bandwidth_s,
                                   config.ingest.bandwidth_t);
    }
  }
  const fs::path out(config.out_dir);
  save_intensity_csv(intensity, out / "intensity.csv");
  const std::vector<ScalarField> samples =
      perturbation_samples(intensity, config.target.kernel,
                           config.ingest.samples,
                           root.split(kTagSamples).next_u64());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%02zu.csv", j);
    save_intensity_csv(samples[j], out / name);
  }
  write_manifest(config, "fit-intensity");
}

void cmd_place(const ExperimentConfig& config) {
  const SpaceTimeGrid grid = make_grid(config.grid);
  const SensorSet candidates = make_candidates(
      grid, config.sensors.theta, config.sensors.candidate_count);
  const SplitRng root(config.seed);
  const EvalEnsemble ensemble(target_sampler(config, grid),
                              environment_sampler(config, grid),
                              config.place.realizations,
                              root.split(kTagEnsemble).next_u64());
  const std::vector<PolicyCurve> curves =
      run_policies(config, grid, candidates, ensemble, root);

  const fs::path out(config.out_dir);
  std::ostringstream summary;
  summary << "policy,K,void_mean,void_std\n";
  for (const PolicyCurve& curve : curves) {
    for (std::size_t k = config.place.k_min; k <= config.place.k_max; ++k) {
      const VoidEstimate& est = curve.estimates[k];
      summary << curve.name << ',' << k << ',' << dtos(est.nu_mean) << ','
              << dtos(est.nu_std_error) << "\n";
      std::ostringstream name;
      name << "placement_" << curve.name << "_K" << k << ".csv";
      save_placement_csv(prefix_of(curve.placement, k), candidates,
                         out / name.str());
    }
  }
  write_text_atomic(out / "summary.csv", summary.str());
  write_manifest(config, "place");
}

void cmd_bounds(const ExperimentConfig& config) {
  const SpaceTimeGrid grid = make_grid(config.grid);
  const SensorSet candidates = make_candidates(
      grid, config.sensors.theta, config.sensors.candidate_count);
  const SplitRng root(config.seed);
  const ScalarField lambda_plan = planning_intensity(config, grid);
  const DetectionMatrix plan_matrix =
      planning_matrix(config, grid, candidates, root, true);
  const EvalEnsemble ensemble(target_sampler(config, grid),
                              environment_sampler(config, grid),
                              config.place.realizations,
                              root.split(kTagEnsemble).next_u64());

  const fs::path out(config.out_dir);
  std::ostringstream summary;
  summary << "K,void_mc,jensen,coverage_bound,approx_bound,coverage,tau,"
             "tau_prime,switch_flag\n";
  for (std::size_t k = config.place.k_min; k <= config.place.k_max; ++k) {
    const CertificateReport report = certify(
        lambda_plan, plan_matrix, candidates, k, ensemble,
        config.availability);
    std::ostringstream name;
    name << "certificate_K" << k << ".json";
    write_text_atomic(out / name.str(), certificate_to_json(report));
    summary << k << ',' << dtos(report.nu_mc) << ','
            << dtos(report.jensen_bound) << ',' << dtos(report.coverage_bound)
            << ',' << dtos(report.approx_bound) << ','
            << dtos(report.coverage) << ',' << dtos(report.tau) << ','
            << dtos(report.tau_prime) << ','
            << (report.switching_flag ? 1 : 0) << "\n";
  }
  write_text_atomic(out / "summary.csv", summary.str());
  write_manifest(config, "bounds");
}

void cmd_margin(const ExperimentConfig& config) {
  const SpaceTimeGrid grid = make_grid(config.grid);
  const SplitRng root(config.seed);
  const FieldSampler env = environment_sampler(config, grid);
  SplitRng omega_rng = root.split(kTagFixture);
  const ScalarField omega = env(omega_rng);
  const Sensor sensor{config.margin.sensor_s, config.sensors.theta};
  const MarginDiagnostics diag =
      margin_map(omega, sensor, config.availability);

  const fs::path out(config.out_dir);
  save_margin_csv(diag, out / "margin_map.csv");

  // seeded uniform subsample of cells for the scatter panel
  const std::size_t cells = grid.size();
  const std::size_t take = std::min(config.margin.scatter_cells, cells);
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitRng scatter_rng = root.split(kTagScatter);
  for (std::size_t j = 0; j < take; ++j) {
    const std::size_t pick = j + scatter_rng.uniform_below(cells - j);
    std::swap(order[j], order[pick]);
  }
  std::vector<std::size_t> chosen(order.begin(),
                                  order.begin() +
                                      static_cast<std::ptrdiff_t>(take));
  std::sort(chosen.begin(), chosen.end());
  std::ostringstream scatter;
  scatter << "s_index,t_index,lhs,rhs,margin\n";
  for (std::size_t g : chosen) {
    const auto [i_s, i_t] = grid.split_index(g);
    scatter << i_s << ',' << i_t << ',' << dtos(diag.lhs.values[g]) << ','
            << dtos(diag.rhs.values[g]) << ',' << dtos(diag.margin.values[g])
            << "\n";
  }
  write_text_atomic(out / "scatter.csv", scatter.str());

  const auto [lo_it, hi_it] = std::minmax_element(diag.margin.values.begin(),
                                                  diag.margin.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<std::size_t> counts(config.margin.hist_bins, 0);
  if (hi > lo) {
    const double width = (hi - lo) / static_cast<double>(counts.size());
    for (double v : diag.margin.values) {
      auto bin = static_cast<std::size_t>((v - lo) / width);
      if (bin >= counts.size()) bin = counts.size() - 1;
      ++counts[bin];
    }
  } else {
    counts[0] = diag.margin.values.size();
  }
  std::ostringstream hist;
  hist << "bin_left,bin_right,count\n";
  const double width =
      hi > lo ? (hi - lo) / static_cast<double>(counts.size()) : 0.0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    hist << dtos(lo + width * static_cast<double>(b)) << ','
         << dtos(b + 1 == counts.size() ? hi
                                        : lo + width *
                                                   static_cast<double>(b + 1))
         << ',' << counts[b] << "\n";
  }
  write_text_atomic(out / "histogram.csv", hist.str());

  nlohmann::ordered_json stats;
  stats["positive_fraction"] = diag.positive_fraction;
  stats["margin_min"] = lo;
  stats["margin_max"] = hi;
  stats["theta"] = sensor.theta;
  stats["sensor_s"] = sensor.location;
  write_text_atomic(out / "margin_stats.json", stats.dump(2) + "\n");

  const SensorSet candidates = make_candidates(
      grid, config.sensors.theta, config.sensors.candidate_count);
  const std::vector<SweepRow> rows = benefit_sweep(
      planning_intensity(config, grid), candidates, config.margin.sweep_k,
      config.margin.beta_list, config.environment.kernel,
      SquashParams{config.environment.beta_omega}, config.availability,
      config.margin.sweep_realizations, root.split(kTagSweep).next_u64());
  save_sweep_csv(rows, out / "sweep.csv");
  write_manifest(config, "margin");
}

void cmd_robustness(const ExperimentConfig& config) {
  const SpaceTimeGrid grid = make_grid(config.robustness.grid);
  const SplitRng root(config.seed);
  const SplitRng fixture = root.split(kTagFixture);
  const ScalarField intensity = sample_lgcp_intensity(
      grid, config.target.kernel, config.robustness.log_mean,
      fixture.split(0).next_u64());
  SplitRng omega_rng = fixture.split(1);
  const ScalarField omega =
      environment_sampler(config, grid)(omega_rng);
  const SensorSet candidates = make_candidates(
      grid, config.sensors.theta, config.robustness.sensor_count);
  const std::vector<StabilityRow> rows = stability_experiment(
      intensity, omega, candidates, config.availability,
      config.robustness.run, root.split(kTagEstimation).next_u64());

  const fs::path out(config.out_dir);
  save_stability_csv(rows, out / "stability.csv");

  std::ostringstream error_panel;
  std::ostringstream deviation_panel;
  std::ostringstream bound_panel;
  error_panel << "N,trial,max_error,eps_N\n";
  deviation_panel << "N,trial,U_deviation,C_K_eps\n";
  bound_panel << "N,trial,realized_void,stability_bound,event\n";
  for (const StabilityRow& row : rows) {
    error_panel << row.n << ',' << row.trial << ',' << dtos(row.max_error)
                << ',' << dtos(row.eps_n) << "\n";
    deviation_panel << row.n << ',' << row.trial << ','
                    << dtos(row.u_deviation) << ',' << dtos(row.c_k_eps)
                    << "\n";
    bound_panel << row.n << ',' << row.trial << ','
                << dtos(row.realized_void) << ','
                << dtos(row.stability_bound) << ','
                << (row.event_holds ? 1 : 0) << "\n";
  }
  write_text_atomic(out / "uniform_error.csv", error_panel.str());
  write_text_atomic(out / "u_deviation.csv", deviation_panel.str());
  write_text_atomic(out / "void_bound.csv", bound_panel.str());
  write_manifest(config, "robustness");
}

void run_command(const std::string& name, const ExperimentConfig& config) {
  if (name == "simulate-env") {
    cmd_simulate_env(config);
  } else if (name == "fit-intensity") {
    cmd_fit_intensity(config);
  } else if (name == "place") {
    cmd_place(config);
  } else if (name == "bounds") {
    cmd_bounds(config);
  } else if (name == "margin") {
    cmd_margin(config);
  } else if (name == "robustness") {
    cmd_robustness(config);
  } else {
    throw ConfigError("unknown command: " + name);
  }
}

}  // namespace voidplace
