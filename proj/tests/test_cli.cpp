#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "test_util.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string command =
      std::string(VOIDPLACE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

const char* kSmallConfig = R"({
  "grid": {"s_max": 10.0, "t_max": 24.0, "n_s": 16, "n_t": 4},
  "target": {"log_mean": -3.0},
  "sensors": {"candidate_count": 6},
  "planning": {"omega_draws": 4},
  "place": {"k_min": 1, "k_max": 2, "realizations": 10},
  "margin": {"scatter_cells": 20, "hist_bins": 8, "beta_list": [0.5, 4.0],
             "sweep_k": 2, "sweep_realizations": 10},
  "robustness": {"grid": {"s_max": 10.0, "t_max": 0.25, "n_s": 16, "n_t": 1},
                 "sensor_count": 4, "k": 2, "n_list": [50], "trials": 3},
  "ingest": {"samples": 2, "synthetic": true},
  "seed": 5
})";

}  // namespace

TEST_CASE("usage errors exit with the configuration status") {
  TempDir dir("cli_usage");
  CHECK(run_cli("") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("simulate-env --help") == 0);
  CHECK(run_cli("no-such-command --config x.json") == 2);
  CHECK(run_cli("place") == 2);  // --config is required
  CHECK(run_cli("place --config " + (dir.path / "absent.json").string()) == 2);

  const auto broken = dir.file("broken.json");
  write_file(broken, "{\"grid\": ");
  CHECK(run_cli("place --config " + broken.string()) == 2);

  const auto invalid = dir.file("invalid.json");
  write_file(invalid, R"({"place": {"k_min": 9, "k_max": 2}})");
  CHECK(run_cli("bounds --config " + invalid.string()) == 2);
}

TEST_CASE("unreadable data exits with the data status") {
  TempDir dir("cli_data");
  const auto config = dir.file("config.json");
  write_file(config, std::string(R"({"ingest": {"ais_csv": ")") +
                         (dir.path / "absent.csv").string() +
                         R"("}, "out_dir": ")" + dir.path.string() + "\"}");
  CHECK(run_cli("fit-intensity --config " + config.string()) == 3);
}

TEST_CASE("a full command run succeeds and respects overrides") {
  TempDir dir("cli_run");
  const auto config = dir.file("config.json");
  write_file(config, kSmallConfig);

  const auto out_a = dir.path / "a";
  CHECK(run_cli("simulate-env --config " + config.string() + " --out " +
                out_a.string()) == 0);
  CHECK(std::filesystem::exists(out_a / "z.csv"));
  CHECK(std::filesystem::exists(out_a / "omega.csv"));
  CHECK(std::filesystem::exists(out_a / "manifest.json"));

  // a rerun into the same destination reproduces every byte; the manifest
  // records the effective out_dir, so only same-destination runs compare
  const std::string z_snapshot = read_file(out_a / "z.csv");
  const std::string omega_snapshot = read_file(out_a / "omega.csv");
  const std::string manifest_snapshot = read_file(out_a / "manifest.json");
  CHECK(run_cli("simulate-env --config " + config.string() + " --out " +
                out_a.string()) == 0);
  CHECK(read_file(out_a / "z.csv") == z_snapshot);
  CHECK(read_file(out_a / "omega.csv") == omega_snapshot);
  CHECK(read_file(out_a / "manifest.json") == manifest_snapshot);

  // a different destination changes only the manifest's recorded out_dir
  const auto out_b = dir.path / "b";
  CHECK(run_cli("simulate-env --config " + config.string() + " --out " +
                out_b.string()) == 0);
  CHECK(read_file(out_b / "z.csv") == z_snapshot);
  CHECK(read_file(out_b / "omega.csv") == omega_snapshot);

  // a different seed changes the draw but still succeeds
  const auto out_c = dir.path / "c";
  CHECK(run_cli("simulate-env --config " + config.string() +
                " --seed 99 --out " + out_c.string()) == 0);
  CHECK(read_file(out_a / "z.csv") != read_file(out_c / "z.csv"));
}

TEST_CASE("the placement pipeline is reproducible end to end") {
  TempDir dir("cli_place");
  const auto config = dir.file("config.json");
  write_file(config, kSmallConfig);

  const auto out_a = dir.path / "a";
  const auto out_b = dir.path / "b";
  REQUIRE(run_cli("place --config " + config.string() + " --out " +
                  out_a.string()) == 0);
  REQUIRE(run_cli("place --config " + config.string() + " --out " +
                  out_b.string()) == 0);
  CHECK(read_file(out_a / "summary.csv") == read_file(out_b / "summary.csv"));
  CHECK(read_file(out_a / "placement_fa_aware_K2.csv") ==
        read_file(out_b / "placement_fa_aware_K2.csv"));
  CHECK(count_lines(read_file(out_a / "summary.csv")) == 1 + 4 * 2);
}
