#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "voidplace/config.hpp"
#include "voidplace/experiments.hpp"
#include "voidplace/io.hpp"
#include "voidplace/version.hpp"

namespace {

struct CommandArgs {
  CLI::App* app = nullptr;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sensor placement under stochastic arrivals and false alarms"};
  app.set_version_flag("--version", voidplace::kVersion);
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate-env", "draw one environment field realization"},
      {"fit-intensity", "build the arrival intensity from AIS data or the synthetic model"},
      {"place", "run the placement policies over the budget range"},
      {"bounds", "certify greedy placements against the void-probability bounds"},
      {"margin", "filter-margin diagnostics and the penalty sweep"},
      {"robustness", "finite-sample estimation experiment"},
  };

  std::vector<CommandArgs> args(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub =
        app.add_subcommand(commands[i].first, commands[i].second);
    args[i].app = sub;
    sub->add_option("--config", args[i].config_path, "JSON config file")
        ->required();
    sub->add_option("--seed", args[i].seed, "override the config seed");
    sub->add_option("--out", args[i].out_dir, "override the output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!args[i].app->parsed()) continue;
      voidplace::ExperimentConfig config =
          voidplace::load_config(args[i].config_path);
      if (args[i].app->count("--seed") > 0) config.seed = args[i].seed;
      if (!args[i].out_dir.empty()) config.out_dir = args[i].out_dir;
      voidplace::run_command(commands[i].first, config);
      return 0;
    }
    std::cerr << "error: no command selected\n";
    return 2;
  } catch (const voidplace::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const voidplace::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
