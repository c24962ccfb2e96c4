#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kickjt/error.hpp"
#include "kickjt/parallel.hpp"
#include "kickjt/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kicked E x e Jahn-Teller model: classical map, bifurcations and quantum Floquet analysis"};
  std::vector<std::string> names;
  for (auto s : kickjt::all_subcommands()) names.emplace_back(kickjt::to_string(s));

  std::string subcommand;
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  bool check = false;
  app.add_option("subcommand", subcommand, "Analysis to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "Scenario config file")->required();
  app.add_option("--out", out_dir, "Output directory (created if missing)");
  app.add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  app.add_flag("--check", check, "Also run at N_t + 4 and report the relative deviation of every output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const auto cmd = *kickjt::parse_subcommand(subcommand);
  kickjt::ScenarioConfig cfg;
  try {
    cfg = kickjt::load_config(config_path);
  } catch (const kickjt::ConfigError& e) {
    std::cerr << config_path;
    if (e.line()) std::cerr << ':' << e.line();
    std::cerr << ": " << e.what() << '\n';
    return kExitConfig;
  }

  kickjt::set_thread_count(threads);
  try {
    const auto result = kickjt::run_scenario(cmd, cfg);
    kickjt::write_outputs(result, out_dir);
    std::cout << result.summary;
    if (check) {
      auto finer = cfg;
      finer.numerics.truncation += 4;
      const auto other = kickjt::run_scenario(cmd, finer);
      std::cout << "N_t = " << cfg.numerics.truncation << " vs " << finer.numerics.truncation << '\n'
                << kickjt::compare_results(result, other).render();
    }
  } catch (const kickjt::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCompute;
  }
  return 0;
}
