// ergolab command-line front end: run, validate and list scenarios.
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "ergolab/errors.hpp"
#include "ergolab/scenario.hpp"

namespace {

// ERGOLAB_THREADS only sets the default; --threads always wins.
unsigned default_threads() {
  if (const char* env = std::getenv("ERGOLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid ERGOLAB_THREADS=" << env << "\n";
  }
  return 1;
}

int report_failure(const std::exception& e) {
  const int code = ergolab::exit_code_for(e);
  std::cerr << "ergolab: " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: ergodic action semigroup workbench"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run every task of a scenario and write reports");
  run->add_option("config", config, "Config file or bundled scenario name")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario's root seed");
  run->add_option("--threads", threads, "Worker threads (default: ERGOLAB_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  run->add_flag("-q,--quiet", quiet, "Do not print per-task progress");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config without running it");
  validate->add_option("config", config, "Config file or bundled scenario name")->required();

  auto* list = app.add_subcommand("list-scenarios", "List the bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ergolab::kExitParse;
  }

  if (list->parsed()) {
    for (const auto& s : ergolab::bundled_scenarios()) {
      const auto doc = nlohmann::json::parse(s.json);
      std::cout << s.name << "\t" << doc.value("description", "") << "\n";
    }
    return 0;
  }

  ergolab::Scenario scenario = [&]() -> ergolab::Scenario {
    try {
      return ergolab::load_scenario(config);
    } catch (const std::exception& e) {
      std::exit(report_failure(e));
    }
  }();

  if (validate->parsed()) {
    std::cout << scenario.resolved.dump(2) << "\n";
    return 0;
  }

  (void)run;
  ergolab::RunOptions options;
  options.out = out_dir;
  if (*seed_opt) options.seed = seed;
  options.threads = threads;
  options.verbose = !quiet;
  try {
    const auto result = ergolab::run_scenario(scenario, options);
    std::cout << result.summary["status"].get<std::string>() << ": " << (options.out / "summary.json").string()
              << "\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    return report_failure(e);
  }
}
