#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ergolab/errors.hpp"
#include "ergolab/scenario.hpp"

using namespace ergolab;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "schema": "ergolab/1",
    "name": "unit",
    "phase_space": "circle",
    "grid": 64,
    "maps": [{"family": "rotation", "alpha": "phi"}],
    "tasks": [{"type": "stationary"}]
  })");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ergolab-unit-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("bundled scenarios parse and validate") {
  std::vector<std::string> names;
  for (const auto& b : bundled_scenarios()) {
    names.emplace_back(b.name);
    CHECK_NOTHROW(load_scenario(std::string(b.name)));
  }
  CHECK(names == std::vector<std::string>{"rotation-baseline", "theorem-B-torus", "two-rotations-cover",
                                          "two-sink-control"});
  // The files on disk are the same documents.
  for (const auto& n : names) {
    const auto from_file = load_scenario(std::string(ERGOLAB_SCENARIO_DIR) + "/" + n + ".json");
    CHECK(from_file.resolved == load_scenario(n).resolved);
  }
}

TEST_CASE("defaults are expanded into the resolved config") {
  const auto s = parse_scenario(base_config());
  CHECK(s.resolved["tasks"][0]["params"]["stationary_tol"] == 1e-8);
  CHECK(s.resolved["ulam"]["method"] == "auto");
  CHECK(s.resolved["probs"] == json::array({1.0}));
  CHECK(s.resolved["maps"][0]["alpha"].get<double>() == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0));
  CHECK(s.tasks[0].id == "stationary");
}

TEST_CASE("format problems are config errors") {
  auto c = base_config();
  c["extra"] = 1;
  CHECK_THROWS_AS(parse_scenario(c), ConfigError);
  c = base_config();
  c["tasks"][0]["tolerance"] = 1;
  CHECK_THROWS_AS(parse_scenario(c), ConfigError);
  c = base_config();
  c["schema"] = "ergolab/0";
  CHECK_THROWS_AS(parse_scenario(c), ConfigError);
  c = base_config();
  c["maps"][0]["alpha"] = "tau";
  CHECK_THROWS_AS(parse_scenario(c), ConfigError);
  c = base_config();
  c["tasks"][0] = {{"type", "skew-sim"}, {"trials", 4}};
  CHECK_THROWS_AS(parse_scenario(c), ConfigError);
  c = base_config();
  c["tasks"][0] = {{"type", "cover"}};
  CHECK_THROWS_AS(parse_scenario(c), ConfigError);
  c = base_config();
  c["tasks"][0] = {{"type", "cover"}, {"U", {{"rect", {{0, 0.1}, {0, 0.1}}}}}};
  CHECK_THROWS_AS(parse_scenario(c), ConfigError);
  CHECK_THROWS_AS(load_scenario("no-such-scenario"), ConfigError);
}

TEST_CASE("family and probability invariants are invariant violations") {
  auto c = base_config();
  c["maps"] = json::array({{{"family", "rotation"}, {"alpha", 0.1}}, {{"family", "rotation"}, {"alpha", 0.2}}});
  c["probs"] = {0.6, 0.6};
  CHECK_THROWS_AS(parse_scenario(c), InvariantViolation);
  c = base_config();
  c["maps"][0] = {{"family", "circle_diffeo"}, {"a", 0.0}, {"b", 1.5}};
  CHECK_THROWS_AS(parse_scenario(c), InvariantViolation);
  c = base_config();
  c["maps"][0] = {{"family", "toral_automorphism"}, {"matrix", {{2, 1}, {1, 1}}}};
  CHECK_THROWS_AS(parse_scenario(c), InvariantViolation);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(InvariantViolation("x")) == 3);
  CHECK(exit_code_for(BudgetExhausted("x")) == 4);
  CHECK(exit_code_for(NumericalFailure("x", 1.0)) == 5);
}

TEST_CASE("run_scenario: k = 1 golden rotation stationary report") {
  const auto out = scratch("stationary");
  const auto r = run_scenario(parse_scenario(base_config()), RunOptions{out});
  CHECK(r.exit_code == 0);
  const auto report = json::parse(slurp(out / "stationary.json"));
  CHECK(report["status"] == "ok");
  CHECK(report["result"]["residual"].get<double>() <= 1e-9);
  CHECK(report["result"]["tv_to_uniform"].get<double>() <= 1e-9);
  CHECK(report["config"]["tasks"][0]["params"]["max_iter"] == 2000000);
  CHECK(std::filesystem::exists(out / "stationary_measure.csv"));
  CHECK(std::filesystem::exists(out / "metadata.json"));
  const auto summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary["tasks"][0]["verdict"]["converged"] == true);
}

TEST_CASE("run_scenario: budget exhaustion keeps partial reports and later tasks") {
  auto c = base_config();
  c["grid"] = 100;
  c["maps"][0]["alpha"] = 0.25;
  c["tasks"] = json::array({{{"type", "cover"}, {"U", {{"arc", {0, 0.2}}}}, {"max_len", 6}}, {{"type", "stationary"}}});
  const auto out = scratch("budget");
  const auto r = run_scenario(parse_scenario(c), RunOptions{out});
  CHECK(r.exit_code == 4);
  const auto cover = json::parse(slurp(out / "cover.json"));
  CHECK(cover["status"] == "budget_exhausted");
  CHECK(cover["result"]["progress"].get<double>() == doctest::Approx(0.8));
  CHECK(json::parse(slurp(out / "stationary.json"))["status"] == "ok");
  CHECK(json::parse(slurp(out / "summary.json"))["status"] == "budget_exhausted");
}

TEST_CASE("run_scenario: reruns are byte-identical and thread-count independent") {
  auto c = base_config();
  c["maps"] = json::array({{{"family", "rotation"}, {"alpha", "phi"}}, {{"family", "circle_diffeo"}, {"a", 0.1}, {"b", 0.5}}});
  c["probs"] = {0.5, 0.5};
  c["tasks"] = json::array({{{"type", "stationary"}},
                            {{"type", "components"}},
                            {{"type", "skew-sim"}, {"n", 5000}, {"trials", 8}},
                            {{"type", "okk"}, {"n", 5000}, {"trials", 8}}});
  const auto s = parse_scenario(c);
  const auto a = scratch("rerun-a"), b = scratch("rerun-b");
  run_scenario(s, RunOptions{a, std::nullopt, 1});
  run_scenario(s, RunOptions{b, std::nullopt, 4});
  for (const auto& f : {"summary.json", "stationary.json", "components.json", "skew-sim.json", "okk.json",
                        "stationary_measure.csv", "skew-sim_averages.csv", "components_components.csv"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
}

TEST_CASE("duplicate task types get distinct report names") {
  auto c = base_config();
  c["tasks"] = json::array({{{"type", "stationary"}}, {{"type", "stationary"}, {"stationary_tol", 1e-10}}});
  const auto s = parse_scenario(c);
  CHECK(s.tasks[0].id == "stationary");
  CHECK(s.tasks[1].id == "stationary-2");
}
