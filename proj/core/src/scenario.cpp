#include "ergolab/scenario.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "ergolab/errors.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/semigroup_topology.hpp"
#include "ergolab/skew_product.hpp"
#include "ergolab/stationary.hpp"

namespace ergolab {

using nlohmann::json;

namespace {

// ------------------------------------------------------------ parsing helpers

const std::map<std::string, double>& named_constants() {
  static const std::map<std::string, double> constants = {
      {"phi", (std::sqrt(5.0) - 1.0) / 2.0},
      {"sqrt2-1", std::sqrt(2.0) - 1.0},
  };
  return constants;
}

double to_number(const json& value, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& c = named_constants();
    const auto it = c.find(value.get<std::string>());
    if (it != c.end()) return it->second;
    throw ConfigError(where + ": unknown constant \"" + value.get<std::string>() + "\"");
  }
  throw ConfigError(where + ": expected a number or a named constant");
}

std::uint64_t to_unsigned(const json& value, const std::string& where) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) return value.get<std::uint64_t>();
  // Accept integral floats such as 1e6 written in exponent form.
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(where + ": expected a nonnegative integer");
}

void require_object(const json& value, const std::string& where) {
  if (!value.is_object()) throw ConfigError(where + ": expected an object");
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : object.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

const json& required(const json& object, const std::string& key, const std::string& where) {
  const auto it = object.find(key);
  if (it == object.end()) throw ConfigError(where + ": missing required key \"" + key + "\"");
  return *it;
}

json parse_map(const json& spec, PhaseSpace space, std::vector<SmoothMap>& maps, const std::string& where) {
  require_object(spec, where);
  const auto family = required(spec, "family", where);
  if (!family.is_string()) throw ConfigError(where + ".family: expected a string");
  const std::string name = family.get<std::string>();
  json resolved = {{"family", name}};
  if (name == "rotation") {
    reject_unknown(spec, {"family", "alpha"}, where);
    const double alpha = to_number(required(spec, "alpha", where), where + ".alpha");
    maps.emplace_back(Rotation{alpha});
    resolved["alpha"] = alpha;
  } else if (name == "circle_diffeo") {
    reject_unknown(spec, {"family", "a", "b", "amplitude", "mode"}, where);
    const double a = spec.contains("a") ? to_number(spec["a"], where + ".a") : 0.0;
    const std::uint64_t mode = spec.contains("mode") ? to_unsigned(spec["mode"], where + ".mode") : 1;
    if (mode < 1 || mode > 1024) throw InvariantViolation(where + ".mode: harmonic must lie in [1, 1024]");
    if (spec.contains("b") == spec.contains("amplitude")) {
      throw ConfigError(where + ": give exactly one of \"b\" or \"amplitude\"");
    }
    // amplitude c means x + a + c sin(2 pi m x), i.e. b = 2 pi m c.
    const double b = spec.contains("b")
                         ? to_number(spec["b"], where + ".b")
                         : 2.0 * std::numbers::pi * static_cast<double>(mode) *
                               to_number(spec["amplitude"], where + ".amplitude");
    maps.emplace_back(CircleDiffeo{a, b, static_cast<int>(mode)});
    resolved["a"] = a;
    resolved["b"] = b;
    resolved["mode"] = mode;
  } else if (name == "toral_automorphism") {
    reject_unknown(spec, {"family", "matrix"}, where);
    const auto& m = required(spec, "matrix", where);
    if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 ||
        m[1].size() != 2) {
      throw ConfigError(where + ".matrix: expected [[l11, l12], [l21, l22]]");
    }
    std::array<std::int64_t, 4> entries{};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& e = m[i / 2][i % 2];
      if (!e.is_number_integer()) throw ConfigError(where + ".matrix: entries must be integers");
      entries[i] = e.get<std::int64_t>();
    }
    maps.emplace_back(ToralAutomorphism{entries});
    resolved["matrix"] = {{entries[0], entries[1]}, {entries[2], entries[3]}};
  } else if (name == "toral_translation") {
    reject_unknown(spec, {"family", "v"}, where);
    const auto& v = required(spec, "v", where);
    if (!v.is_array() || v.size() != 2) throw ConfigError(where + ".v: expected [v1, v2]");
    const double v1 = to_number(v[0], where + ".v[0]");
    const double v2 = to_number(v[1], where + ".v[1]");
    maps.emplace_back(ToralTranslation{v1, v2});
    resolved["v"] = {v1, v2};
  } else {
    throw ConfigError(where + ".family: unknown family \"" + name + "\"");
  }
  if (maps.back().space() != space) {
    throw InvariantViolation(where + ": family " + name + " does not act on the " + std::string(to_string(space)));
  }
  return resolved;
}

BoxSet parse_boxset(const json& spec, const Grid& grid, const std::string& where) {
  if (spec.is_string() && spec.get<std::string>() == "all") return BoxSet::all(grid);
  if (!spec.is_object() || spec.size() != 1) {
    throw ConfigError(where + ": expected \"all\", {\"arc\": [a, b]}, {\"rect\": [[x0, x1], [y0, y1]]} or "
                              "{\"boxes\": [...]}");
  }
  const auto& [kind, value] = *spec.items().begin();
  if (kind == "arc") {
    if (grid.space() != PhaseSpace::Circle) throw ConfigError(where + ": arc sets need a circle scenario");
    if (!value.is_array() || value.size() != 2) throw ConfigError(where + ".arc: expected [a, b]");
    return BoxSet::arc(grid, to_number(value[0], where), to_number(value[1], where));
  }
  if (kind == "rect") {
    if (grid.space() != PhaseSpace::Torus2) throw ConfigError(where + ": rect sets need a torus scenario");
    if (!value.is_array() || value.size() != 2 || !value[0].is_array() || !value[1].is_array() ||
        value[0].size() != 2 || value[1].size() != 2) {
      throw ConfigError(where + ".rect: expected [[x0, x1], [y0, y1]]");
    }
    return BoxSet::rect(grid, to_number(value[0][0], where), to_number(value[0][1], where),
                        to_number(value[1][0], where), to_number(value[1][1], where));
  }
  if (kind == "boxes") {
    if (!value.is_array()) throw ConfigError(where + ".boxes: expected an array of box indices");
    std::vector<std::size_t> boxes;
    for (const auto& b : value) {
      const auto i = to_unsigned(b, where + ".boxes");
      if (i >= grid.box_count()) throw ConfigError(where + ".boxes: index out of range");
      boxes.push_back(static_cast<std::size_t>(i));
    }
    return BoxSet(grid, std::move(boxes));
  }
  throw ConfigError(where + ": unknown box set kind \"" + kind + "\"");
}

std::vector<std::size_t> parse_cylinder(const json& spec, std::size_t k, const std::string& where) {
  if (!spec.is_array()) throw ConfigError(where + ": expected a list of 1-based symbols");
  std::vector<std::size_t> out;
  for (const auto& s : spec) {
    const auto v = to_unsigned(s, where);
    if (v < 1 || v > k) throw ConfigError(where + ": symbol out of range 1.." + std::to_string(k));
    out.push_back(static_cast<std::size_t>(v - 1));
  }
  return out;
}

// ------------------------------------------------------------ task defaults

json stationary_defaults() { return {{"stationary_tol", 1e-8}, {"max_iter", 2000000}}; }

json ergodicity_defaults() {
  return {{"n", 1000000}, {"trials", 32}, {"tol", 0.02}, {"burn_in", 0}, {"start", "auto"}, {"observables", "default"}};
}

json merge(json a, const json& b) {
  for (const auto& [k, v] : b.items()) a[k] = v;
  return a;
}

json minimality_defaults() {
  return {{"direction", "forward"}, {"eps", 0.05}, {"max_len", 40},          {"sample", 16},
          {"mode", "greedy"},       {"grid_centers", true}, {"word_cap", 4194304}};
}

json okk_defaults() {
  return merge(merge(stationary_defaults(), ergodicity_defaults()),
               {{"support_tol", 1e-10}, {"mass_margin", 0.05}, {"score_tol", 0.0}, {"max_subset_components", 12}});
}

// Keys whose values are validated by the task itself rather than by type.
bool free_form(const std::string& key) {
  return key == "U" || key == "W" || key == "C" || key == "C2" || key == "test_sets" || key == "observables" ||
         key == "minimality";
}

}  // namespace

const json& task_defaults() {
  static const json defaults = {
      {"stationary", merge(stationary_defaults(), {{"positivity_block", 1}, {"null_tol", 1e-10},
                                                   {"quasi_eps", 1e-12}, {"write_matrix", false}})},
      {"components",
       merge(stationary_defaults(), {{"support_tol", 1e-10}, {"test_sets", json::array()}})},
      {"minimality", minimality_defaults()},
      {"cover", {{"U", nullptr}, {"max_len", 12}, {"max_words", 4096}}},
      {"witness", {{"U", nullptr}, {"W", nullptr}, {"max_len", 20}, {"C", nullptr}, {"C2", nullptr}}},
      {"skew-sim", merge(stationary_defaults(), ergodicity_defaults())},
      {"okk", okk_defaults()},
      {"sweep", merge(okk_defaults(), {{"delta", 1e-3}, {"samples", 20}, {"minimality", nullptr},
                                       {"quasi_eps", 1e-12}})},
  };
  return defaults;
}

namespace {

json resolve_task_params(const std::string& type, const json& given, const std::string& where) {
  const auto& all = task_defaults();
  const auto it = all.find(type);
  if (it == all.end()) throw ConfigError(where + ".type: unknown task type \"" + type + "\"");
  json params = *it;
  for (const auto& [key, value] : given.items()) {
    if (!params.contains(key)) throw ConfigError(where + ": unknown key \"" + key + "\" for task type " + type);
    const json& d = params[key];
    const std::string at = where + "." + key;
    if (free_form(key)) {
      params[key] = value;
    } else if (d.is_boolean()) {
      if (!value.is_boolean()) throw ConfigError(at + ": expected true or false");
      params[key] = value;
    } else if (d.is_string()) {
      if (!value.is_string()) throw ConfigError(at + ": expected a string");
      params[key] = value;
    } else if (d.is_number_integer()) {
      params[key] = to_unsigned(value, at);
    } else if (d.is_number()) {
      params[key] = to_number(value, at);
    } else {
      params[key] = value;
    }
  }
  if (type == "minimality" || (type == "sweep" && params["minimality"].is_object())) {
    json& m = type == "minimality" ? params : params["minimality"];
    if (type == "sweep") m = resolve_task_params("minimality", m, where + ".minimality");
    const auto dir = m["direction"].get<std::string>();
    const auto mode = m["mode"].get<std::string>();
    if (dir != "forward" && dir != "inverse") throw ConfigError(where + ".direction: forward or inverse");
    if (mode != "greedy" && mode != "exhaustive") throw ConfigError(where + ".mode: greedy or exhaustive");
    if (!(m["eps"].get<double>() > 0.0)) throw ConfigError(where + ".eps: must be positive");
    if (m["max_len"].get<std::uint64_t>() < 1) throw ConfigError(where + ".max_len: must be >= 1");
    if (m["sample"].get<std::uint64_t>() < 1) throw ConfigError(where + ".sample: must be >= 1");
  } else if (type == "sweep" && !params["minimality"].is_null()) {
    throw ConfigError(where + ".minimality: expected null or an object of minimality parameters");
  }
  if (params.contains("trials")) {
    if (params["trials"].get<std::uint64_t>() < 8) throw ConfigError(where + ".trials: at least 8 required");
    if (params["n"].get<std::uint64_t>() < 1) throw ConfigError(where + ".n: must be >= 1");
    const auto start = params["start"].get<std::string>();
    if (start != "auto" && start != "volume" && start != "stationary") {
      throw ConfigError(where + ".start: auto, volume or stationary");
    }
  }
  if (params.contains("stationary_tol") && !(params["stationary_tol"].get<double>() > 0.0)) {
    throw ConfigError(where + ".stationary_tol: must be positive");
  }
  if (params.contains("U") && params["U"].is_null()) throw ConfigError(where + ": missing required key \"U\"");
  if (params.contains("W") && params["W"].is_null()) throw ConfigError(where + ": missing required key \"W\"");
  if (params.contains("C") && params["C"].is_null() != params["C2"].is_null()) {
    throw ConfigError(where + ": give both C and C2 or neither");
  }
  if (type == "sweep" && !(params["delta"].get<double>() >= 0.0)) {
    throw ConfigError(where + ".delta: must be nonnegative");
  }
  if (type == "cover" && params["max_len"].get<std::uint64_t>() < 1) throw ConfigError(where + ".max_len: >= 1");
  return params;
}

// ------------------------------------------------------------ JSON views

json point_json(const Point& p) {
  return p.space == PhaseSpace::Circle ? json::array({p.x}) : json::array({p.x, p.y});
}

json symbols_json(std::span<const std::size_t> symbols) {
  json out = json::array();
  for (auto s : symbols) out.push_back(s + 1);
  return out;
}

json word_json(const Word& w) { return symbols_json(w.symbols()); }

json boxes_json(const BoxSet& set) { return json(std::vector<std::size_t>(set.boxes().begin(), set.boxes().end())); }

json outcome_json(const PipelineOutcome& o) {
  return {{"stationary_converged", o.stationary_converged},
          {"residual", o.residual},
          {"components", o.components},
          {"minimal", o.minimal ? json(*o.minimal) : json(nullptr)},
          {"ergodic", o.ergodic},
          {"semigroup_ergodic", o.semigroup_ergodic},
          {"okk_agree", o.okk_agree},
          {"quasi_invariant_forward", o.quasi_invariant_forward},
          {"quasi_invariant_inverse", o.quasi_invariant_inverse}};
}

json stats_json(const ErgodicityVerdict& v) {
  json stats = json::array();
  for (const auto& s : v.stats) {
    stats.push_back({{"observable", s.name},
                     {"mean", s.mean},
                     {"stddev", s.stddev},
                     {"reference", s.reference},
                     {"passed", s.passed}});
  }
  return stats;
}

// ------------------------------------------------------------ execution

struct TaskOutput {
  json result;
  json verdict;
  std::vector<std::string> files;
};

class Runner {
 public:
  Runner(const Scenario& scenario, const RunOptions& options, std::uint64_t seed)
      : s_(scenario), opt_(options) {
    const json& u = scenario.resolved["ulam"];
    const auto method = u["method"].get<std::string>();
    const std::uint64_t ulam_seed = derive_seed(seed, 1);
    if (method == "exact") {
      method_ = UlamMethod::exact();
    } else if (method == "sampling") {
      method_ = UlamMethod::sampling(u["samples"].get<std::size_t>(), ulam_seed);
    } else {
      method_ = UlamMethod::default_for(scenario.grid.space(), ulam_seed);
      if (method_.kind == UlamMethod::Kind::Sampling) method_.samples = u["samples"].get<std::size_t>();
    }
  }

  TaskOutput run(const TaskSpec& task, std::uint64_t task_seed) {
    const json& p = task.params;
    if (task.type == "stationary") return stationary(task, p);
    if (task.type == "components") return components(task, p);
    if (task.type == "minimality") return minimality(p, task_seed);
    if (task.type == "cover") return cover(task, p);
    if (task.type == "witness") return witness(p);
    if (task.type == "skew-sim") return skew_sim(task, p, task_seed);
    if (task.type == "okk") return okk(p, task_seed);
    if (task.type == "sweep") return sweep(task, p, task_seed);
    throw ConfigError("unknown task type " + task.type);
  }

 private:
  const UlamMatrix& annealed() {
    if (!annealed_) annealed_ = annealed_matrix(s_.ifs, s_.grid, method_, opt_.threads);
    return *annealed_;
  }

  const std::vector<UlamMatrix>& parts() {
    if (parts_.empty()) {
      for (std::size_t k = 0; k < s_.ifs.size(); ++k) {
        UlamMethod m = method_;
        m.seed = derive_seed(method_.seed, 1000003 + k);
        parts_.push_back(ulam_matrix(s_.ifs.map(k), s_.grid, m, opt_.threads));
      }
    }
    return parts_;
  }

  // Later tasks reuse the stationary measure of earlier ones when the
  // solver settings match.
  const StationaryResult& stationary_result(const json& p) {
    const StationaryOptions o{p["stationary_tol"].get<double>(), p["max_iter"].get<std::size_t>()};
    const auto key = std::make_pair(o.tol, o.max_iter);
    auto it = stationary_cache_.find(key);
    if (it == stationary_cache_.end()) it = stationary_cache_.emplace(key, stationary_measure(annealed(), o)).first;
    return it->second;
  }

  std::filesystem::path side_file(const TaskSpec& task, const std::string& suffix, std::vector<std::string>& files) {
    const std::string name = task.id + "_" + suffix + ".csv";
    files.push_back(name);
    return opt_.out / name;
  }

  std::vector<Observable> observables(const json& spec) {
    if (spec.is_string() && spec.get<std::string>() == "default") return default_observables(s_.grid);
    if (!spec.is_array()) throw ConfigError("observables: expected \"default\" or a list");
    std::vector<Observable> out;
    for (const auto& o : spec) {
      if (o.is_string()) {
        const auto name = o.get<std::string>();
        if (name == "cos_x") {
          out.push_back(Observable::cos_x());
        } else if (name == "sin_x") {
          out.push_back(Observable::sin_x());
        } else if (name == "cos_cos" && s_.grid.space() == PhaseSpace::Torus2) {
          out.push_back(Observable::cos_cos());
        } else {
          throw ConfigError("observables: unknown observable \"" + name + "\"");
        }
      } else if (o.is_object() && o.contains("indicator")) {
        reject_unknown(o, {"indicator", "name"}, "observables");
        const std::string name = o.contains("name") ? o["name"].get<std::string>() : o["indicator"].dump();
        out.push_back(Observable::indicator(parse_boxset(o["indicator"], s_.grid, "observables"), name));
      } else {
        throw ConfigError("observables: expected a name or {\"indicator\": set}");
      }
    }
    if (out.empty()) throw ConfigError("observables: list is empty");
    return out;
  }

  ErgodicityOptions ergodicity_options(const json& p, std::uint64_t seed, const GridMeasure* stationary) {
    ErgodicityOptions e;
    e.n = p["n"].get<std::size_t>();
    e.trials = p["trials"].get<std::size_t>();
    e.tol = p["tol"].get<double>();
    e.burn_in = p["burn_in"].get<std::size_t>();
    e.seed = seed;
    e.threads = opt_.threads;
    const auto start = p["start"].get<std::string>();
    const bool use_volume = start == "volume" || (start == "auto" && s_.ifs.volume_preserving());
    if (!use_volume) e.start = stationary ? *stationary : stationary_result(p).measure;
    return e;
  }

  OkkOptions okk_options(const json& p, std::uint64_t seed) {
    OkkOptions o;
    o.stationary = {p["stationary_tol"].get<double>(), p["max_iter"].get<std::size_t>()};
    o.method = method_;
    o.support_tol = p["support_tol"].get<double>();
    o.mass_margin = p["mass_margin"].get<double>();
    o.score_tol = p["score_tol"].get<double>();
    o.max_subset_components = p["max_subset_components"].get<std::size_t>();
    o.ergodicity.n = p["n"].get<std::size_t>();
    o.ergodicity.trials = p["trials"].get<std::size_t>();
    o.ergodicity.tol = p["tol"].get<double>();
    o.ergodicity.burn_in = p["burn_in"].get<std::size_t>();
    o.ergodicity.seed = seed;
    o.observables = observables(p["observables"]);
    o.threads = opt_.threads;
    return o;
  }

  MinimalityOptions minimality_options(const json& p, std::uint64_t seed) {
    MinimalityOptions m;
    m.direction = p["direction"].get<std::string>() == "inverse" ? Direction::Inverse : Direction::Forward;
    m.eps = p["eps"].get<double>();
    m.max_len = p["max_len"].get<std::size_t>();
    m.sample = p["sample"].get<std::size_t>();
    m.seed = seed;
    m.mode = p["mode"].get<std::string>() == "exhaustive" ? SearchMode::Exhaustive : SearchMode::Greedy;
    if (p["grid_centers"].get<bool>()) m.grid = s_.grid;
    m.word_cap = p["word_cap"].get<std::size_t>();
    m.threads = opt_.threads;
    return m;
  }

  TaskOutput stationary(const TaskSpec& task, const json& p) {
    const auto& st = stationary_result(p);
    TaskOutput out;
    const auto uniform = GridMeasure::uniform(s_.grid);
    const auto pos = open_positivity_check(st.measure, p["positivity_block"].get<std::size_t>(),
                                           p["null_tol"].get<double>());
    const double eps = p["quasi_eps"].get<double>();
    bool qi_forward = true, qi_inverse = true;
    for (const auto& m : s_.ifs.maps()) {
      qi_forward = qi_forward && quasi_invariance_check(st.measure, ulam_matrix(m, s_.grid, method_), eps).quasi_invariant;
      qi_inverse = qi_inverse &&
                   quasi_invariance_check(st.measure, ulam_matrix(m.inverse(), s_.grid, method_), eps).quasi_invariant;
    }
    out.result = {{"converged", st.converged},
                  {"residual", st.residual},
                  {"iterations", st.iterations},
                  {"estimator", st.estimator},
                  {"tv_to_uniform", tv_distance(st.measure, uniform)},
                  {"matrix_nonzeros", annealed().nonzeros()},
                  {"matrix_provenance", annealed().provenance()},
                  {"open_positivity",
                   {{"positive", pos.positive},
                    {"block", pos.block},
                    {"largest_null_extent", pos.largest_null_extent},
                    {"largest_null_start", pos.largest_null_start}}},
                  {"quasi_invariant_forward", qi_forward},
                  {"quasi_invariant_inverse", qi_inverse}};
    out.verdict = {{"converged", st.converged}, {"residual", st.residual}};
    {
      std::ofstream f(side_file(task, "measure", out.files));
      write_csv(f, st.measure);
    }
    if (p["write_matrix"].get<bool>()) {
      std::ofstream f(side_file(task, "matrix", out.files));
      write_csv(f, annealed());
    }
    return out;
  }

  TaskOutput components(const TaskSpec& task, const json& p) {
    const auto& st = stationary_result(p);
    const auto dec = decompose_support(annealed(), st.measure, p["support_tol"].get<double>());
    TaskOutput out;
    json comps = json::array();
    for (const auto& c : dec.components) {
      const auto open = component_is_open_mod0(c);
      comps.push_back({{"boxes", boxes_json(c)},
                       {"size", c.size()},
                       {"mass", st.measure.mass(c)},
                       {"open_mod0",
                        {{"grid_open", open.grid_open},
                         {"boundary_fraction", open.boundary_fraction},
                         {"threshold", open.threshold}}}});
    }
    const bool whole = dec.components.size() == 1 && dec.components.front().size() == s_.grid.box_count();
    json tests = json::array();
    if (!p["test_sets"].is_array()) throw ConfigError("components.test_sets: expected a list of box sets");
    for (const auto& spec : p["test_sets"]) {
      const auto a = parse_boxset(spec, s_.grid, "components.test_sets");
      tests.push_back({{"set", spec},
                       {"mass", st.measure.mass(a)},
                       {"score", symmetric_difference_score(parts(), st.measure, a)},
                       {"score_tol", 2.0 / static_cast<double>(s_.grid.resolution())}});
    }
    out.result = {{"stationary_converged", st.converged},
                  {"count", dec.components.size()},
                  {"whole_space", whole},
                  {"components", comps},
                  {"transient_boxes", dec.transient},
                  {"test_sets", tests}};
    out.verdict = {{"count", dec.components.size()}, {"whole_space", whole}};
    std::ofstream f(side_file(task, "components", out.files));
    f << "box,component\n";
    for (std::size_t c = 0; c < dec.components.size(); ++c) {
      for (auto b : dec.components[c].boxes()) f << b << ',' << c + 1 << '\n';
    }
    return out;
  }

  TaskOutput minimality(const json& p, std::uint64_t seed) {
    const auto v = minimality_check(s_.ifs, minimality_options(p, seed));
    TaskOutput out;
    out.result = {{"minimal", v.minimal},
                  {"certified_negative", v.certified_negative},
                  {"worst_point", point_json(v.worst_point)},
                  {"worst_radius", v.worst_radius},
                  {"starts_tested", v.starts_tested}};
    out.verdict = {{"minimal", v.minimal}, {"worst_radius", v.worst_radius}};
    return out;
  }

  TaskOutput cover(const TaskSpec& task, const json& p) {
    const auto u = parse_boxset(p["U"], s_.grid, "cover.U");
    const auto c = finite_cover(s_.ifs, u, p["max_len"].get<std::size_t>(), p["max_words"].get<std::size_t>());
    TaskOutput out;
    json words = json::array(), images = json::array();
    std::vector<bool> covered(s_.grid.box_count(), false);
    for (std::size_t i = 0; i < c.words.size(); ++i) {
      words.push_back(word_json(c.words[i]));
      images.push_back(boxes_json(c.images[i]));
      for (auto b : c.images[i].boxes()) covered[b] = true;
    }
    const auto covered_count = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
    out.result = {{"m", c.words.size()},
                  {"words", words},
                  {"images", images},
                  {"covered_boxes", covered_count},
                  {"total_boxes", s_.grid.box_count()},
                  {"verified", covered_count == s_.grid.box_count()},
                  {"candidates_examined", c.candidates_examined}};
    out.verdict = {{"m", c.words.size()}, {"verified", covered_count == s_.grid.box_count()}};
    std::ofstream f(side_file(task, "cover", out.files));
    f << "box,first_word\n";
    for (std::size_t b = 0; b < s_.grid.box_count(); ++b) {
      for (std::size_t i = 0; i < c.images.size(); ++i) {
        if (c.images[i].contains(b)) {
          f << b << ',' << i + 1 << '\n';
          break;
        }
      }
    }
    return out;
  }

  TaskOutput witness(const json& p) {
    const auto u = parse_boxset(p["U"], s_.grid, "witness.U");
    const auto w = parse_boxset(p["W"], s_.grid, "witness.W");
    const auto max_len = p["max_len"].get<std::size_t>();
    TaskOutput out;
    const auto hit = strong_transitivity_witness(s_.ifs, u, w, max_len);
    out.result["witness"] = {{"word", word_json(hit.word)},
                             {"length", hit.word.size()},
                             {"start", point_json(hit.start)},
                             {"landing", point_json(hit.landing)}};
    out.verdict = {{"found", true}, {"length", hit.word.size()}};
    if (!p["C"].is_null()) {
      const Cylinder c{parse_cylinder(p["C"], s_.ifs.size(), "witness.C")};
      const Cylinder c2{parse_cylinder(p["C2"], s_.ifs.size(), "witness.C2")};
      const auto t = skew_transitivity_word(s_.ifs, c, u, c2, w, max_len);
      out.result["skew_transitivity"] = {{"rho", symbols_json(t.rho)},
                                         {"steps", t.steps},
                                         {"connecting", word_json(t.connecting)},
                                         {"start", point_json(t.start)},
                                         {"landing", point_json(t.landing)},
                                         {"verified", true}};
      out.verdict["rho_verified"] = true;
    }
    return out;
  }

  TaskOutput skew_sim(const TaskSpec& task, const json& p, std::uint64_t seed) {
    const auto obs = observables(p["observables"]);
    const auto e = ergodicity_options(p, seed, nullptr);
    const auto v = ergodicity_verdict(s_.ifs, obs, e);
    TaskOutput out;
    out.result = {{"verdict", verdict_label(v.consistent)},
                  {"consistent", v.consistent},
                  {"separating_observable", v.separating_observable ? json(*v.separating_observable) : json(nullptr)},
                  {"start_law", e.start ? "stationary" : "volume"},
                  {"stats", stats_json(v)}};
    out.verdict = {{"verdict", verdict_label(v.consistent)}};
    std::ofstream f(side_file(task, "averages", out.files));
    f << "trial,observable,average\n" << std::setprecision(17);
    for (std::size_t t = 0; t < v.averages.size(); ++t) {
      for (std::size_t k = 0; k < obs.size(); ++k) f << t << ',' << obs[k].name() << ',' << v.averages[t][k] << '\n';
    }
    return out;
  }

  TaskOutput okk(const json& p, std::uint64_t seed) {
    const auto r = okk_equivalence_check(s_.ifs, s_.grid, okk_options(p, seed));
    TaskOutput out;
    json best = nullptr;
    if (r.best_candidate) {
      best = {{"boxes", boxes_json(r.best_candidate->set)},
              {"mass", r.best_candidate->mass},
              {"score", r.best_candidate->score}};
    }
    out.result = {{"stationary_converged", r.stationary.converged},
                  {"stationary_residual", r.stationary.residual},
                  {"component_count", r.component_count},
                  {"transient_count", r.transient_count},
                  {"candidates_tested", r.candidates_tested},
                  {"score_tol", r.score_tol},
                  {"best_candidate", best},
                  {"semigroup_ergodic", r.semigroup_ergodic},
                  {"skew_verdict", verdict_label(r.skew.consistent)},
                  {"skew_ergodic", r.skew_ergodic},
                  {"skew_stats", stats_json(r.skew)},
                  {"inconclusive", r.inconclusive},
                  {"agree", r.agree}};
    out.verdict = {{"agree", r.agree},
                   {"inconclusive", r.inconclusive},
                   {"semigroup_ergodic", r.semigroup_ergodic},
                   {"skew_ergodic", r.skew_ergodic}};
    return out;
  }

  TaskOutput sweep(const TaskSpec& task, const json& p, std::uint64_t seed) {
    PipelineSpec spec{s_.grid, okk_options(p, derive_seed(seed, 1)), std::nullopt, p["quasi_eps"].get<double>()};
    if (p["minimality"].is_object()) spec.minimality = minimality_options(p["minimality"], derive_seed(seed, 2));
    const auto r = robustness_sweep(s_.ifs, spec, p["delta"].get<double>(), p["samples"].get<std::size_t>(),
                                    derive_seed(seed, 3), opt_.threads);
    TaskOutput out;
    json samples = json::array();
    std::size_t failures = 0;
    for (const auto& s : r.samples) {
      failures += s.outcome ? 0 : 1;
      samples.push_back({{"maps", s.maps},
                         {"outcome", s.outcome ? outcome_json(*s.outcome) : json(nullptr)},
                         {"error", s.error.empty() ? json(nullptr) : json(s.error)}});
    }
    const json survival = {{"stationarity", r.stationarity_survival},
                           {"components", r.component_survival},
                           {"minimality", r.minimality_survival},
                           {"ergodicity", r.ergodicity_survival}};
    out.result = {{"baseline", outcome_json(r.baseline)},
                  {"survival", survival},
                  {"failed_samples", failures},
                  {"samples", samples}};
    out.verdict = {{"baseline_ergodic", r.baseline.ergodic}, {"survival", survival}};
    std::ofstream f(side_file(task, "samples", out.files));
    f << "sample,converged,residual,components,minimal,ergodic,okk_agree,error\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      const auto& s = r.samples[i];
      f << i << ',';
      if (s.outcome) {
        const auto& o = *s.outcome;
        f << o.stationary_converged << ',' << o.residual << ',' << o.components << ','
          << (o.minimal ? (*o.minimal ? "1" : "0") : "") << ',' << o.ergodic << ',' << o.okk_agree << ",\n";
      } else {
        f << ",,,,,,\"" << s.error << "\"\n";
      }
    }
    return out;
  }

  const Scenario& s_;
  const RunOptions& opt_;
  UlamMethod method_;
  std::optional<UlamMatrix> annealed_;
  std::vector<UlamMatrix> parts_;
  std::map<std::pair<double, std::size_t>, StationaryResult> stationary_cache_;
};

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << doc.dump(2) << '\n';
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

// ------------------------------------------------------------ public API

Scenario parse_scenario(const json& config) {
  require_object(config, "config");
  reject_unknown(config, {"schema", "name", "description", "phase_space", "maps", "probs", "grid", "seed", "ulam",
                          "tasks"},
                 "config");
  const auto& schema = required(config, "schema", "config");
  if (!schema.is_string() || schema.get<std::string>() != kSchemaVersion) {
    throw ConfigError("config.schema: expected \"" + std::string(kSchemaVersion) + "\"");
  }
  const auto& name = required(config, "name", "config");
  if (!name.is_string() || name.get<std::string>().empty()) throw ConfigError("config.name: nonempty string");
  std::string description;
  if (config.contains("description")) {
    if (!config["description"].is_string()) throw ConfigError("config.description: expected a string");
    description = config["description"].get<std::string>();
  }

  const auto& space_name = required(config, "phase_space", "config");
  if (!space_name.is_string()) throw ConfigError("config.phase_space: expected a string");
  PhaseSpace space;
  if (space_name == "circle") {
    space = PhaseSpace::Circle;
  } else if (space_name == "torus") {
    space = PhaseSpace::Torus2;
  } else {
    throw ConfigError("config.phase_space: circle or torus");
  }

  const auto& grid_n = required(config, "grid", "config");
  const auto n = to_unsigned(grid_n, "config.grid");
  if (n < 2 || n > 4096) throw ConfigError("config.grid: resolution must lie in [2, 4096]");

  const auto& map_specs = required(config, "maps", "config");
  if (!map_specs.is_array() || map_specs.empty()) throw ConfigError("config.maps: expected a nonempty list");
  std::vector<SmoothMap> maps;
  json resolved_maps = json::array();
  for (std::size_t i = 0; i < map_specs.size(); ++i) {
    resolved_maps.push_back(parse_map(map_specs[i], space, maps, "config.maps[" + std::to_string(i) + "]"));
  }

  std::vector<double> probs;
  if (config.contains("probs")) {
    if (!config["probs"].is_array()) throw ConfigError("config.probs: expected a list of numbers");
    for (const auto& p : config["probs"]) probs.push_back(to_number(p, "config.probs"));
  } else {
    probs.assign(maps.size(), 1.0 / static_cast<double>(maps.size()));
  }

  const std::uint64_t seed = config.contains("seed") ? to_unsigned(config["seed"], "config.seed") : 0;

  json ulam = {{"method", "auto"}, {"samples", 64}};
  if (config.contains("ulam")) {
    require_object(config["ulam"], "config.ulam");
    reject_unknown(config["ulam"], {"method", "samples"}, "config.ulam");
    if (config["ulam"].contains("method")) {
      const auto& m = config["ulam"]["method"];
      if (!m.is_string() || (m != "auto" && m != "exact" && m != "sampling")) {
        throw ConfigError("config.ulam.method: auto, exact or sampling");
      }
      ulam["method"] = m;
    }
    if (config["ulam"].contains("samples")) ulam["samples"] = to_unsigned(config["ulam"]["samples"], "config.ulam");
  }
  const auto samples = ulam["samples"].get<std::uint64_t>();
  if (samples < 16) throw ConfigError("config.ulam.samples: at least 16 points per box");
  if (space == PhaseSpace::Torus2) {
    const auto q = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(samples))));
    if (q * q != samples) throw ConfigError("config.ulam.samples: must be a perfect square on the torus");
  }

  const auto& task_specs = required(config, "tasks", "config");
  if (!task_specs.is_array() || task_specs.empty()) throw ConfigError("config.tasks: expected a nonempty list");
  std::vector<TaskSpec> tasks;
  std::map<std::string, int> id_counts;
  json resolved_tasks = json::array();
  for (std::size_t i = 0; i < task_specs.size(); ++i) {
    const std::string where = "config.tasks[" + std::to_string(i) + "]";
    const auto& t = task_specs[i];
    require_object(t, where);
    const auto& type = required(t, "type", where);
    if (!type.is_string()) throw ConfigError(where + ".type: expected a string");
    json given = t;
    given.erase("type");
    std::string id = type.get<std::string>();
    if (given.contains("id")) {
      if (!given["id"].is_string() || given["id"].get<std::string>().empty()) {
        throw ConfigError(where + ".id: nonempty string");
      }
      id = given["id"].get<std::string>();
      given.erase("id");
    }
    for (char ch : id) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_')) {
        throw ConfigError(where + ".id: only letters, digits, '-' and '_' are allowed");
      }
    }
    if (id == "summary" || id == "metadata") throw ConfigError(where + ".id: reserved name");
    if (++id_counts[id] > 1) id += "-" + std::to_string(id_counts[id]);
    TaskSpec task{id, type.get<std::string>(), resolve_task_params(type.get<std::string>(), given, where)};
    resolved_tasks.push_back({{"id", task.id}, {"type", task.type}, {"params", task.params}});
    tasks.push_back(std::move(task));
  }

  // Family and probability invariants are checked here, before any work.
  IFSystem ifs(space, std::move(maps), probs);
  Grid grid(space, static_cast<std::size_t>(n));

  // Box sets and cylinders are validated eagerly too.
  for (const auto& t : tasks) {
    for (const char* key : {"U", "W"}) {
      if (t.params.contains(key)) parse_boxset(t.params[key], grid, t.id + "." + key);
    }
    if (t.params.contains("C") && !t.params["C"].is_null()) {
      parse_cylinder(t.params["C"], ifs.size(), t.id + ".C");
      parse_cylinder(t.params["C2"], ifs.size(), t.id + ".C2");
    }
    if (t.params.contains("test_sets")) {
      if (!t.params["test_sets"].is_array()) throw ConfigError(t.id + ".test_sets: expected a list");
      for (const auto& s : t.params["test_sets"]) parse_boxset(s, grid, t.id + ".test_sets");
    }
  }

  json resolved = {{"schema", kSchemaVersion},
                   {"name", name},
                   {"description", description},
                   {"phase_space", space_name},
                   {"grid", n},
                   {"maps", resolved_maps},
                   {"probs", probs},
                   {"seed", seed},
                   {"ulam", ulam},
                   {"tasks", resolved_tasks}};
  return Scenario{name.get<std::string>(), description, std::move(ifs), grid, seed, std::move(tasks),
                  std::move(resolved)};
}

Scenario load_scenario(const std::string& source) {
  std::string text;
  if (std::filesystem::exists(source)) {
    std::ifstream f(source);
    if (!f) throw ConfigError("cannot read " + source);
    std::ostringstream s;
    s << f.rdbuf();
    text = s.str();
  } else {
    for (const auto& b : bundled_scenarios()) {
      if (b.name == source) text = b.json;
    }
    if (text.empty()) throw ConfigError("no such config file or bundled scenario: " + source);
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return parse_scenario(doc);
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  const std::uint64_t seed = options.seed.value_or(scenario.seed);
  json config = scenario.resolved;
  config["seed"] = seed;

  std::filesystem::create_directories(options.out);
  RunResult run;
  Runner runner(scenario, options, seed);
  json task_summaries = json::array();
  json timings = json::object();
  const std::string started = utc_now();

  std::string status = "completed";
  for (std::size_t i = 0; i < scenario.tasks.size(); ++i) {
    const auto& task = scenario.tasks[i];
    const std::uint64_t task_seed = derive_seed(seed, 100 + i);
    if (options.verbose) std::cerr << "[" << i + 1 << "/" << scenario.tasks.size() << "] " << task.id << "\n";
    json report = {{"schema", kSchemaVersion},
                   {"scenario", scenario.name},
                   {"task", {{"id", task.id}, {"type", task.type}, {"params", task.params}}},
                   {"task_seed", task_seed},
                   {"config", config}};
    json entry = {{"id", task.id}, {"type", task.type}};
    int code = kExitOk;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto out = runner.run(task, task_seed);
      report["status"] = "ok";
      report["result"] = out.result;
      report["files"] = out.files;
      entry["status"] = "ok";
      entry["verdict"] = out.verdict;
      for (const auto& f : out.files) run.files.push_back(options.out / f);
    } catch (const BudgetExhausted& e) {
      report["status"] = "budget_exhausted";
      report["result"] = {{"message", e.what()}, {"progress", e.progress()}};
      entry["status"] = "budget_exhausted";
      code = kExitBudget;
    } catch (const std::exception& e) {
      code = exit_code_for(e);
      const char* label = code == kExitInvariant   ? "invariant_violation"
                          : code == kExitNumerical ? "numerical_failure"
                          : code == kExitParse     ? "config_error"
                                                   : "error";
      report["status"] = label;
      report["result"] = {{"message", e.what()}};
      entry["status"] = label;
    }
    timings[task.id] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto path = options.out / (task.id + ".json");
    write_json(path, report);
    run.files.push_back(path);
    task_summaries.push_back(entry);
    if (code == kExitBudget) {
      if (run.exit_code == kExitOk) run.exit_code = kExitBudget;
    } else if (code != kExitOk) {
      run.exit_code = code;
      status = "aborted";
      break;
    }
  }
  if (status != "aborted" && run.exit_code == kExitBudget) status = "budget_exhausted";

  run.summary = {{"schema", kSchemaVersion},
                 {"scenario", scenario.name},
                 {"status", status},
                 {"exit_code", run.exit_code},
                 {"tasks", task_summaries},
                 {"config", config}};
  const auto summary_path = options.out / "summary.json";
  write_json(summary_path, run.summary);
  run.files.push_back(summary_path);

  const json metadata = {{"started_at", started},
                         {"finished_at", utc_now()},
                         {"threads", options.threads},
                         {"task_seconds", timings},
                         {"version", "0.1.0"}};
  const auto meta_path = options.out / "metadata.json";
  write_json(meta_path, metadata);
  run.files.push_back(meta_path);
  return run;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UsageError*>(&e) ||
      dynamic_cast<const json::exception*>(&e)) {
    return kExitParse;
  }
  if (dynamic_cast<const InvariantViolation*>(&e)) return kExitInvariant;
  if (dynamic_cast<const BudgetExhausted*>(&e)) return kExitBudget;
  if (dynamic_cast<const NumericalFailure*>(&e)) return kExitNumerical;
  return kExitFailure;
}

}  // namespace ergolab
