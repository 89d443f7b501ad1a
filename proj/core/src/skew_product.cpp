#include "ergolab/skew_product.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Averages of cos(2 pi x) and sin(2 pi x) over [a, a + w).
double mean_cos(double a, double w) { return (std::sin(kTwoPi * (a + w)) - std::sin(kTwoPi * a)) / (kTwoPi * w); }
double mean_sin(double a, double w) { return (std::cos(kTwoPi * a) - std::cos(kTwoPi * (a + w))) / (kTwoPi * w); }

Point sample_start(const std::optional<GridMeasure>& start, PhaseSpace space, Engine& engine) {
  if (!start) {
    const double x = uniform01(engine);
    const double y = uniform01(engine);
    return space == PhaseSpace::Circle ? Point::circle(x) : Point::torus(x, y);
  }
  const auto w = start->weights();
  const double u = uniform01(engine);
  double acc = 0.0;
  std::size_t box = w.size() - 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) {
      box = i;
      break;
    }
  }
  while (box > 0 && w[box] == 0.0) --box;  // never start in a null box
  const double a = uniform01(engine);
  const double b = uniform01(engine);
  return start->grid().point_in_box(box, a, b);
}

double sample_stddev(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

// ------------------------------------------------------------ SymbolStream

SymbolStream::SymbolStream(std::span<const double> probs, std::uint64_t seed) : engine_(seed) {
  if (probs.empty()) throw UsageError("SymbolStream needs a nonempty probability vector");
  double acc = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InvariantViolation("SymbolStream probabilities must be nonnegative");
    acc += p;
    cumulative_.push_back(acc);
  }
  if (std::fabs(acc - 1.0) > 1e-12) throw InvariantViolation("SymbolStream probabilities must sum to 1");
  cumulative_.back() = 1.0;
}

std::size_t SymbolStream::next() {
  if (cumulative_.size() == 1) return 0;
  const double u = uniform01(engine_);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

// ------------------------------------------------------------ Observable

Observable Observable::cos_x() { return Observable(Kind::CosX, "cos(2pi x)"); }
Observable Observable::sin_x() { return Observable(Kind::SinX, "sin(2pi x)"); }
Observable Observable::cos_cos() { return Observable(Kind::CosCos, "cos(2pi x)cos(2pi y)"); }

Observable Observable::indicator(const BoxSet& set, std::string name) {
  Observable o(Kind::Indicator, std::move(name));
  o.grid_ = set.grid();
  o.mask_ = set.mask();
  o.volume_fraction_ = static_cast<double>(set.size()) / static_cast<double>(set.grid().box_count());
  return o;
}

double Observable::operator()(const Point& p) const {
  switch (kind_) {
    case Kind::CosX:
      return std::cos(kTwoPi * p.x);
    case Kind::SinX:
      return std::sin(kTwoPi * p.x);
    case Kind::CosCos:
      return std::cos(kTwoPi * p.x) * std::cos(kTwoPi * p.y);
    case Kind::Indicator:
      return mask_[grid_->box_of(p)] ? 1.0 : 0.0;
  }
  return 0.0;
}

double Observable::volume_integral() const { return kind_ == Kind::Indicator ? volume_fraction_ : 0.0; }

double Observable::integral(const GridMeasure& mu) const {
  const Grid& g = mu.grid();
  if (kind_ == Kind::Indicator) {
    if (!(g == *grid_)) throw UsageError("indicator observable integrated on a different grid");
    double s = 0.0;
    for (std::size_t i = 0; i < mask_.size(); ++i) s += mask_[i] ? mu[i] : 0.0;
    return s;
  }
  const double w = 1.0 / static_cast<double>(g.resolution());
  double s = 0.0;
  for (std::size_t b = 0; b < g.box_count(); ++b) {
    if (mu[b] == 0.0) continue;
    const double ax = static_cast<double>(g.ix(b)) * w;
    double avg = 0.0;
    switch (kind_) {
      case Kind::CosX:
        avg = mean_cos(ax, w);
        break;
      case Kind::SinX:
        avg = mean_sin(ax, w);
        break;
      case Kind::CosCos:
        avg = mean_cos(ax, w) * mean_cos(static_cast<double>(g.iy(b)) * w, w);
        break;
      case Kind::Indicator:
        break;
    }
    s += mu[b] * avg;
  }
  return s;
}

std::vector<Observable> default_observables(const Grid& grid) {
  if (grid.space() == PhaseSpace::Circle) {
    return {Observable::cos_x(), Observable::sin_x(), Observable::indicator(BoxSet::arc(grid, 0.0, 0.5), "1[0,1/2)"),
            Observable::indicator(BoxSet::arc(grid, 0.0, 0.25), "1[0,1/4)"),
            Observable::indicator(BoxSet::arc(grid, 0.0, 0.125), "1[0,1/8)")};
  }
  return {Observable::cos_x(), Observable::sin_x(), Observable::cos_cos(),
          Observable::indicator(BoxSet::rect(grid, 0.0, 0.5, 0.0, 1.0), "1[0,1/2)x[0,1)"),
          Observable::indicator(BoxSet::rect(grid, 0.0, 0.5, 0.0, 0.5), "1[0,1/2)^2"),
          Observable::indicator(BoxSet::rect(grid, 0.0, 0.25, 0.0, 0.25), "1[0,1/4)^2")};
}

// ------------------------------------------------------------ orbits

OrbitSummary skew_orbit(const IFSystem& ifs, SymbolStream& stream, const Point& x, std::size_t n, const Grid* grid) {
  if (n < 1) throw UsageError("skew_orbit: n must be >= 1");
  if (stream.alphabet() != ifs.size()) throw UsageError("skew_orbit: stream alphabet does not match the IFS");
  OrbitSummary out;
  if (grid) out.visits.assign(grid->box_count(), 0);
  Point p = x;
  for (std::size_t t = 0; t < n; ++t) {
    if (grid) ++out.visits[grid->box_of(p)];
    p = apply(ifs.map(stream.next()), p);
  }
  out.final_point = p;
  return out;
}

std::vector<double> birkhoff_averages(const IFSystem& ifs, std::span<const Observable> observables, const Point& x,
                                      SymbolStream& stream, std::size_t n, std::size_t burn_in) {
  if (n < 1) throw UsageError("birkhoff_average: n must be >= 1");
  if (stream.alphabet() != ifs.size()) throw UsageError("birkhoff_average: stream alphabet does not match the IFS");
  Point p = x;
  for (std::size_t t = 0; t < burn_in; ++t) p = apply(ifs.map(stream.next()), p);
  std::vector<double> sums(observables.size(), 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < observables.size(); ++k) sums[k] += observables[k](p);
    p = apply(ifs.map(stream.next()), p);
  }
  for (double& s : sums) s /= static_cast<double>(n);
  return sums;
}

double birkhoff_average(const IFSystem& ifs, const Observable& obs, const Point& x, SymbolStream& stream,
                        std::size_t n) {
  return birkhoff_averages(ifs, std::span<const Observable>(&obs, 1), x, stream, n).front();
}

std::string_view verdict_label(bool consistent) {
  return consistent ? "consistent with ergodic" : "ergodicity rejected";
}

ErgodicityVerdict ergodicity_verdict(const IFSystem& ifs, std::span<const Observable> observables,
                                     const ErgodicityOptions& options) {
  if (options.trials < 8) throw UsageError("ergodicity_verdict: at least 8 trials are required");
  if (observables.empty()) throw UsageError("ergodicity_verdict: no observables");
  if (options.start && options.start->grid().space() != ifs.space())
    throw UsageError("ergodicity_verdict: starting measure lives on the wrong space");

  ErgodicityVerdict verdict;
  verdict.averages.resize(options.trials);
  verdict.starts.resize(options.trials);
  parallel_for(options.trials, options.threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(options.seed, t);
    Engine engine(derive_seed(trial_seed, 0));
    verdict.starts[t] = sample_start(options.start, ifs.space(), engine);
    SymbolStream stream(ifs.probs(), derive_seed(trial_seed, 1));
    verdict.averages[t] = birkhoff_averages(ifs, observables, verdict.starts[t], stream, options.n, options.burn_in);
  });

  verdict.consistent = true;
  for (std::size_t k = 0; k < observables.size(); ++k) {
    std::vector<double> column;
    column.reserve(options.trials);
    for (const auto& row : verdict.averages) column.push_back(row[k]);
    ObservableStats s;
    s.name = observables[k].name();
    double sum = 0.0;
    for (double v : column) sum += v;
    s.mean = sum / static_cast<double>(column.size());
    s.stddev = sample_stddev(column, s.mean);
    s.reference = options.start ? observables[k].integral(*options.start) : observables[k].volume_integral();
    s.passed = s.stddev <= options.tol && std::fabs(s.mean - s.reference) <= options.tol;
    if (!s.passed && verdict.consistent) {
      verdict.consistent = false;
      verdict.separating_observable = s.name;
    }
    verdict.stats.push_back(std::move(s));
  }
  return verdict;
}

// ------------------------------------------------------------ OKK

OkkReport okk_equivalence_check(const IFSystem& ifs, const Grid& grid, const OkkOptions& options) {
  if (grid.space() != ifs.space()) throw UsageError("okk_equivalence_check: grid on the wrong space");
  std::vector<UlamMatrix> maps;
  for (std::size_t k = 0; k < ifs.size(); ++k) {
    UlamMethod m = options.method;
    m.seed = derive_seed(options.method.seed, 1000003 + k);
    maps.push_back(ulam_matrix(ifs.map(k), grid, m, options.threads));
  }
  const UlamMatrix annealed = annealed_matrix(maps, ifs.probs());

  OkkReport report{stationary_measure(annealed, options.stationary), 0, 0, 0, 0.0, std::nullopt, false, {}, false,
                   false, false};
  report.score_tol = options.score_tol > 0.0 ? options.score_tol : 2.0 / static_cast<double>(grid.resolution());
  const GridMeasure& mu = report.stationary.measure;
  const auto decomposition = decompose_support(annealed, mu, options.support_tol);
  const auto& comps = decomposition.components;
  report.component_count = comps.size();
  report.transient_count = decomposition.transient.size();

  // Side 1: is there an admissible set with mu(A) away from {0,1} and
  // sum_f mu(f^{-1}A delta A) ~ 0?
  std::vector<BoxSet> candidates;
  if (comps.size() > 1 && comps.size() <= options.max_subset_components) {
    const std::size_t subsets = std::size_t{1} << comps.size();
    for (std::size_t mask = 1; mask + 1 < subsets; ++mask) {
      BoxSet a(grid);
      for (std::size_t c = 0; c < comps.size(); ++c) {
        if (mask & (std::size_t{1} << c)) a = a.unite(comps[c]);
      }
      candidates.push_back(std::move(a));
    }
  } else if (comps.size() > 1) {
    BoxSet prefix(grid);
    for (std::size_t c = 0; c < comps.size(); ++c) {
      candidates.push_back(comps[c]);
      prefix = prefix.unite(comps[c]);
      if (c + 1 < comps.size()) candidates.push_back(prefix);
    }
  }
  for (const auto& a : candidates) {
    const double mass = mu.mass(a);
    if (mass < options.mass_margin || mass > 1.0 - options.mass_margin) continue;
    ++report.candidates_tested;
    const double score = symmetric_difference_score(maps, mu, a);
    // Among candidates under the threshold the one with mass closest to 1/2
    // is reported; otherwise the lowest score wins.
    const auto& best = report.best_candidate;
    const bool invariant = score <= report.score_tol;
    const bool best_invariant = best && best->score <= report.score_tol;
    const bool better = !best || (invariant && !best_invariant) ||
                        (invariant && best_invariant && std::fabs(mass - 0.5) < std::fabs(best->mass - 0.5)) ||
                        (!invariant && !best_invariant && score < best->score);
    if (better) {
      report.best_candidate = InvariantCandidate{a, mass, score};
    }
  }
  report.semigroup_ergodic = !(report.best_candidate && report.best_candidate->score <= report.score_tol);

  // Side 2: time averages of the skew product.
  ErgodicityOptions erg = options.ergodicity;
  erg.threads = options.threads;
  if (ifs.volume_preserving()) {
    erg.start.reset();
  } else {
    erg.start = mu;
  }
  const auto observables = options.observables.empty() ? default_observables(grid) : options.observables;
  report.skew = ergodicity_verdict(ifs, observables, erg);
  report.skew_ergodic = report.skew.consistent;

  report.inconclusive = !report.stationary.converged;
  report.agree = !report.inconclusive && report.semigroup_ergodic == report.skew_ergodic;
  return report;
}

// ------------------------------------------------------------ robustness

PipelineOutcome run_pipeline(const IFSystem& ifs, const PipelineSpec& spec) {
  PipelineOutcome out;
  const OkkReport okk = okk_equivalence_check(ifs, spec.grid, spec.okk);
  out.stationary_converged = okk.stationary.converged;
  out.residual = okk.stationary.residual;
  out.components = okk.component_count;
  out.ergodic = okk.skew_ergodic;
  out.semigroup_ergodic = okk.semigroup_ergodic;
  out.okk_agree = okk.agree;

  out.quasi_invariant_forward = true;
  out.quasi_invariant_inverse = true;
  for (const auto& m : ifs.maps()) {
    const auto method = spec.okk.method;
    out.quasi_invariant_forward =
        out.quasi_invariant_forward &&
        quasi_invariance_check(okk.stationary.measure, ulam_matrix(m, spec.grid, method), spec.quasi_eps).quasi_invariant;
    out.quasi_invariant_inverse =
        out.quasi_invariant_inverse &&
        quasi_invariance_check(okk.stationary.measure, ulam_matrix(m.inverse(), spec.grid, method), spec.quasi_eps)
            .quasi_invariant;
  }

  if (spec.minimality) {
    MinimalityOptions m = *spec.minimality;
    m.threads = spec.okk.threads;
    out.minimal = minimality_check(ifs, m).minimal;
  }
  return out;
}

IFSystem perturb(const IFSystem& ifs, double delta, Engine& engine) {
  auto jitter = [&] { return delta * (2.0 * uniform01(engine) - 1.0); };
  std::vector<SmoothMap> maps;
  for (const auto& m : ifs.maps()) {
    MapFamily family = m.family();
    if (auto* r = std::get_if<Rotation>(&family)) {
      r->alpha += jitter();
    } else if (auto* f = std::get_if<CircleDiffeo>(&family)) {
      f->a += jitter();
      f->b += jitter();
    } else if (auto* t = std::get_if<ToralTranslation>(&family)) {
      t->v1 += jitter();
      t->v2 += jitter();
    }
    maps.emplace_back(family, m.direction());
  }
  return IFSystem(ifs.space(), std::move(maps), std::vector<double>(ifs.probs().begin(), ifs.probs().end()));
}

SweepReport robustness_sweep(const IFSystem& ifs, const PipelineSpec& spec, double delta, std::size_t samples,
                             std::uint64_t seed, unsigned threads) {
  if (!(delta >= 0.0)) throw UsageError("robustness_sweep: delta must be nonnegative");
  SweepReport report;
  report.baseline = run_pipeline(ifs, spec);
  report.samples.resize(samples);

  PipelineSpec inner = spec;
  inner.okk.threads = 1;
  parallel_for(samples, threads, [&](std::size_t i) {
    SweepSample& s = report.samples[i];
    try {
      Engine engine(derive_seed(seed, i));
      const IFSystem perturbed = perturb(ifs, delta, engine);
      for (const auto& m : perturbed.maps()) s.maps += (s.maps.empty() ? "" : "; ") + m.describe();
      s.outcome = run_pipeline(perturbed, inner);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  });

  if (samples == 0) return report;
  std::size_t stat = 0, comp = 0, minimal = 0, ergodic = 0;
  for (const auto& s : report.samples) {
    if (!s.outcome) continue;
    const auto& o = *s.outcome;
    stat += o.stationary_converged == report.baseline.stationary_converged;
    comp += (o.components == 1) == (report.baseline.components == 1);
    minimal += o.minimal == report.baseline.minimal;
    ergodic += o.ergodic == report.baseline.ergodic;
  }
  const double total = static_cast<double>(samples);
  report.stationarity_survival = static_cast<double>(stat) / total;
  report.component_survival = static_cast<double>(comp) / total;
  report.minimality_survival = static_cast<double>(minimal) / total;
  report.ergodicity_survival = static_cast<double>(ergodic) / total;
  return report;
}

}  // namespace ergolab
