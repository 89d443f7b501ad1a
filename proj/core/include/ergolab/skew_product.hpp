#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergolab/grid_measures.hpp"
#include "ergolab/phase_maps.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/semigroup_topology.hpp"
#include "ergolab/stationary.hpp"

namespace ergolab {

/// i.i.d. symbols with law p: a sample path of the Bernoulli measure on
/// the one-sided shift.
class SymbolStream {
 public:
  SymbolStream(std::span<const double> probs, std::uint64_t seed);

  std::size_t next();
  std::size_t alphabet() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
  Engine engine_;
};

/// Bounded test function on the phase space.
class Observable {
 public:
  static Observable cos_x();
  static Observable sin_x();
  /// cos(2 pi x) cos(2 pi y), torus only.
  static Observable cos_cos();
  static Observable indicator(const BoxSet& set, std::string name);

  double operator()(const Point& p) const;
  const std::string& name() const noexcept { return name_; }
  /// Integral against normalized volume.
  double volume_integral() const;
  /// Integral against a grid measure (exact box averages).
  double integral(const GridMeasure& mu) const;

 private:
  enum class Kind { CosX, SinX, CosCos, Indicator };
  Observable(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  std::optional<Grid> grid_;
  std::vector<bool> mask_;
  double volume_fraction_ = 0.0;
};

/// Trigonometric menu plus indicators of a few dyadic boxes.
std::vector<Observable> default_observables(const Grid& grid);

struct OrbitSummary {
  Point final_point;
  /// Visits of x_0 .. x_{n-1} per grid box (empty when no grid is given).
  std::vector<std::uint64_t> visits;
};

/// Iterates x_{t+1} = f_{omega_t}(x_t) for t < n.
OrbitSummary skew_orbit(const IFSystem& ifs, SymbolStream& stream, const Point& x, std::size_t n,
                        const Grid* grid = nullptr);

/// (1/n) sum_{t<n} obs(x_t).
double birkhoff_average(const IFSystem& ifs, const Observable& obs, const Point& x, SymbolStream& stream,
                        std::size_t n);
/// All observables along one orbit; the first `burn_in` iterates are skipped.
std::vector<double> birkhoff_averages(const IFSystem& ifs, std::span<const Observable> observables, const Point& x,
                                      SymbolStream& stream, std::size_t n, std::size_t burn_in = 0);

struct ErgodicityOptions {
  std::size_t n = 1'000'000;
  std::size_t trials = 32;
  double tol = 0.02;
  std::uint64_t seed = 0;
  /// Starting law for x; normalized volume when unset.
  std::optional<GridMeasure> start;
  std::size_t burn_in = 0;
  unsigned threads = 1;
};

struct ObservableStats {
  std::string name;
  double mean = 0.0;
  double stddev = 0.0;
  /// Space average under the starting law.
  double reference = 0.0;
  bool passed = false;
};

struct ErgodicityVerdict {
  /// "consistent with ergodic" when true, "ergodicity rejected" otherwise.
  bool consistent = false;
  std::optional<std::string> separating_observable;
  std::vector<ObservableStats> stats;
  /// averages[trial][observable].
  std::vector<std::vector<double>> averages;
  std::vector<Point> starts;
};

std::string_view verdict_label(bool consistent);

ErgodicityVerdict ergodicity_verdict(const IFSystem& ifs, std::span<const Observable> observables,
                                     const ErgodicityOptions& options);

struct OkkOptions {
  StationaryOptions stationary;
  UlamMethod method;
  double support_tol = 1e-10;
  /// Candidates need mu(A) in [margin, 1 - margin].
  double mass_margin = 0.05;
  /// Invariance threshold on the symmetric-difference score; 2/N when <= 0.
  double score_tol = 0.0;
  /// All unions are tried up to this many components, otherwise singles and
  /// prefix unions.
  std::size_t max_subset_components = 12;
  ErgodicityOptions ergodicity;
  /// default_observables(grid) when empty.
  std::vector<Observable> observables;
  unsigned threads = 1;
};

struct InvariantCandidate {
  BoxSet set;
  double mass = 0.0;
  double score = 0.0;
};

struct OkkReport {
  StationaryResult stationary;
  std::size_t component_count = 0;
  std::size_t transient_count = 0;
  std::size_t candidates_tested = 0;
  double score_tol = 0.0;
  /// Admissible candidate with mass nearest 1/2 among those scoring within
  /// score_tol, else the lowest-scoring one.
  std::optional<InvariantCandidate> best_candidate;
  bool semigroup_ergodic = false;
  ErgodicityVerdict skew;
  bool skew_ergodic = false;
  bool inconclusive = false;
  bool agree = false;
};

/// Compares the semigroup-level invariant-set test against the skew-product
/// time-average test.
OkkReport okk_equivalence_check(const IFSystem& ifs, const Grid& grid, const OkkOptions& options);

// ------------------------------------------------------------ robustness

/// Everything the full pipeline needs besides the map parameters.
struct PipelineSpec {
  Grid grid;
  OkkOptions okk;
  /// Minimality is skipped when unset.
  std::optional<MinimalityOptions> minimality;
  double quasi_eps = 1e-12;
};

struct PipelineOutcome {
  bool stationary_converged = false;
  double residual = 0.0;
  std::size_t components = 0;
  std::optional<bool> minimal;
  bool ergodic = false;
  bool semigroup_ergodic = false;
  bool okk_agree = false;
  bool quasi_invariant_forward = false;
  bool quasi_invariant_inverse = false;
};

PipelineOutcome run_pipeline(const IFSystem& ifs, const PipelineSpec& spec);

/// Adds U[-delta, delta] to every continuous parameter (alpha, a, b, v1,
/// v2); integer matrices and modes stay fixed.  Throws InvariantViolation if
/// a perturbed parameter leaves its family's admissible range.
IFSystem perturb(const IFSystem& ifs, double delta, Engine& engine);

struct SweepSample {
  std::string maps;
  std::optional<PipelineOutcome> outcome;
  std::string error;
};

struct SweepReport {
  PipelineOutcome baseline;
  std::vector<SweepSample> samples;
  /// Fraction of samples whose property matches the baseline's; for
  /// components the property is "a single ergodic component".
  double stationarity_survival = 0.0;
  double component_survival = 0.0;
  double minimality_survival = 0.0;
  double ergodicity_survival = 0.0;
};

SweepReport robustness_sweep(const IFSystem& ifs, const PipelineSpec& spec, double delta, std::size_t samples,
                             std::uint64_t seed, unsigned threads = 1);

}  // namespace ergolab
