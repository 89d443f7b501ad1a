#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ergolab/errors.hpp"
#include "ergolab/skew_product.hpp"
#include "support.hpp"

using namespace ergolab;
using namespace ergolab::testing;

TEST_CASE("SymbolStream frequencies stay within three standard errors") {
  const std::vector<double> p = {0.2, 0.5, 0.3};
  SymbolStream s(p, 42);
  std::vector<double> counts(3, 0.0);
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) counts[s.next()] += 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::fabs(counts[i] / n - p[i]) <= 3.0 * std::sqrt(p[i] * (1.0 - p[i]) / n));
  }
  CHECK_THROWS_AS(SymbolStream(std::vector<double>{0.5, 0.6}, 1), InvariantViolation);
}

TEST_CASE("skew_orbit examples") {
  SUBCASE("quarter rotation returns after four steps") {
    const auto ifs = circle_ifs({rotation(0.25)});
    SymbolStream s(ifs.probs(), 1);
    CHECK(circle_distance(skew_orbit(ifs, s, Point::circle(0.0), 4).final_point.x, 0.0) <= 1e-15);
  }
  SUBCASE("identity gives a constant trajectory") {
    const Grid g(PhaseSpace::Circle, 16);
    const auto ifs = circle_ifs({diffeo(0.0, 0.0)});
    SymbolStream s(ifs.probs(), 1);
    const auto o = skew_orbit(ifs, s, Point::circle(0.3), 100, &g);
    CHECK(o.final_point.x == 0.3);
    CHECK(o.visits[g.box_of(Point::circle(0.3))] == 100);
  }
  SUBCASE("two irrational rotations equidistribute") {
    const Grid g(PhaseSpace::Circle, 128);
    const auto ifs = circle_ifs({rotation(kPhi), rotation(kSqrt2m1)});
    SymbolStream s(ifs.probs(), 9);
    const auto o = skew_orbit(ifs, s, Point::circle(0.1), 1'000'000, &g);
    std::vector<double> hist(o.visits.begin(), o.visits.end());
    CHECK(tv_distance(GridMeasure::normalized(g, hist), GridMeasure::uniform(g)) <= 0.02);
  }
  SUBCASE("n must be positive") {
    const auto ifs = circle_ifs({rotation(0.25)});
    SymbolStream s(ifs.probs(), 1);
    CHECK_THROWS_AS(skew_orbit(ifs, s, Point::circle(0.0), 0), UsageError);
  }
}

TEST_CASE("birkhoff_average examples") {
  const Grid g(PhaseSpace::Circle, 64);
  SUBCASE("indicator of everything") {
    const auto ifs = circle_ifs({diffeo(0.1, 0.5)});
    SymbolStream s(ifs.probs(), 3);
    CHECK(birkhoff_average(ifs, Observable::indicator(BoxSet::all(g), "all"), Point::circle(0.4), s, 1000) == 1.0);
  }
  SUBCASE("golden rotation, cos") {
    const auto ifs = circle_ifs({rotation(kPhi)});
    SymbolStream s(ifs.probs(), 3);
    CHECK(std::fabs(birkhoff_average(ifs, Observable::cos_x(), Point::circle(0.0), s, 1'000'000)) <= 0.01);
  }
  SUBCASE("two-sink map started at 0.2 stays in the left half") {
    const auto ifs = circle_ifs({two_sink_map()});
    const auto left = Observable::indicator(BoxSet::arc(g, 0.0, 0.5), "left");
    SymbolStream s1(ifs.probs(), 3), s2(ifs.probs(), 3);
    const double short_run = birkhoff_average(ifs, left, Point::circle(0.2), s1, 100);
    const double long_run = birkhoff_average(ifs, left, Point::circle(0.2), s2, 100'000);
    CHECK(long_run >= short_run);
    CHECK(long_run >= 0.999);
  }
}

TEST_CASE("Observable integrals") {
  const Grid g(PhaseSpace::Torus2, 16);
  const auto u = GridMeasure::uniform(g);
  CHECK(std::fabs(Observable::cos_x().integral(u)) <= 1e-15);
  CHECK(std::fabs(Observable::cos_cos().integral(u)) <= 1e-15);
  const auto ind = Observable::indicator(BoxSet::rect(g, 0.0, 0.5, 0.0, 0.5), "q");
  CHECK(ind.integral(u) == doctest::Approx(0.25));
  CHECK(ind.volume_integral() == doctest::Approx(0.25));
  // Exact box averages: cos integrated against a point mass on box [0, 1/16).
  const Grid c(PhaseSpace::Circle, 16);
  const double expected = std::sin(2.0 * std::numbers::pi / 16.0) / (2.0 * std::numbers::pi / 16.0);
  CHECK(Observable::cos_x().integral(GridMeasure::point_mass(c, 0)) == doctest::Approx(expected));
}

TEST_CASE("ergodicity_verdict examples") {
  const Grid g(PhaseSpace::Circle, 128);
  SUBCASE("golden rotation is consistent with ergodic") {
    ErgodicityOptions o;
    o.seed = 5;
    const auto obs = std::vector<Observable>{Observable::cos_x()};
    const auto v = ergodicity_verdict(circle_ifs({rotation(kPhi)}), obs, o);
    CHECK(v.consistent);
    CHECK(verdict_label(v.consistent) == "consistent with ergodic");
    for (const auto& row : v.averages) CHECK(std::fabs(row[0]) <= 0.01);
  }
  SUBCASE("quarter rotation is rejected through 1[0,1/8)") {
    ErgodicityOptions o;
    o.n = 10'000;
    o.seed = 5;
    const auto obs = std::vector<Observable>{Observable::cos_x(),
                                             Observable::indicator(BoxSet::arc(g, 0.0, 0.125), "1[0,1/8)")};
    const auto v = ergodicity_verdict(circle_ifs({rotation(0.25)}), obs, o);
    CHECK_FALSE(v.consistent);
    REQUIRE(v.separating_observable);
    CHECK(*v.separating_observable == "1[0,1/8)");
    CHECK(v.stats[1].stddev > o.tol);
  }
  SUBCASE("two-sink map is rejected with bimodal averages") {
    const auto ifs = circle_ifs({two_sink_map()});
    ErgodicityOptions o;
    o.n = 10'000;
    o.seed = 8;
    o.start = stationary_measure(ifs, g).measure;
    const auto obs = std::vector<Observable>{Observable::indicator(BoxSet::arc(g, 0.0, 0.5), "left")};
    const auto v = ergodicity_verdict(ifs, obs, o);
    CHECK_FALSE(v.consistent);
    std::size_t zeros = 0, ones = 0;
    for (const auto& row : v.averages) {
      zeros += row[0] == 0.0;
      ones += row[0] == 1.0;
    }
    CHECK(zeros + ones == o.trials);
    CHECK(zeros > 0);
    CHECK(ones > 0);
  }
  SUBCASE("fewer than 8 trials is a usage error") {
    ErgodicityOptions o;
    o.trials = 7;
    const auto obs = std::vector<Observable>{Observable::cos_x()};
    CHECK_THROWS_AS(ergodicity_verdict(circle_ifs({rotation(kPhi)}), obs, o), UsageError);
  }
}

TEST_CASE("okk_equivalence_check examples") {
  const Grid g(PhaseSpace::Circle, 128);
  OkkOptions o;
  o.ergodicity.n = 100'000;
  o.ergodicity.seed = 21;
  SUBCASE("golden rotation: both sides ergodic") {
    const auto r = okk_equivalence_check(circle_ifs({rotation(kPhi)}), g, o);
    CHECK(r.semigroup_ergodic);
    CHECK(r.skew_ergodic);
    CHECK(r.agree);
    CHECK(r.component_count == 1);
  }
  SUBCASE("two-sink control: both sides non-ergodic") {
    const auto r = okk_equivalence_check(circle_ifs({two_sink_map()}), g, o);
    CHECK_FALSE(r.semigroup_ergodic);
    CHECK_FALSE(r.skew_ergodic);
    CHECK(r.agree);
    REQUIRE(r.best_candidate);
    CHECK(r.best_candidate->score <= 2.0 / 128.0);
    CHECK(r.best_candidate->mass == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("quarter rotation with uniform stationary measure: both non-ergodic") {
    const auto r = okk_equivalence_check(circle_ifs({rotation(0.25)}), g, o);
    CHECK(tv_distance(r.stationary.measure, GridMeasure::uniform(g)) <= 1e-12);
    CHECK_FALSE(r.semigroup_ergodic);
    CHECK_FALSE(r.skew_ergodic);
    CHECK(r.agree);
  }
  SUBCASE("non-converged stationary measure is inconclusive") {
    OkkOptions tight = o;
    tight.stationary = {1e-15, 2};
    tight.ergodicity.n = 1000;
    const auto r = okk_equivalence_check(circle_ifs({diffeo(0.1, 0.3)}), g, tight);
    CHECK(r.inconclusive);
    CHECK_FALSE(r.agree);
  }
}

TEST_CASE("property: identical seeds reproduce verdicts bit for bit") {
  const auto ifs = circle_ifs({rotation(kPhi), diffeo(0.1, 0.5)});
  ErgodicityOptions o;
  o.n = 20'000;
  o.seed = 77;
  const auto obs = default_observables(Grid(PhaseSpace::Circle, 64));
  const auto a = ergodicity_verdict(ifs, obs, o);
  o.threads = 4;
  const auto b = ergodicity_verdict(ifs, obs, o);
  CHECK(a.averages == b.averages);
  o.seed = 78;
  const auto c = ergodicity_verdict(ifs, obs, o);
  CHECK(a.averages != c.averages);
}

TEST_CASE("property: shift-stationarity from volume under a burn-in") {
  const auto ifs = theorem_b_ifs();
  const auto obs = std::vector<Observable>{Observable::cos_cos(), Observable::sin_x()};
  ErgodicityOptions o;
  o.n = 20'000;
  o.trials = 16;
  o.seed = 4;
  const auto plain = ergodicity_verdict(ifs, obs, o);
  o.burn_in = 5'000;
  const auto shifted = ergodicity_verdict(ifs, obs, o);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const double se = std::hypot(plain.stats[k].stddev, shifted.stats[k].stddev) / std::sqrt(16.0);
    CHECK(std::fabs(plain.stats[k].mean - shifted.stats[k].mean) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("property: k = 1 skew averages equal plain Birkhoff sums") {
  const auto ifs = circle_ifs({diffeo(0.1, 0.3)});
  const auto obs = std::vector<Observable>{Observable::cos_x()};
  ErgodicityOptions o;
  o.n = 5'000;
  o.trials = 8;
  o.seed = 2;
  const auto v = ergodicity_verdict(ifs, obs, o);
  for (std::size_t t = 0; t < o.trials; ++t) {
    Point x = v.starts[t];
    double s = 0.0;
    for (std::size_t i = 0; i < o.n; ++i) {
      s += obs[0](x);
      x = apply(ifs.map(0), x);
    }
    CHECK(v.averages[t][0] == doctest::Approx(s / o.n).epsilon(1e-14));
  }
}

TEST_CASE("property: indicator averages lie in [0,1] and match mu(A) when consistent") {
  const Grid g(PhaseSpace::Circle, 64);
  const auto a = BoxSet::arc(g, 0.2, 0.45);
  const auto obs = std::vector<Observable>{Observable::indicator(a, "A")};
  ErgodicityOptions o;
  o.n = 200'000;
  o.seed = 6;
  const auto v = ergodicity_verdict(circle_ifs({rotation(kPhi), rotation(kSqrt2m1)}), obs, o);
  for (const auto& row : v.averages) {
    CHECK(row[0] >= 0.0);
    CHECK(row[0] <= 1.0);
  }
  REQUIRE(v.consistent);
  CHECK(std::fabs(v.stats[0].mean - GridMeasure::uniform(g).mass(a)) <= o.tol);
}

TEST_CASE("perturb keeps integer data and moves continuous parameters") {
  Engine engine(3);
  const auto p = perturb(theorem_b_ifs(), 1e-3, engine);
  const auto& l = std::get<ToralAutomorphism>(p.map(0).family());
  CHECK(l.matrix == std::array<std::int64_t, 4>{2, 1, 1, 1});
  const auto& t = std::get<ToralTranslation>(p.map(1).family());
  CHECK(std::fabs(t.v1 - kPhi) <= 1e-3);
  CHECK(std::fabs(t.v2 - kSqrt2m1) <= 1e-3);
  CHECK(t.v1 != kPhi);
  Engine e2(3);
  const auto q = perturb(theorem_b_ifs(), 0.0, e2);
  CHECK(std::get<ToralTranslation>(q.map(1).family()).v1 == kPhi);
}

TEST_CASE("robustness_sweep examples") {
  const Grid g(PhaseSpace::Circle, 64);
  PipelineSpec spec{g, OkkOptions{}, std::nullopt, 1e-12};
  spec.okk.ergodicity.n = 20'000;
  spec.okk.ergodicity.trials = 8;
  SUBCASE("delta = 0 repeats the baseline") {
    const auto r = robustness_sweep(circle_ifs({rotation(kPhi)}), spec, 0.0, 3, 1);
    CHECK(r.stationarity_survival == 1.0);
    CHECK(r.component_survival == 1.0);
    CHECK(r.ergodicity_survival == 1.0);
    CHECK(r.minimality_survival == 1.0);
  }
  SUBCASE("two-sink control keeps its sinks") {
    const auto r = robustness_sweep(circle_ifs({two_sink_map()}), spec, 1e-3, 4, 2);
    CHECK_FALSE(r.baseline.ergodic);
    CHECK(r.ergodicity_survival == 1.0);
  }
  SUBCASE("per-sample failures are recorded, not thrown") {
    // b = 0.9995 lies within delta of the |b| < 1 boundary.
    const auto r = robustness_sweep(circle_ifs({diffeo(0.1, 0.9995)}), spec, 1e-2, 6, 3);
    std::size_t failed = 0;
    for (const auto& s : r.samples) failed += s.outcome ? 0 : 1;
    CHECK(failed > 0);
    CHECK(r.ergodicity_survival <= 1.0 - static_cast<double>(failed) / 6.0);
  }
  SUBCASE("negative delta is rejected") {
    CHECK_THROWS_AS(robustness_sweep(circle_ifs({rotation(kPhi)}), spec, -1.0, 1, 1), UsageError);
  }
}
