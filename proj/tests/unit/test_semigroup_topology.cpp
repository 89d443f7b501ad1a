#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ergolab/errors.hpp"
#include "ergolab/semigroup_topology.hpp"
#include "support.hpp"

using namespace ergolab;
using namespace ergolab::testing;

namespace {

// Union of the exact Ulam supports of U pushed along each word.
std::vector<bool> exact_support_union(const IFSystem& ifs, const BoxSet& u, const std::vector<Word>& words) {
  const Grid& g = u.grid();
  std::vector<UlamMatrix> ulam;
  for (const auto& m : ifs.maps()) ulam.push_back(ulam_matrix(m, g, UlamMethod::exact()));
  std::vector<bool> all(g.box_count(), false);
  for (const auto& w : words) {
    auto reach = u.mask();
    for (const auto& letter : w.letters()) {
      std::vector<bool> next(g.box_count(), false);
      for (std::size_t b = 0; b < g.box_count(); ++b) {
        if (!reach[b]) continue;
        for (const auto& e : ulam[letter.map].row(b)) next[e.col] = true;
      }
      reach = std::move(next);
    }
    for (std::size_t b = 0; b < g.box_count(); ++b) all[b] = all[b] || reach[b];
  }
  return all;
}

}  // namespace

TEST_CASE("minimality_check examples") {
  SUBCASE("golden rotation is minimal at eps 0.02 by length 60") {
    MinimalityOptions o;
    o.eps = 0.02;
    o.max_len = 60;
    const auto v = minimality_check(circle_ifs({rotation(kPhi)}), o);
    CHECK(v.minimal);
    // The search stops once the orbit is eps-dense, so the reported radius
    // belongs to a partial orbit: below eps, above the full 60-point radius.
    CHECK(v.worst_radius < 0.02);
    CHECK(v.worst_radius >= 0.0106431181261 - 1e-12);
  }
  SUBCASE("golden rotation, full 60-point orbit radius") {
    MinimalityOptions o;
    o.eps = 0.001;
    o.max_len = 60;
    o.sample = 1;
    const auto v = minimality_check(circle_ifs({rotation(kPhi)}), o);
    CHECK_FALSE(v.minimal);
    // Sorted-gap oracle: the 60-point orbit has covering radius 0.0106431.
    CHECK(v.worst_radius == doctest::Approx(0.0106431181261).epsilon(1e-6));
  }
  SUBCASE("quarter rotation is not minimal; certified by its finite orbit") {
    MinimalityOptions o;
    o.eps = 0.1;
    const auto v = minimality_check(circle_ifs({rotation(0.25)}), o);
    CHECK_FALSE(v.minimal);
    CHECK(v.certified_negative);
    CHECK(v.worst_radius == doctest::Approx(0.125));
  }
  SUBCASE("cat map plus translation: backward semigroup minimal") {
    MinimalityOptions o;
    o.direction = Direction::Inverse;
    o.eps = 0.05;
    o.max_len = 40;
    o.mode = SearchMode::Greedy;
    o.grid = Grid(PhaseSpace::Torus2, 64);
    const auto v = minimality_check(torus_ifs({translation(kPhi, kSqrt2m1), cat_map()}), o);
    CHECK(v.minimal);
    CHECK(v.worst_radius < 0.05);
    CHECK(v.starts_tested >= 64 * 64);
  }
  SUBCASE("exhaustive mode refuses oversized enumerations") {
    MinimalityOptions o;
    o.max_len = 40;
    CHECK_THROWS_AS(minimality_check(theorem_b_ifs(), o), BudgetExhausted);
  }
  SUBCASE("bad options") {
    MinimalityOptions o;
    o.eps = 0.0;
    CHECK_THROWS_AS(minimality_check(circle_ifs({rotation(kPhi)}), o), UsageError);
  }
}

TEST_CASE("strong_transitivity_witness examples") {
  const Grid g(PhaseSpace::Circle, 128);
  SUBCASE("W = all boxes: a length-one word") {
    const auto w = strong_transitivity_witness(circle_ifs({rotation(kPhi)}), BoxSet::arc(g, 0.0, 0.1),
                                               BoxSet::all(g), 10);
    CHECK(w.word == Word::forward({0}));
  }
  SUBCASE("golden rotation from [0,0.1) into [0.5,0.6)") {
    // Direct search: m = 4 is the first m with m*phi mod 1 = 0.472 placing
    // U + m*phi across W.
    const auto w = strong_transitivity_witness(circle_ifs({rotation(kPhi)}), BoxSet::arc(g, 0.0, 0.1),
                                               BoxSet::arc(g, 0.5, 0.6), 100);
    CHECK(w.word.size() == 4);
    CHECK(BoxSet::arc(g, 0.5, 0.6).contains(g.box_of(w.landing)));
    CHECK(distance(apply_word(w.word, circle_ifs({rotation(kPhi)}), w.start), w.landing) == 0.0);
  }
  SUBCASE("U = W under a grid-aligned quarter rotation returns after 4 steps") {
    const auto u = BoxSet::arc(g, 0.0, 0.25);
    const auto w = strong_transitivity_witness(circle_ifs({rotation(0.25)}), u, u, 10);
    CHECK(w.word.size() == 4);
  }
  SUBCASE("exhaustion is inconclusive, not a disproof") {
    const auto u = BoxSet::arc(g, 0.0, 0.1);
    CHECK_THROWS_AS(strong_transitivity_witness(circle_ifs({rotation(0.25)}), u, BoxSet::arc(g, 0.6, 0.7), 12),
                    BudgetExhausted);
  }
  SUBCASE("length-lex order prefers the smaller symbol") {
    const auto ifs = circle_ifs({rotation(0.5), rotation(0.5)});
    const auto w = strong_transitivity_witness(ifs, BoxSet::arc(g, 0.0, 0.1), BoxSet::arc(g, 0.5, 0.6), 3);
    CHECK(w.word == Word::forward({0}));
  }
}

TEST_CASE("finite_cover examples") {
  SUBCASE("U = all boxes: one word") {
    const Grid g(PhaseSpace::Circle, 64);
    const auto c = finite_cover(circle_ifs({rotation(kPhi)}), BoxSet::all(g), 4, 64);
    CHECK(c.words.size() == 1);
    CHECK(c.words[0] == Word::forward({0}));
  }
  SUBCASE("golden rotation, arc of length 0.21 on N=100: six greedy words") {
    const Grid g(PhaseSpace::Circle, 100);
    const auto c = finite_cover(circle_ifs({rotation(kPhi)}), BoxSet::arc(g, 0.0, 0.21), 40, 4096);
    // Greedy set cover oracle; the optimum is five words, greedy finds six.
    CHECK(c.words.size() == 6);
  }
  SUBCASE("quarter rotation, arc [0,0.2): coverage stalls at 80%") {
    const Grid g(PhaseSpace::Circle, 100);
    try {
      finite_cover(circle_ifs({rotation(0.25)}), BoxSet::arc(g, 0.0, 0.2), 12, 4096);
      FAIL("expected BudgetExhausted");
    } catch (const BudgetExhausted& e) {
      CHECK(e.progress() == doctest::Approx(0.8));
    }
  }
  SUBCASE("torus cover of the cat map plus translation system") {
    const Grid g(PhaseSpace::Torus2, 32);
    const auto u = BoxSet::rect(g, 0.0, 0.2, 0.0, 0.2);
    const auto c = finite_cover(theorem_b_ifs(), u, 8, 4096);
    std::vector<bool> covered(g.box_count(), false);
    for (const auto& img : c.images) {
      for (auto b : img.boxes()) covered[b] = true;
    }
    CHECK(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }));
  }
}

TEST_CASE("property: cover images re-checked with exact Ulam supports") {
  const Grid g(PhaseSpace::Circle, 128);
  const auto ifs = circle_ifs({rotation(kPhi), rotation(kSqrt2m1)});
  const auto u = BoxSet::arc(g, 0.0, 0.1);
  const auto c = finite_cover(ifs, u, 12, 4096);
  CHECK(c.words.size() <= 15);
  const auto cover = exact_support_union(ifs, u, c.words);
  CHECK(std::all_of(cover.begin(), cover.end(), [](bool b) { return b; }));
}

TEST_CASE("property: enlarging U does not increase the cover size") {
  const Grid g(PhaseSpace::Circle, 100);
  const auto ifs = circle_ifs({rotation(kPhi)});
  std::size_t previous = 1000;
  for (double len : {0.08, 0.1, 0.15, 0.21, 0.3, 0.5}) {
    const auto m = finite_cover(ifs, BoxSet::arc(g, 0.0, len), 60, 4096).words.size();
    CHECK(m <= previous);
    previous = m;
  }
}

TEST_CASE("property: searches are deterministic") {
  const Grid g(PhaseSpace::Circle, 128);
  const auto ifs = circle_ifs({rotation(kPhi), rotation(kSqrt2m1)});
  const auto a = finite_cover(ifs, BoxSet::arc(g, 0.0, 0.1), 12, 4096);
  const auto b = finite_cover(ifs, BoxSet::arc(g, 0.0, 0.1), 12, 4096);
  CHECK(a.words == b.words);
  MinimalityOptions o;
  o.mode = SearchMode::Greedy;
  o.seed = 17;
  o.threads = 1;
  const auto v1 = minimality_check(ifs, o);
  o.threads = 3;
  const auto v2 = minimality_check(ifs, o);
  CHECK(v1.worst_radius == v2.worst_radius);
  CHECK(v1.worst_point == v2.worst_point);
}

TEST_CASE("skew_transitivity_word examples") {
  const Grid g(PhaseSpace::Circle, 128);
  const auto ifs = circle_ifs({rotation(kPhi), rotation(kSqrt2m1)});
  SUBCASE("trivial cylinders and full sets") {
    const auto t = skew_transitivity_word(ifs, Cylinder{}, BoxSet::all(g), Cylinder{}, BoxSet::all(g), 5);
    CHECK(t.rho.size() == 1);
    CHECK(t.steps == 1);
  }
  SUBCASE("C = (1), C2 = (2,2), U = [0,0.1), V = [0.5,0.6)") {
    const Cylinder c{{0}}, c2{{1, 1}};
    const auto u = BoxSet::arc(g, 0.0, 0.1), v = BoxSet::arc(g, 0.5, 0.6);
    const auto t = skew_transitivity_word(ifs, c, u, c2, v, 20);
    REQUIRE(t.rho.size() == t.steps + 2);
    CHECK(t.rho.front() == 0);
    CHECK(t.rho[t.steps] == 1);
    CHECK(t.rho[t.steps + 1] == 1);
    CHECK(t.steps == 1 + t.connecting.size());
    // Independent re-iteration of the skew product along rho.
    Point x = t.start;
    for (std::size_t i = 0; i < t.steps; ++i) x = apply(ifs.map(t.rho[i]), x);
    CHECK(v.contains(g.box_of(x)));
    CHECK(u.contains(g.box_of(t.start)));
  }
}

TEST_CASE("sample_points and image_boxset") {
  const Grid g(PhaseSpace::Circle, 128);
  const auto u = BoxSet(g, {5});
  const auto pts = sample_points(u);
  CHECK(pts.size() >= 64);
  for (const auto& p : pts) CHECK(u.contains(g.box_of(p)));
  const auto img = image_boxset(Word::forward({0}), circle_ifs({rotation(0.5)}), u);
  CHECK(img == BoxSet(g, {69}));
  const Grid t(PhaseSpace::Torus2, 16);
  CHECK(sample_points(BoxSet(t, {3, 4})).size() >= 64);
}
