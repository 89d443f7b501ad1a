#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ergolab/grid_measures.hpp"
#include "ergolab/phase_maps.hpp"

namespace ergolab {

enum class SearchMode {
  /// Every word up to max_len (points within about 1e-10 are merged).
  Exhaustive,
  /// Breadth-first over points, dropping images that land in an already
  /// visited cell of side eps/16.  Explores a subset of the exhaustive
  /// orbit, so a positive verdict is still sound.
  Greedy,
};

struct MinimalityOptions {
  Direction direction = Direction::Forward;
  double eps = 0.05;
  std::size_t max_len = 40;
  /// Seeded random starting points.
  std::size_t sample = 16;
  std::uint64_t seed = 0;
  SearchMode mode = SearchMode::Exhaustive;
  /// When set and its resolution is <= 256, every box center is tested too.
  std::optional<Grid> grid;
  unsigned threads = 1;
  /// Exhaustive mode refuses when sum_{l<=max_len} k^l exceeds this.
  std::size_t word_cap = std::size_t{1} << 22;
};

struct MinimalityVerdict {
  /// "minimal up to (eps, max_len)".
  bool minimal = false;
  /// A finite invariant orbit that is not eps-dense was found.
  bool certified_negative = false;
  Point worst_point;
  /// Covering radius of the worst start's orbit (exact on the circle, an
  /// upper bound on the torus).
  double worst_radius = 0.0;
  std::size_t starts_tested = 0;
};

/// Tests whether, for every start x, {w(x) : 1 <= |w| <= max_len} is
/// eps-dense, with words over F (forward) or F^{-1} (inverse).
MinimalityVerdict minimality_check(const IFSystem& ifs, const MinimalityOptions& options);

/// Deterministic dense sample of a box set: strata midpoints inside every
/// box, at least `min_total` points overall (16 per box on the circle,
/// 4x4 on the torus, refined for small sets).
std::vector<Point> sample_points(const BoxSet& set, std::size_t min_total = 64);

struct WitnessResult {
  Word word;
  /// A sampled point of U and its image under `word`, which lies in W.
  Point start;
  Point landing;
};

/// First forward word in (length, lexicographic) order whose image of U
/// meets W, checked on point images of a dense sample of U.  Throws
/// BudgetExhausted (inconclusive) if nothing is found up to max_len.
WitnessResult strong_transitivity_witness(const IFSystem& ifs, const BoxSet& u, const BoxSet& w,
                                          std::size_t max_len);

/// Boxes met by the image of `set` under a word: exact arc images on the
/// circle; 8x8 stratified samples per box plus one-box dilation on the
/// torus.
BoxSet image_boxset(const Word& word, const IFSystem& ifs, const BoxSet& set);

struct CoverResult {
  std::vector<Word> words;
  std::vector<BoxSet> images;
  std::size_t candidates_examined = 0;
};

/// Greedy set cover of the grid by images T_i(U) of forward words.  Throws
/// BudgetExhausted carrying the coverage fraction if the candidates run out.
CoverResult finite_cover(const IFSystem& ifs, const BoxSet& u, std::size_t max_len, std::size_t max_words);

struct SkewTransitivity {
  /// Symbol prefix (0-based): C's word, the connecting word, C2's word.
  std::vector<std::size_t> rho;
  /// |C| + |connecting word|: iterations of the skew product that carry
  /// (rho, start) from C x U into C2 x V.
  std::size_t steps = 0;
  Word connecting;
  Point start;
  Point landing;
};

SkewTransitivity skew_transitivity_word(const IFSystem& ifs, const Cylinder& c, const BoxSet& u,
                                        const Cylinder& c2, const BoxSet& v, std::size_t max_len);

}  // namespace ergolab
