#include "ergolab/semigroup_topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

namespace {

Point apply_letter(const IFSystem& ifs, const Letter& letter, const Point& p) {
  const SmoothMap& m = ifs.map(letter.map);
  return letter.direction == Direction::Forward ? apply(m, p) : apply_inverse(m, p);
}

// ------------------------------------------------------------ minimality

// Cells of side h; a cell is "covered" once a visited cell lies within
// Chebyshev distance 1.  Full coverage bounds the covering radius by 2h on
// the circle and 2*sqrt(2)*h on the torus.
class CoverageLattice {
 public:
  CoverageLattice(PhaseSpace space, double eps) : space_(space) {
    const double factor = space == PhaseSpace::Circle ? 2.0 : 2.0 * std::numbers::sqrt2;
    m_ = static_cast<std::size_t>(std::ceil(factor / eps));
    const std::size_t total = space == PhaseSpace::Circle ? m_ : m_ * m_;
    visited_.assign(total, 0);
    covered_.assign(total, 0);
  }

  std::size_t cell(const Point& p) const {
    const auto cx = std::min(m_ - 1, static_cast<std::size_t>(p.x * static_cast<double>(m_)));
    if (space_ == PhaseSpace::Circle) return cx;
    const auto cy = std::min(m_ - 1, static_cast<std::size_t>(p.y * static_cast<double>(m_)));
    return cx * m_ + cy;
  }

  void visit(const Point& p) {
    const std::size_t c = cell(p);
    if (visited_[c]) return;
    visited_[c] = 1;
    if (space_ == PhaseSpace::Circle) {
      for (std::size_t d = 0; d < 3; ++d) mark((c + m_ + d - 1) % m_);
      return;
    }
    const std::size_t x = c / m_, y = c % m_;
    for (std::size_t dx = 0; dx < 3; ++dx) {
      for (std::size_t dy = 0; dy < 3; ++dy) mark(((x + m_ + dx - 1) % m_) * m_ + (y + m_ + dy - 1) % m_);
    }
  }

  bool complete() const { return covered_count_ == covered_.size(); }

  // Torus covering-radius bound from the Chebyshev ring distance of every
  // cell to its nearest visited cell.
  double radius_bound() const {
    const double h = 1.0 / static_cast<double>(m_);
    std::size_t worst = 0;
    for (std::size_t x = 0; x < m_; ++x) {
      for (std::size_t y = 0; y < m_; ++y) {
        std::size_t r = 0;
        while (r < m_ && !ring_hit(x, y, r)) ++r;
        worst = std::max(worst, r);
      }
    }
    return std::numbers::sqrt2 * static_cast<double>(worst + 1) * h;
  }

 private:
  void mark(std::size_t c) {
    if (!covered_[c]) {
      covered_[c] = 1;
      ++covered_count_;
    }
  }

  bool ring_hit(std::size_t x, std::size_t y, std::size_t r) const {
    const auto ri = static_cast<long long>(r);
    const auto m = static_cast<long long>(m_);
    for (long long dx = -ri; dx <= ri; ++dx) {
      for (long long dy = -ri; dy <= ri; ++dy) {
        if (std::max(std::llabs(dx), std::llabs(dy)) != ri) continue;
        const auto cx = static_cast<std::size_t>(((static_cast<long long>(x) + dx) % m + m) % m);
        const auto cy = static_cast<std::size_t>(((static_cast<long long>(y) + dy) % m + m) % m);
        if (visited_[cx * m_ + cy]) return true;
      }
    }
    return false;
  }

  PhaseSpace space_;
  std::size_t m_ = 0;
  std::vector<std::uint8_t> visited_;
  std::vector<std::uint8_t> covered_;
  std::size_t covered_count_ = 0;
};

// Remembers which points were already reached.
class PointMemory {
 public:
  PointMemory(PhaseSpace space, SearchMode mode, double eps) : space_(space), mode_(mode) {
    if (mode_ == SearchMode::Greedy) {
      m_ = static_cast<std::size_t>(std::ceil(16.0 / eps));
      cells_.assign(space == PhaseSpace::Circle ? m_ : m_ * m_, 0);
    }
  }

  bool insert(const Point& p) {
    if (mode_ == SearchMode::Exhaustive) {
      // Quantize to 2^-40 (circle) or 2^-32 per axis (torus).
      std::uint64_t key;
      if (space_ == PhaseSpace::Circle) {
        key = static_cast<std::uint64_t>(std::llround(p.x * 0x1.0p40)) & ((std::uint64_t{1} << 40) - 1);
      } else {
        const auto qx = static_cast<std::uint64_t>(std::llround(p.x * 0x1.0p32)) & 0xffffffffULL;
        const auto qy = static_cast<std::uint64_t>(std::llround(p.y * 0x1.0p32)) & 0xffffffffULL;
        key = (qx << 32) | qy;
      }
      return seen_.insert(key).second;
    }
    const double m = static_cast<double>(m_);
    auto c = std::min(m_ - 1, static_cast<std::size_t>(p.x * m));
    if (space_ == PhaseSpace::Torus2) c = c * m_ + std::min(m_ - 1, static_cast<std::size_t>(p.y * m));
    if (cells_[c]) return false;
    cells_[c] = 1;
    return true;
  }

 private:
  PhaseSpace space_;
  SearchMode mode_;
  std::unordered_set<std::uint64_t> seen_;
  std::size_t m_ = 0;
  std::vector<std::uint8_t> cells_;
};

struct OrbitCoverage {
  double radius = 0.0;
  bool closed = false;
};

double circle_covering_radius(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double gap = xs.front() + 1.0 - xs.back();
  for (std::size_t i = 1; i < xs.size(); ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
  return 0.5 * gap;
}

OrbitCoverage explore_orbit(const IFSystem& ifs, const Point& start, const MinimalityOptions& opt) {
  CoverageLattice lattice(ifs.space(), opt.eps);
  PointMemory memory(ifs.space(), opt.mode, opt.eps);
  std::vector<Point> frontier{start};
  std::vector<double> xs;  // circle orbit, for the exact covering radius
  OrbitCoverage out;
  for (std::size_t level = 1; level <= opt.max_len; ++level) {
    std::vector<Point> next;
    for (const auto& p : frontier) {
      for (const auto& m : ifs.maps()) {
        const Point q = apply(m, p);
        if (!memory.insert(q)) continue;
        next.push_back(q);
        lattice.visit(q);
        if (ifs.space() == PhaseSpace::Circle) xs.push_back(q.x);
      }
    }
    if (lattice.complete()) break;
    if (next.empty()) {
      out.closed = opt.mode == SearchMode::Exhaustive;
      break;
    }
    frontier = std::move(next);
  }
  if (ifs.space() == PhaseSpace::Circle) {
    out.radius = circle_covering_radius(std::move(xs));
  } else {
    out.radius = lattice.radius_bound();
  }
  return out;
}

std::size_t word_count(std::size_t k, std::size_t max_len, std::size_t cap) {
  std::size_t total = 0, level = 1;
  for (std::size_t l = 1; l <= max_len; ++l) {
    if (level > cap / k) return cap + 1;
    level *= k;
    total += level;
    if (total > cap) return cap + 1;
  }
  return total;
}

// ------------------------------------------------------------ images

struct Arc {
  double start;
  double length;
};

std::vector<Arc> arcs_of(const BoxSet& set) {
  const std::size_t n = set.grid().resolution();
  const double nd = static_cast<double>(n);
  if (set.size() == n) return {{0.0, 1.0}};
  const auto mask = set.mask();
  std::vector<Arc> arcs;
  // Start scanning just after an empty box so runs never wrap mid-scan.
  std::size_t origin = 0;
  while (mask[origin]) ++origin;
  std::size_t run_start = 0, run = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t b = (origin + k) % n;
    if (mask[b]) {
      if (run == 0) run_start = b;
      ++run;
    } else if (run > 0) {
      arcs.push_back({static_cast<double>(run_start) / nd, static_cast<double>(run) / nd});
      run = 0;
    }
  }
  return arcs;
}

std::vector<Arc> advance_arcs(const std::vector<Arc>& arcs, const IFSystem& ifs, const Letter& letter) {
  std::vector<Arc> out;
  out.reserve(arcs.size());
  for (const auto& a : arcs) {
    if (a.length >= 1.0) {
      out.push_back(a);  // homeomorphisms map the circle onto itself
      continue;
    }
    // Keep pieces short so the image length is unambiguous mod 1.
    const std::size_t pieces = a.length > 0.25 ? static_cast<std::size_t>(std::ceil(a.length / 0.25)) : 1;
    const double step = a.length / static_cast<double>(pieces);
    for (std::size_t i = 0; i < pieces; ++i) {
      const double s = a.start + step * static_cast<double>(i);
      const double y0 = apply_letter(ifs, letter, Point::circle(s)).x;
      const double y1 = apply_letter(ifs, letter, Point::circle(s + step)).x;
      out.push_back({y0, wrap_unit(y1 - y0)});
    }
  }
  return out;
}

BoxSet boxes_of_arcs(const std::vector<Arc>& arcs, const Grid& grid) {
  const std::size_t n = grid.resolution();
  const double nd = static_cast<double>(n);
  std::vector<bool> mask(n, false);
  for (const auto& a : arcs) {
    if (a.length >= 1.0) return BoxSet::all(grid);
    const double lo = a.start * nd;
    const double hi = lo + a.length * nd;
    for (double j = std::floor(lo); j < hi; j += 1.0) {
      const double overlap = std::min(hi, j + 1.0) - std::max(lo, j);
      if (overlap > 1e-9) mask[static_cast<std::size_t>(std::fmod(j, nd))] = true;
    }
  }
  return BoxSet::from_mask(grid, mask);
}

std::vector<Point> torus_image_samples(const BoxSet& set) {
  std::vector<Point> pts;
  pts.reserve(set.size() * 64);
  for (auto b : set.boxes()) {
    for (int a = 0; a < 8; ++a) {
      for (int c = 0; c < 8; ++c) pts.push_back(set.grid().point_in_box(b, (a + 0.5) / 8.0, (c + 0.5) / 8.0));
    }
  }
  return pts;
}

BoxSet boxes_of_points(const std::vector<Point>& pts, const Grid& grid) {
  std::vector<bool> mask(grid.box_count(), false);
  for (const auto& p : pts) mask[grid.box_of(p)] = true;
  return BoxSet::from_mask(grid, mask);
}

// Image of a box set carried through a word one letter at a time.
struct ImageState {
  std::vector<Arc> arcs;    // circle
  std::vector<Point> pts;   // torus

  static ImageState of(const BoxSet& set) {
    ImageState s;
    if (set.grid().space() == PhaseSpace::Circle) {
      s.arcs = arcs_of(set);
    } else {
      s.pts = torus_image_samples(set);
    }
    return s;
  }

  ImageState advance(const IFSystem& ifs, const Letter& letter) const {
    ImageState s;
    if (ifs.space() == PhaseSpace::Circle) {
      s.arcs = advance_arcs(arcs, ifs, letter);
    } else {
      s.pts.reserve(pts.size());
      for (const auto& p : pts) s.pts.push_back(apply_letter(ifs, letter, p));
    }
    return s;
  }

  BoxSet boxes(const Grid& grid) const {
    return grid.space() == PhaseSpace::Circle ? boxes_of_arcs(arcs, grid) : boxes_of_points(pts, grid).dilate();
  }
};

// ------------------------------------------------------------ witness search

struct Hit {
  std::vector<std::size_t> symbols;
  std::size_t sample = 0;
  Point landing;
};

class WitnessSearch {
 public:
  WitnessSearch(const IFSystem& ifs, std::vector<Point> samples, const BoxSet& target, std::size_t budget)
      : ifs_(ifs), target_(target.mask()), grid_(target.grid()), budget_(budget) {
    images_.push_back(std::move(samples));
  }

  std::optional<Hit> run(std::size_t max_len) {
    for (std::size_t len = 1; len <= max_len; ++len) {
      images_.resize(len + 1);
      word_.assign(len, 0);
      if (auto hit = dfs(0, len)) return hit;
    }
    return std::nullopt;
  }

 private:
  std::optional<Hit> dfs(std::size_t depth, std::size_t len) {
    if (depth == len) {
      const auto& pts = images_[len];
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (target_[grid_.box_of(pts[i])]) return Hit{word_, i, pts[i]};
      }
      return std::nullopt;
    }
    for (std::size_t s = 0; s < ifs_.size(); ++s) {
      const auto& src = images_[depth];
      evaluations_ += src.size();
      if (evaluations_ > budget_) throw BudgetExhausted("witness search exceeded its evaluation budget");
      auto& dst = images_[depth + 1];
      dst.resize(src.size());
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = apply(ifs_.map(s), src[i]);
      word_[depth] = s;
      if (auto hit = dfs(depth + 1, len)) return hit;
    }
    return std::nullopt;
  }

  const IFSystem& ifs_;
  std::vector<bool> target_;
  Grid grid_;
  std::size_t budget_;
  std::size_t evaluations_ = 0;
  std::vector<std::vector<Point>> images_;
  std::vector<std::size_t> word_;
};

constexpr std::size_t kWitnessBudget = 400'000'000;

void require_grid_space(const IFSystem& ifs, const BoxSet& set, const char* what) {
  if (set.grid().space() != ifs.space()) throw UsageError(std::string(what) + ": box set and IFS spaces differ");
}

}  // namespace

MinimalityVerdict minimality_check(const IFSystem& ifs, const MinimalityOptions& options) {
  if (!(options.eps > 0.0)) throw UsageError("minimality_check: eps must be positive");
  if (options.sample < 1) throw UsageError("minimality_check: need at least one sampled start");
  if (options.max_len < 1) throw UsageError("minimality_check: max_len must be >= 1");
  if (options.mode == SearchMode::Exhaustive &&
      word_count(ifs.size(), options.max_len, options.word_cap) > options.word_cap) {
    throw BudgetExhausted("exhaustive minimality search would enumerate more than " +
                          std::to_string(options.word_cap) + " words; rerun in greedy mode");
  }
  const IFSystem system = options.direction == Direction::Forward ? ifs : ifs.inverse();

  std::vector<Point> starts;
  Engine engine(derive_seed(options.seed, 0x5eed));
  for (std::size_t i = 0; i < options.sample; ++i) {
    const double x = uniform01(engine);
    const double y = uniform01(engine);
    starts.push_back(ifs.space() == PhaseSpace::Circle ? Point::circle(x) : Point::torus(x, y));
  }
  if (options.grid && options.grid->resolution() <= 256) {
    if (options.grid->space() != ifs.space()) throw UsageError("minimality_check: grid on the wrong space");
    for (std::size_t b = 0; b < options.grid->box_count(); ++b) starts.push_back(options.grid->box_center(b));
  }

  std::vector<OrbitCoverage> results(starts.size());
  parallel_for(starts.size(), options.threads,
               [&](std::size_t i) { results[i] = explore_orbit(system, starts[i], options); });

  MinimalityVerdict verdict;
  verdict.starts_tested = starts.size();
  std::size_t worst = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].radius > results[worst].radius) worst = i;
  }
  verdict.worst_point = starts[worst];
  verdict.worst_radius = results[worst].radius;
  verdict.minimal = verdict.worst_radius <= options.eps;
  if (!verdict.minimal) {
    for (const auto& r : results) {
      if (r.closed && r.radius > options.eps) verdict.certified_negative = true;
    }
  }
  return verdict;
}

std::vector<Point> sample_points(const BoxSet& set, std::size_t min_total) {
  if (set.empty()) throw UsageError("sample_points: empty box set");
  const auto per_box = (min_total + set.size() - 1) / set.size();
  std::vector<Point> pts;
  if (set.grid().space() == PhaseSpace::Circle) {
    const std::size_t p = std::max<std::size_t>(16, per_box);
    for (auto b : set.boxes()) {
      for (std::size_t k = 0; k < p; ++k) pts.push_back(set.grid().point_in_box(b, (static_cast<double>(k) + 0.5) / static_cast<double>(p)));
    }
    return pts;
  }
  const auto q = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(per_box)))));
  const double qd = static_cast<double>(q);
  for (auto b : set.boxes()) {
    for (std::size_t a = 0; a < q; ++a) {
      for (std::size_t c = 0; c < q; ++c) {
        pts.push_back(set.grid().point_in_box(b, (static_cast<double>(a) + 0.5) / qd, (static_cast<double>(c) + 0.5) / qd));
      }
    }
  }
  return pts;
}

WitnessResult strong_transitivity_witness(const IFSystem& ifs, const BoxSet& u, const BoxSet& w,
                                          std::size_t max_len) {
  require_grid_space(ifs, u, "strong_transitivity_witness");
  if (u.empty() || w.empty()) throw UsageError("strong_transitivity_witness: U and W must be nonempty");
  if (!(u.grid() == w.grid())) throw UsageError("strong_transitivity_witness: U and W on different grids");
  const auto samples = sample_points(u);
  WitnessSearch search(ifs, samples, w, kWitnessBudget);
  const auto hit = search.run(max_len);
  if (!hit) {
    throw BudgetExhausted("no word of length <= " + std::to_string(max_len) + " maps U into W (inconclusive)");
  }
  WitnessResult result{Word::forward(hit->symbols), samples[hit->sample], hit->landing};
  // Re-evaluate from scratch through the public composition path.
  const Point check = apply_word(result.word, ifs, result.start);
  if (!w.contains(w.grid().box_of(check))) throw NumericalFailure("witness failed re-verification", 1.0);
  return result;
}

BoxSet image_boxset(const Word& word, const IFSystem& ifs, const BoxSet& set) {
  require_grid_space(ifs, set, "image_boxset");
  ImageState state = ImageState::of(set);
  for (const auto& letter : word.letters()) state = state.advance(ifs, letter);
  return state.boxes(set.grid());
}

CoverResult finite_cover(const IFSystem& ifs, const BoxSet& u, std::size_t max_len, std::size_t max_words) {
  require_grid_space(ifs, u, "finite_cover");
  if (u.empty()) throw UsageError("finite_cover: U must be nonempty");
  const Grid& grid = u.grid();
  const std::size_t n = grid.box_count();

  struct Candidate {
    Word word;
    std::vector<bool> mask;
  };
  std::vector<Candidate> candidates;
  std::vector<std::pair<Word, ImageState>> level{{Word{}, ImageState::of(u)}};
  for (std::size_t len = 1; len <= max_len && candidates.size() < max_words; ++len) {
    std::vector<std::pair<Word, ImageState>> next;
    for (const auto& [word, state] : level) {
      for (std::size_t s = 0; s < ifs.size() && candidates.size() < max_words; ++s) {
        const Letter letter{s, Direction::Forward};
        Word child = word;
        child.push_back(letter);
        ImageState image = state.advance(ifs, letter);
        candidates.push_back({child, image.boxes(grid).mask()});
        next.emplace_back(std::move(child), std::move(image));
      }
    }
    level = std::move(next);
  }

  CoverResult result;
  result.candidates_examined = candidates.size();
  std::vector<bool> covered(n, false);
  std::size_t covered_count = 0;
  std::vector<bool> used(candidates.size(), false);
  while (covered_count < n) {
    std::size_t best = candidates.size(), best_gain = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      std::size_t gain = 0;
      for (std::size_t b = 0; b < n; ++b) gain += (candidates[c].mask[b] && !covered[b]) ? 1 : 0;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best == candidates.size()) {
      const double fraction = static_cast<double>(covered_count) / static_cast<double>(n);
      throw BudgetExhausted("cover incomplete after " + std::to_string(candidates.size()) +
                                " candidate words: coverage " + std::to_string(fraction),
                            fraction);
    }
    used[best] = true;
    for (std::size_t b = 0; b < n; ++b) {
      if (candidates[best].mask[b] && !covered[b]) {
        covered[b] = true;
        ++covered_count;
      }
    }
    result.words.push_back(candidates[best].word);
    result.images.push_back(BoxSet::from_mask(grid, candidates[best].mask));
  }

  // Reverse-delete: drop words, latest first, whose boxes are all covered
  // by another chosen image.
  std::vector<std::size_t> multiplicity(n, 0);
  for (const auto& img : result.images) {
    for (auto b : img.boxes()) ++multiplicity[b];
  }
  for (std::size_t i = result.words.size(); i-- > 0;) {
    const auto boxes = result.images[i].boxes();
    if (std::all_of(boxes.begin(), boxes.end(), [&](std::size_t b) { return multiplicity[b] >= 2; })) {
      for (auto b : boxes) --multiplicity[b];
      result.words.erase(result.words.begin() + static_cast<std::ptrdiff_t>(i));
      result.images.erase(result.images.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }

  // Re-verification: sampled point images must fall inside the claimed
  // images, and the Ulam-support images must cover the grid.
  const auto samples = sample_points(u);
  std::vector<UlamMatrix> ulam;
  for (const auto& m : ifs.maps()) ulam.push_back(ulam_matrix(m, grid, UlamMethod::default_for(grid.space(), 0xc0de)));
  std::vector<bool> support_union(n, false);
  for (std::size_t i = 0; i < result.words.size(); ++i) {
    for (const auto& p : samples) {
      if (!result.images[i].contains(grid.box_of(apply_word(result.words[i], ifs, p)))) {
        throw NumericalFailure("cover image misses a sampled point image", 1.0);
      }
    }
    auto reach = u.mask();
    for (const auto& letter : result.words[i].letters()) {
      std::vector<bool> next(n, false);
      for (std::size_t b = 0; b < n; ++b) {
        if (!reach[b]) continue;
        for (const auto& e : ulam[letter.map].row(b)) next[e.col] = true;
      }
      reach = std::move(next);
    }
    if (grid.space() == PhaseSpace::Torus2) reach = BoxSet::from_mask(grid, reach).dilate().mask();
    for (std::size_t b = 0; b < n; ++b) support_union[b] = support_union[b] || reach[b];
  }
  if (std::find(support_union.begin(), support_union.end(), false) != support_union.end()) {
    throw NumericalFailure("cover failed Ulam-support re-verification", 1.0);
  }
  return result;
}

SkewTransitivity skew_transitivity_word(const IFSystem& ifs, const Cylinder& c, const BoxSet& u,
                                        const Cylinder& c2, const BoxSet& v, std::size_t max_len) {
  require_grid_space(ifs, u, "skew_transitivity_word");
  if (u.empty() || v.empty()) throw UsageError("skew_transitivity_word: U and V must be nonempty");
  for (const auto* cyl : {&c, &c2}) {
    for (auto s : cyl->prefix) {
      if (s >= ifs.size()) throw UsageError("cylinder symbol out of range");
    }
  }
  const auto starts = sample_points(u);
  // Push U through the cylinder's fixed prefix: f^j_omega(U).
  const Word prefix = Word::forward(c.prefix);
  std::vector<Point> pushed;
  pushed.reserve(starts.size());
  for (const auto& p : starts) pushed.push_back(apply_word(prefix, ifs, p));

  WitnessSearch search(ifs, pushed, v, kWitnessBudget);
  const auto hit = search.run(max_len);
  if (!hit) {
    throw BudgetExhausted("no connecting word of length <= " + std::to_string(max_len) + " (inconclusive)");
  }

  SkewTransitivity out;
  out.connecting = Word::forward(hit->symbols);
  out.rho = c.prefix;
  out.rho.insert(out.rho.end(), hit->symbols.begin(), hit->symbols.end());
  out.steps = out.rho.size();
  out.rho.insert(out.rho.end(), c2.prefix.begin(), c2.prefix.end());
  out.start = starts[hit->sample];

  // Verify by direct iteration of the skew product along rho.
  Point x = out.start;
  for (std::size_t t = 0; t < out.steps; ++t) x = apply(ifs.map(out.rho[t]), x);
  out.landing = x;
  const auto tail = std::span<const std::size_t>(out.rho).subspan(out.steps);
  if (!c.contains(out.rho) || !c2.contains(tail) || !v.contains(v.grid().box_of(x))) {
    throw NumericalFailure("skew transitivity word failed re-verification", 1.0);
  }
  return out;
}

}  // namespace ergolab
