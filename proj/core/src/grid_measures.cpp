#include "ergolab/grid_measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ergolab/errors.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw UsageError(std::string(what) + ": grid mismatch");
}

// Endpoints closer than this (in box units) to a box boundary are snapped
// onto it, so grid-aligned maps give exact permutation rows.
constexpr double kSnap = 1e-9;

double snap(double v) {
  const double r = std::round(v);
  return std::fabs(v - r) < kSnap ? r : v;
}

using Row = std::vector<UlamEntry>;

void normalize_row(Row& row) {
  std::sort(row.begin(), row.end(), [](const UlamEntry& l, const UlamEntry& r) { return l.col < r.col; });
  Row merged;
  merged.reserve(row.size());
  for (const auto& e : row) {
    if (!merged.empty() && merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  double total = 0.0;
  for (const auto& e : merged) total += e.value;
  for (auto& e : merged) e.value = std::min(1.0, e.value / total);
  row = std::move(merged);
}

Row exact_interval_row(const SmoothMap& map, const Grid& grid, std::size_t i) {
  const double n = static_cast<double>(grid.resolution());
  const double y0 = apply(map, Point::circle(static_cast<double>(i) / n)).x;
  const double y1 = apply(map, Point::circle(static_cast<double>(i + 1) / n)).x;
  const double length = wrap_unit(y1 - y0);
  if (!(length > 0.0)) throw NumericalFailure("degenerate image arc in Ulam assembly", length);
  const double lo = snap(y0 * n);
  const double hi = snap(lo + length * n);
  Row row;
  for (double j = std::floor(lo); j < hi; j += 1.0) {
    const double overlap = std::min(hi, j + 1.0) - std::max(lo, j);
    if (overlap <= 0.0) continue;
    const auto col = static_cast<std::size_t>(std::fmod(j, n));
    row.push_back({col, overlap / (hi - lo)});
  }
  normalize_row(row);
  return row;
}

// Linear part of an affine torus map in the current direction.
std::array<double, 4> linear_part(const SmoothMap& map) {
  if (const auto* a = std::get_if<ToralAutomorphism>(&map.family())) {
    const auto& m = a->matrix;
    std::array<double, 4> l{static_cast<double>(m[0]), static_cast<double>(m[1]), static_cast<double>(m[2]),
                            static_cast<double>(m[3])};
    if (map.direction() == Direction::Inverse) {
      const double det = l[0] * l[3] - l[1] * l[2];
      l = {l[3] / det, -l[1] / det, -l[2] / det, l[0] / det};
    }
    return l;
  }
  return {1.0, 0.0, 0.0, 1.0};
}

using Polygon = std::vector<std::array<double, 2>>;

// Clips against the half-plane sign * p[axis] <= sign * bound.
Polygon clip(const Polygon& poly, int axis, double bound, double sign) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = poly[k];
    const auto& q = poly[(k + 1) % n];
    const bool p_in = sign * p[axis] <= sign * bound;
    const bool q_in = sign * q[axis] <= sign * bound;
    if (p_in) out.push_back(p);
    if (p_in != q_in) {
      const double t = (bound - p[axis]) / (q[axis] - p[axis]);
      out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
    }
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const auto& p = poly[k];
    const auto& q = poly[(k + 1) % poly.size()];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return std::fabs(twice) / 2.0;
}

// The image of a box under an affine torus map is a parallelogram; its
// overlap with each grid cell is computed by polygon clipping in box units.
Row exact_affine_row(const SmoothMap& map, const Grid& grid, std::size_t i) {
  const auto n = static_cast<std::int64_t>(grid.resolution());
  const double nd = static_cast<double>(n);
  const auto l = linear_part(map);
  const Point base = apply(map, Point::torus(static_cast<double>(grid.ix(i)) / nd, static_cast<double>(grid.iy(i)) / nd));
  const double bx = snap(base.x * nd);
  const double by = snap(base.y * nd);
  Polygon image{{bx, by}, {bx + l[0], by + l[2]}, {bx + l[0] + l[1], by + l[2] + l[3]}, {bx + l[1], by + l[3]}};
  double xmin = image[0][0], xmax = xmin, ymin = image[0][1], ymax = ymin;
  for (const auto& v : image) {
    xmin = std::min(xmin, v[0]);
    xmax = std::max(xmax, v[0]);
    ymin = std::min(ymin, v[1]);
    ymax = std::max(ymax, v[1]);
  }
  const double total = polygon_area(image);
  Row row;
  for (double cx = std::floor(xmin); cx < xmax; cx += 1.0) {
    const Polygon strip = clip(clip(image, 0, cx, -1.0), 0, cx + 1.0, 1.0);
    if (strip.size() < 3) continue;
    for (double cy = std::floor(ymin); cy < ymax; cy += 1.0) {
      const Polygon cell = clip(clip(strip, 1, cy, -1.0), 1, cy + 1.0, 1.0);
      if (cell.size() < 3) continue;
      const double share = polygon_area(cell) / total;
      if (share < 1e-12) continue;
      const auto jx = ((static_cast<std::int64_t>(cx) % n) + n) % n;
      const auto jy = ((static_cast<std::int64_t>(cy) % n) + n) % n;
      row.push_back({grid.box_index(static_cast<std::size_t>(jx), static_cast<std::size_t>(jy)), share});
    }
  }
  normalize_row(row);
  return row;
}

Row sampling_row(const SmoothMap& map, const Grid& grid, const UlamMethod& method, std::size_t i) {
  Engine engine(derive_seed(method.seed, i));
  Row row;
  if (grid.space() == PhaseSpace::Circle) {
    const double s = static_cast<double>(method.samples);
    const double w = 1.0 / s;
    for (std::size_t k = 0; k < method.samples; ++k) {
      const double u = (static_cast<double>(k) + uniform01(engine)) / s;
      row.push_back({grid.box_of(apply(map, grid.point_in_box(i, u))), w});
    }
  } else {
    const auto q = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(method.samples))));
    const double qd = static_cast<double>(q);
    const double w = 1.0 / (qd * qd);
    for (std::size_t a = 0; a < q; ++a) {
      for (std::size_t b = 0; b < q; ++b) {
        const double u = (static_cast<double>(a) + uniform01(engine)) / qd;
        const double v = (static_cast<double>(b) + uniform01(engine)) / qd;
        row.push_back({grid.box_of(apply(map, grid.point_in_box(i, u, v))), w});
      }
    }
  }
  normalize_row(row);
  return row;
}

UlamMatrix assemble(const Grid& grid, std::vector<Row> rows, std::string provenance) {
  std::vector<std::size_t> offsets{0};
  offsets.reserve(rows.size() + 1);
  std::vector<UlamEntry> entries;
  for (auto& r : rows) {
    entries.insert(entries.end(), r.begin(), r.end());
    offsets.push_back(entries.size());
  }
  return UlamMatrix(grid, std::move(offsets), std::move(entries), std::move(provenance));
}

}  // namespace

// ---------------------------------------------------------------- Grid

Grid::Grid(PhaseSpace space, std::size_t resolution) : space_(space), n_(resolution) {
  if (n_ < 2) throw InvariantViolation("grid resolution must be at least 2");
}

std::size_t Grid::box_index(std::size_t ix, std::size_t iy) const {
  if (ix >= n_ || (space_ == PhaseSpace::Torus2 && iy >= n_)) throw UsageError("box coordinate out of range");
  return space_ == PhaseSpace::Circle ? ix : ix * n_ + iy;
}

std::size_t Grid::box_of(const Point& p) const {
  if (p.space != space_) throw UsageError("point and grid live on different spaces");
  const double n = static_cast<double>(n_);
  const auto cx = std::min(n_ - 1, static_cast<std::size_t>(wrap_unit(p.x) * n));
  if (space_ == PhaseSpace::Circle) return cx;
  const auto cy = std::min(n_ - 1, static_cast<std::size_t>(wrap_unit(p.y) * n));
  return cx * n_ + cy;
}

Point Grid::point_in_box(std::size_t box, double u, double v) const {
  if (box >= box_count()) throw UsageError("box index out of range");
  const double n = static_cast<double>(n_);
  if (space_ == PhaseSpace::Circle) return Point::circle((static_cast<double>(box) + u) / n);
  return Point::torus((static_cast<double>(ix(box)) + u) / n, (static_cast<double>(iy(box)) + v) / n);
}

std::vector<std::size_t> Grid::neighbors(std::size_t box) const {
  if (space_ == PhaseSpace::Circle) return {(box + n_ - 1) % n_, (box + 1) % n_};
  const std::size_t x = ix(box);
  const std::size_t y = iy(box);
  return {box_index((x + n_ - 1) % n_, y), box_index((x + 1) % n_, y), box_index(x, (y + n_ - 1) % n_),
          box_index(x, (y + 1) % n_)};
}

// ---------------------------------------------------------------- BoxSet

BoxSet::BoxSet(Grid grid, std::vector<std::size_t> boxes) : grid_(grid), boxes_(std::move(boxes)) {
  std::sort(boxes_.begin(), boxes_.end());
  boxes_.erase(std::unique(boxes_.begin(), boxes_.end()), boxes_.end());
  if (!boxes_.empty() && boxes_.back() >= grid_.box_count()) throw UsageError("box index out of range");
}

BoxSet BoxSet::all(const Grid& grid) {
  std::vector<std::size_t> boxes(grid.box_count());
  std::iota(boxes.begin(), boxes.end(), std::size_t{0});
  return BoxSet(grid, std::move(boxes));
}

namespace {
bool in_arc(double c, double a, double b) {
  const double length = b - a;
  if (length >= 1.0) return true;
  const double span = length < 0.0 ? wrap_unit(length) : length;
  return wrap_unit(c - a) < span;
}
}  // namespace

BoxSet BoxSet::arc(const Grid& grid, double a, double b) {
  if (grid.space() != PhaseSpace::Circle) throw UsageError("arc box sets live on the circle");
  std::vector<std::size_t> boxes;
  for (std::size_t i = 0; i < grid.box_count(); ++i) {
    if (in_arc(grid.box_center(i).x, a, b)) boxes.push_back(i);
  }
  return BoxSet(grid, std::move(boxes));
}

BoxSet BoxSet::rect(const Grid& grid, double x0, double x1, double y0, double y1) {
  if (grid.space() != PhaseSpace::Torus2) throw UsageError("rectangle box sets live on the torus");
  std::vector<std::size_t> boxes;
  for (std::size_t i = 0; i < grid.box_count(); ++i) {
    const Point c = grid.box_center(i);
    if (in_arc(c.x, x0, x1) && in_arc(c.y, y0, y1)) boxes.push_back(i);
  }
  return BoxSet(grid, std::move(boxes));
}

BoxSet BoxSet::from_mask(const Grid& grid, const std::vector<bool>& mask) {
  if (mask.size() != grid.box_count()) throw UsageError("mask size does not match grid");
  std::vector<std::size_t> boxes;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) boxes.push_back(i);
  }
  return BoxSet(grid, std::move(boxes));
}

bool BoxSet::contains(std::size_t box) const { return std::binary_search(boxes_.begin(), boxes_.end(), box); }

std::vector<bool> BoxSet::mask() const {
  std::vector<bool> m(grid_.box_count(), false);
  for (auto b : boxes_) m[b] = true;
  return m;
}

BoxSet BoxSet::complement() const {
  auto m = mask();
  m.flip();
  return from_mask(grid_, m);
}

BoxSet BoxSet::unite(const BoxSet& other) const {
  require_same_grid(grid_, other.grid_, "BoxSet union");
  std::vector<std::size_t> out;
  std::set_union(boxes_.begin(), boxes_.end(), other.boxes_.begin(), other.boxes_.end(), std::back_inserter(out));
  return BoxSet(grid_, std::move(out));
}

BoxSet BoxSet::symmetric_difference(const BoxSet& other) const {
  require_same_grid(grid_, other.grid_, "BoxSet symmetric difference");
  std::vector<std::size_t> out;
  std::set_symmetric_difference(boxes_.begin(), boxes_.end(), other.boxes_.begin(), other.boxes_.end(),
                                std::back_inserter(out));
  return BoxSet(grid_, std::move(out));
}

BoxSet BoxSet::dilate() const {
  const std::size_t n = grid_.resolution();
  auto m = mask();
  std::vector<bool> out = m;
  for (auto b : boxes_) {
    if (grid_.space() == PhaseSpace::Circle) {
      out[(b + 1) % n] = true;
      out[(b + n - 1) % n] = true;
      continue;
    }
    const std::size_t x = grid_.ix(b);
    const std::size_t y = grid_.iy(b);
    for (std::size_t dx = 0; dx < 3; ++dx) {
      for (std::size_t dy = 0; dy < 3; ++dy) {
        out[grid_.box_index((x + n + dx - 1) % n, (y + n + dy - 1) % n)] = true;
      }
    }
  }
  return from_mask(grid_, out);
}

// ---------------------------------------------------------------- GridMeasure

GridMeasure::GridMeasure(Grid grid, std::vector<double> weights) : grid_(grid), weights_(std::move(weights)) {
  if (weights_.size() != grid_.box_count()) throw UsageError("measure size does not match grid");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvariantViolation("measure weights must be finite and nonnegative");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw InvariantViolation("measure must have total mass 1");
}

GridMeasure GridMeasure::uniform(const Grid& grid) {
  return GridMeasure(grid, std::vector<double>(grid.box_count(), 1.0 / static_cast<double>(grid.box_count())));
}

GridMeasure GridMeasure::point_mass(const Grid& grid, std::size_t box) {
  std::vector<double> w(grid.box_count(), 0.0);
  if (box >= w.size()) throw UsageError("box index out of range");
  w[box] = 1.0;
  return GridMeasure(grid, std::move(w));
}

GridMeasure GridMeasure::normalized(const Grid& grid, std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (!(sum > 0.0)) throw InvariantViolation("cannot normalize a zero measure");
  for (double& w : weights) w /= sum;
  return GridMeasure(grid, std::move(weights));
}

double GridMeasure::mass(const BoxSet& set) const {
  require_same_grid(grid_, set.grid(), "GridMeasure::mass");
  double m = 0.0;
  for (auto b : set.boxes()) m += weights_[b];
  return m;
}

double GridMeasure::total() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

// ---------------------------------------------------------------- UlamMatrix

UlamMatrix::UlamMatrix(Grid grid, std::vector<std::size_t> row_offsets, std::vector<UlamEntry> entries,
                       std::string provenance)
    : grid_(grid), offsets_(std::move(row_offsets)), entries_(std::move(entries)), provenance_(std::move(provenance)) {
  const std::size_t n = grid_.box_count();
  if (offsets_.size() != n + 1 || offsets_.front() != 0 || offsets_.back() != entries_.size())
    throw UsageError("malformed CSR offsets");
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const auto& e = entries_[k];
      if (e.col >= n) throw UsageError("column index out of range");
      if (!(e.value >= 0.0 && e.value <= 1.0)) throw InvariantViolation("Ulam entries must lie in [0,1]");
      sum += e.value;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw InvariantViolation("Ulam matrix rows must sum to 1");
  }
}

std::span<const UlamEntry> UlamMatrix::row(std::size_t i) const {
  if (i >= size()) throw UsageError("row index out of range");
  return std::span<const UlamEntry>(entries_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

double UlamMatrix::at(std::size_t i, std::size_t j) const {
  for (const auto& e : row(i)) {
    if (e.col == j) return e.value;
  }
  return 0.0;
}

UlamMatrix UlamMatrix::identity(const Grid& grid) {
  std::vector<Row> rows(grid.box_count());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = {{i, 1.0}};
  return assemble(grid, std::move(rows), "identity");
}

UlamMethod UlamMethod::default_for(PhaseSpace space, std::uint64_t seed) {
  (void)space;
  (void)seed;
  return exact();
}

UlamMatrix ulam_matrix(const SmoothMap& map, const Grid& grid, const UlamMethod& method, unsigned threads) {
  if (map.space() != grid.space()) throw UsageError("map and grid live on different spaces");
  std::string provenance = map.describe();
  if (method.kind == UlamMethod::Kind::Exact) {
    provenance += " exact";
  } else {
    if (method.samples < 16) throw UsageError("sampling needs at least 16 points per box");
    if (grid.space() == PhaseSpace::Torus2) {
      const auto q = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(method.samples))));
      if (q * q != method.samples) throw UsageError("torus sampling needs a square number of points per box");
    }
    provenance += " sampling(" + std::to_string(method.samples) + ")";
  }
  std::vector<Row> rows(grid.box_count());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    if (method.kind == UlamMethod::Kind::Sampling) {
      rows[i] = sampling_row(map, grid, method, i);
    } else {
      rows[i] = grid.space() == PhaseSpace::Circle ? exact_interval_row(map, grid, i) : exact_affine_row(map, grid, i);
    }
  });
  return assemble(grid, std::move(rows), std::move(provenance));
}

UlamMatrix annealed_matrix(std::span<const UlamMatrix> parts, std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) throw UsageError("annealed_matrix: one weight per matrix");
  const Grid& grid = parts.front().grid();
  std::string provenance = "annealed{";
  for (std::size_t k = 0; k < parts.size(); ++k) {
    require_same_grid(grid, parts[k].grid(), "annealed_matrix");
    provenance += (k ? "; " : "") + parts[k].provenance();
  }
  provenance += "}";
  if (parts.size() == 1) {
    return UlamMatrix(parts.front());
  }
  std::vector<Row> rows(grid.box_count());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < parts.size(); ++k) {
      for (const auto& e : parts[k].row(i)) rows[i].push_back({e.col, weights[k] * e.value});
    }
    normalize_row(rows[i]);
  }
  return assemble(grid, std::move(rows), std::move(provenance));
}

UlamMatrix annealed_matrix(const IFSystem& ifs, const Grid& grid, const UlamMethod& method, unsigned threads) {
  std::vector<UlamMatrix> parts;
  parts.reserve(ifs.size());
  for (std::size_t k = 0; k < ifs.size(); ++k) {
    UlamMethod m = method;
    m.seed = derive_seed(method.seed, 1000003 + k);
    parts.push_back(ulam_matrix(ifs.map(k), grid, m, threads));
  }
  return annealed_matrix(parts, ifs.probs());
}

UlamMatrix multiply(const UlamMatrix& a, const UlamMatrix& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  const std::size_t n = a.size();
  std::vector<Row> rows(n);
  std::vector<double> acc(n, 0.0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (const auto& ea : a.row(i)) {
      for (const auto& eb : b.row(ea.col)) {
        if (acc[eb.col] == 0.0) touched.push_back(eb.col);
        acc[eb.col] += ea.value * eb.value;
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (auto j : touched) {
      if (acc[j] > 0.0) rows[i].push_back({j, acc[j]});
      acc[j] = 0.0;
    }
    normalize_row(rows[i]);
  }
  return assemble(a.grid(), std::move(rows), "(" + a.provenance() + ") * (" + b.provenance() + ")");
}

// ---------------------------------------------------------------- functionals

std::vector<double> pushforward_weights(std::span<const double> mu, const UlamMatrix& p) {
  if (mu.size() != p.size()) throw UsageError("pushforward: size mismatch");
  std::vector<double> out(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double m = mu[i];
    if (m == 0.0) continue;
    for (const auto& e : p.row(i)) out[e.col] += m * e.value;
  }
  return out;
}

GridMeasure pushforward(const GridMeasure& mu, const UlamMatrix& p) {
  require_same_grid(mu.grid(), p.grid(), "pushforward");
  return GridMeasure(mu.grid(), pushforward_weights(mu.weights(), p));
}

double tv_distance(std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size()) throw UsageError("tv_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::fabs(mu[i] - nu[i]);
  return 0.5 * s;
}

double tv_distance(const GridMeasure& mu, const GridMeasure& nu) {
  require_same_grid(mu.grid(), nu.grid(), "tv_distance");
  return tv_distance(mu.weights(), nu.weights());
}

BoxSet preimage_boxset(const UlamMatrix& p, const BoxSet& a, double theta) {
  require_same_grid(p.grid(), a.grid(), "preimage_boxset");
  if (!(theta > 0.0 && theta <= 1.0)) throw UsageError("preimage threshold must lie in (0,1]");
  const auto in_a = a.mask();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double mass = 0.0;
    for (const auto& e : p.row(i)) {
      if (in_a[e.col]) mass += e.value;
    }
    // Tolerance absorbs roundoff in rows that split exactly at theta.
    if (mass >= theta - 1e-12) out.push_back(i);
  }
  return BoxSet(p.grid(), std::move(out));
}

BoxSet preimage_boxset(const SmoothMap& map, const BoxSet& a, const Grid& grid, double theta) {
  return preimage_boxset(ulam_matrix(map, grid, UlamMethod::default_for(grid.space())), a, theta);
}

double symmetric_difference_score(std::span<const UlamMatrix> maps, const GridMeasure& mu, const BoxSet& a,
                                  double theta) {
  double score = 0.0;
  for (const auto& p : maps) score += mu.mass(preimage_boxset(p, a, theta).symmetric_difference(a));
  return score;
}

double symmetric_difference_score(const IFSystem& ifs, const GridMeasure& mu, const BoxSet& a, double theta) {
  std::vector<UlamMatrix> maps;
  for (const auto& m : ifs.maps()) maps.push_back(ulam_matrix(m, mu.grid(), UlamMethod::default_for(ifs.space())));
  return symmetric_difference_score(maps, mu, a, theta);
}

QuasiInvarianceReport quasi_invariance_check(const GridMeasure& mu, const UlamMatrix& p, double eps) {
  if (!(eps >= 0.0)) throw UsageError("quasi_invariance_check: eps must be nonnegative");
  require_same_grid(mu.grid(), p.grid(), "quasi_invariance_check");
  const auto pushed = pushforward_weights(mu.weights(), p);
  QuasiInvarianceReport report;
  for (std::size_t j = 0; j < pushed.size(); ++j) {
    if (pushed[j] > eps && !(mu[j] > 0.0)) report.violating_boxes.push_back(j);
  }
  report.quasi_invariant = report.violating_boxes.empty();
  return report;
}

QuasiInvarianceReport quasi_invariance_check(const GridMeasure& mu, const SmoothMap& map, double eps) {
  return quasi_invariance_check(mu, ulam_matrix(map, mu.grid(), UlamMethod::default_for(mu.grid().space())), eps);
}

void write_csv(std::ostream& out, const UlamMatrix& p) {
  const auto old = out.precision(17);
  out << "row,col,value\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (const auto& e : p.row(i)) out << i << ',' << e.col << ',' << e.value << '\n';
  }
  out.precision(old);
}

void write_csv(std::ostream& out, const GridMeasure& mu) {
  const auto old = out.precision(17);
  out << "box,weight\n";
  for (std::size_t i = 0; i < mu.weights().size(); ++i) out << i << ',' << mu[i] << '\n';
  out.precision(old);
}

}  // namespace ergolab
