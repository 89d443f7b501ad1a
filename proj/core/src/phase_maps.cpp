#include "ergolab/phase_maps.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_space(const SmoothMap& map, const Point& p) {
  if (p.space != map.space()) {
    throw UsageError("point on " + std::string(to_string(p.space)) + " passed to a map on " +
                     std::string(to_string(map.space())));
  }
}

std::int64_t determinant(const ToralAutomorphism& t) {
  return t.matrix[0] * t.matrix[3] - t.matrix[1] * t.matrix[2];
}

ToralAutomorphism inverse_matrix(const ToralAutomorphism& t) {
  const std::int64_t det = determinant(t);  // +-1, so 1/det == det
  return ToralAutomorphism{{det * t.matrix[3], -det * t.matrix[1], -det * t.matrix[2],
                            det * t.matrix[0]}};
}

Point apply_automorphism(const ToralAutomorphism& t, const Point& p) {
  const auto& m = t.matrix;
  return Point::torus(static_cast<double>(m[0]) * p.x + static_cast<double>(m[1]) * p.y,
                      static_cast<double>(m[2]) * p.x + static_cast<double>(m[3]) * p.y);
}

// Lift of the diffeo without the constant shift: g(x) = x + b/(2 pi m) sin(2 pi m x).
double diffeo_core(const CircleDiffeo& f, double x) {
  const double m = f.mode;
  return x + f.b / (kTwoPi * m) * std::sin(kTwoPi * m * x);
}

double diffeo_slope(const CircleDiffeo& f, double x) {
  return 1.0 + f.b * std::cos(kTwoPi * f.mode * x);
}

double diffeo_forward(const CircleDiffeo& f, double x) { return wrap_unit(f.a + diffeo_core(f, x)); }

double diffeo_inverse(const CircleDiffeo& f, double y) {
  // g is increasing with |g(x) - x| <= |b|/(2 pi m) < 0.16, so the solution of
  // g(x) = target lies in [target - 0.25, target + 0.25].
  const double target = y - f.a;
  double lo = target - 0.25;
  double hi = target + 0.25;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (diffeo_core(f, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int step = 0; step < 10; ++step) {
    const double r = diffeo_core(f, x) - target;
    if (r == 0.0) break;
    const double next = x - r / diffeo_slope(f, x);
    if (next == x) break;
    x = next;
  }
  const double result = wrap_unit(x);
  const double residual = circle_distance(diffeo_forward(f, result), wrap_unit(y));
  if (!(residual <= 1e-12)) {
    throw NumericalFailure("CircleDiffeo inverse did not converge", residual);
  }
  return result;
}

Point forward_value(const MapFamily& family, const Point& p) {
  return std::visit(
      overloaded{
          [&](const Rotation& r) { return Point::circle(p.x + r.alpha); },
          [&](const CircleDiffeo& f) { return Point::circle(diffeo_forward(f, p.x)); },
          [&](const ToralAutomorphism& t) { return apply_automorphism(t, p); },
          [&](const ToralTranslation& t) { return Point::torus(p.x + t.v1, p.y + t.v2); },
      },
      family);
}

Point inverse_value(const MapFamily& family, const Point& p) {
  return std::visit(
      overloaded{
          [&](const Rotation& r) { return Point::circle(p.x - r.alpha); },
          [&](const CircleDiffeo& f) { return Point::circle(diffeo_inverse(f, p.x)); },
          [&](const ToralAutomorphism& t) { return apply_automorphism(inverse_matrix(t), p); },
          [&](const ToralTranslation& t) { return Point::torus(p.x - t.v1, p.y - t.v2); },
      },
      family);
}

}  // namespace

std::string_view to_string(PhaseSpace space) {
  return space == PhaseSpace::Circle ? "circle" : "torus";
}

int dimension(PhaseSpace space) { return space == PhaseSpace::Circle ? 1 : 2; }

std::string_view to_string(Direction direction) {
  return direction == Direction::Forward ? "forward" : "inverse";
}

Point Point::circle(double x) { return Point{PhaseSpace::Circle, wrap_unit(x), 0.0}; }

Point Point::torus(double x, double y) { return Point{PhaseSpace::Torus2, wrap_unit(x), wrap_unit(y)}; }

double wrap_unit(double v) {
  double r = v - std::floor(v);
  // v slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

double circle_distance(double a, double b) {
  const double d = std::fabs(wrap_unit(a) - wrap_unit(b));
  return std::min(d, 1.0 - d);
}

double distance(const Point& p, const Point& q) {
  if (p.space != q.space) throw UsageError("distance between points on different spaces");
  if (p.space == PhaseSpace::Circle) return circle_distance(p.x, q.x);
  return std::hypot(circle_distance(p.x, q.x), circle_distance(p.y, q.y));
}

SmoothMap::SmoothMap(MapFamily family, Direction direction)
    : family_(std::move(family)), direction_(direction) {
  std::visit(overloaded{
                 [](const Rotation& r) {
                   if (!std::isfinite(r.alpha)) throw InvariantViolation("Rotation: alpha must be finite");
                 },
                 [](const CircleDiffeo& f) {
                   if (!std::isfinite(f.a) || !std::isfinite(f.b))
                     throw InvariantViolation("CircleDiffeo: parameters must be finite");
                   if (!(std::fabs(f.b) < 1.0))
                     throw InvariantViolation("CircleDiffeo: |b| < 1 required for a diffeomorphism");
                   if (f.mode < 1) throw InvariantViolation("CircleDiffeo: mode must be >= 1");
                 },
                 [](const ToralAutomorphism& t) {
                   const auto det = determinant(t);
                   if (det != 1 && det != -1)
                     throw InvariantViolation("ToralAutomorphism: |det L| = 1 required");
                 },
                 [](const ToralTranslation& t) {
                   if (!std::isfinite(t.v1) || !std::isfinite(t.v2))
                     throw InvariantViolation("ToralTranslation: vector must be finite");
                 },
             },
             family_);
}

PhaseSpace SmoothMap::space() const noexcept {
  return std::holds_alternative<Rotation>(family_) || std::holds_alternative<CircleDiffeo>(family_)
             ? PhaseSpace::Circle
             : PhaseSpace::Torus2;
}

bool SmoothMap::volume_preserving() const noexcept {
  if (const auto* f = std::get_if<CircleDiffeo>(&family_)) return f->b == 0.0;
  return true;
}

std::string SmoothMap::describe() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(overloaded{
                 [&](const Rotation& r) { out << "Rotation(" << r.alpha << ")"; },
                 [&](const CircleDiffeo& f) {
                   out << "CircleDiffeo(a=" << f.a << ", b=" << f.b << ", mode=" << f.mode << ")";
                 },
                 [&](const ToralAutomorphism& t) {
                   out << "ToralAutomorphism([[" << t.matrix[0] << "," << t.matrix[1] << "],["
                       << t.matrix[2] << "," << t.matrix[3] << "]])";
                 },
                 [&](const ToralTranslation& t) {
                   out << "ToralTranslation(" << t.v1 << ", " << t.v2 << ")";
                 },
             },
             family_);
  if (direction_ == Direction::Inverse) out << "^-1";
  return out.str();
}

SmoothMap SmoothMap::inverse() const {
  return SmoothMap(family_, direction_ == Direction::Forward ? Direction::Inverse : Direction::Forward);
}

Point apply(const SmoothMap& map, const Point& x) {
  require_space(map, x);
  return map.direction() == Direction::Forward ? forward_value(map.family(), x)
                                               : inverse_value(map.family(), x);
}

Point apply_inverse(const SmoothMap& map, const Point& y) { return apply(map.inverse(), y); }

double map_derivative(const SmoothMap& map, const Point& x) {
  require_space(map, x);
  return std::visit(
      overloaded{
          [](const Rotation&) { return 1.0; },
          [&](const CircleDiffeo& f) {
            if (map.direction() == Direction::Forward) return diffeo_slope(f, x.x);
            return 1.0 / diffeo_slope(f, diffeo_inverse(f, x.x));
          },
          [](const ToralAutomorphism& t) { return static_cast<double>(std::llabs(determinant(t))); },
          [](const ToralTranslation&) { return 1.0; },
      },
      map.family());
}

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

Word Word::forward(std::span<const std::size_t> symbols) {
  std::vector<Letter> letters;
  letters.reserve(symbols.size());
  for (auto s : symbols) letters.push_back({s, Direction::Forward});
  return Word(std::move(letters));
}

Word Word::forward(std::initializer_list<std::size_t> symbols) {
  return forward(std::span<const std::size_t>(symbols.begin(), symbols.size()));
}

bool Word::all(Direction direction) const noexcept {
  for (const auto& l : letters_) {
    if (l.direction != direction) return false;
  }
  return true;
}

std::vector<std::size_t> Word::symbols() const {
  std::vector<std::size_t> out;
  out.reserve(letters_.size());
  for (const auto& l : letters_) out.push_back(l.map);
  return out;
}

Word Word::then(const Word& next) const {
  auto letters = letters_;
  letters.insert(letters.end(), next.letters_.begin(), next.letters_.end());
  return Word(std::move(letters));
}

bool Cylinder::contains(std::span<const std::size_t> sequence) const {
  if (sequence.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (sequence[i] != prefix[i]) return false;
  }
  return true;
}

IFSystem::IFSystem(PhaseSpace space, std::vector<SmoothMap> maps, std::vector<double> probs)
    : space_(space), maps_(std::move(maps)), probs_(std::move(probs)) {
  if (maps_.empty()) throw InvariantViolation("IFS needs at least one map");
  if (probs_.size() != maps_.size())
    throw InvariantViolation("IFS needs exactly one probability per map");
  for (const auto& m : maps_) {
    if (m.space() != space_)
      throw InvariantViolation("map " + m.describe() + " does not act on the " +
                               std::string(to_string(space_)));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p)) throw InvariantViolation("probabilities must be finite");
    if (maps_.size() > 1 && !(p > 0.0 && p < 1.0))
      throw InvariantViolation("each probability must lie strictly inside (0,1)");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw InvariantViolation("probabilities must sum to 1");
}

const SmoothMap& IFSystem::map(std::size_t i) const {
  if (i >= maps_.size()) throw UsageError("map index out of range");
  return maps_[i];
}

bool IFSystem::volume_preserving() const noexcept {
  for (const auto& m : maps_) {
    if (!m.volume_preserving()) return false;
  }
  return true;
}

IFSystem IFSystem::inverse() const {
  std::vector<SmoothMap> inv;
  inv.reserve(maps_.size());
  for (const auto& m : maps_) inv.push_back(m.inverse());
  return IFSystem(space_, std::move(inv), probs_);
}

Point apply_word(const Word& word, const IFSystem& ifs, const Point& x) {
  Point p = x;
  for (const auto& letter : word.letters()) {
    const SmoothMap& m = ifs.map(letter.map);
    p = letter.direction == Direction::Forward ? apply(m, p) : apply_inverse(m, p);
  }
  return p;
}

}  // namespace ergolab
