#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ergolab {

enum class PhaseSpace { Circle, Torus2 };

std::string_view to_string(PhaseSpace space);
int dimension(PhaseSpace space);

/// A point on the circle or the 2-torus; coordinates live in [0,1).
/// The y coordinate is ignored (and kept at 0) on the circle.
struct Point {
  PhaseSpace space = PhaseSpace::Circle;
  double x = 0.0;
  double y = 0.0;

  static Point circle(double x);
  static Point torus(double x, double y);

  friend bool operator==(const Point&, const Point&) = default;
};

/// Reduces a real number to [0,1).
double wrap_unit(double v);

/// min(|a-b|, 1-|a-b|) for a, b on the unit circle.
double circle_distance(double a, double b);

/// Circle distance on S^1; Euclidean combination of per-axis circle
/// distances on T^2.
double distance(const Point& p, const Point& q);

// Parametric map families.  Each describes the forward map.

/// x -> x + alpha (mod 1).
struct Rotation {
  double alpha = 0.0;
};

/// x -> x + a + b/(2 pi m) sin(2 pi m x) (mod 1), derivative 1 + b cos(2 pi m x).
/// |b| < 1 keeps it a diffeomorphism; `mode` m >= 1 is the harmonic.
struct CircleDiffeo {
  double a = 0.0;
  double b = 0.0;
  int mode = 1;
};

/// (x,y) -> L (x,y) (mod 1) with an integer matrix L, |det L| = 1.
/// Entries are stored row-major: {l11, l12, l21, l22}.
struct ToralAutomorphism {
  std::array<std::int64_t, 4> matrix{1, 0, 0, 1};
};

/// (x,y) -> (x + v1, y + v2) (mod 1).
struct ToralTranslation {
  double v1 = 0.0;
  double v2 = 0.0;
};

using MapFamily = std::variant<Rotation, CircleDiffeo, ToralAutomorphism, ToralTranslation>;

enum class Direction { Forward, Inverse };

std::string_view to_string(Direction direction);

/// A member of the parametric menu together with the direction it is used
/// in.  Construction validates the family invariants.
class SmoothMap {
 public:
  explicit SmoothMap(MapFamily family, Direction direction = Direction::Forward);

  const MapFamily& family() const noexcept { return family_; }
  Direction direction() const noexcept { return direction_; }
  PhaseSpace space() const noexcept;
  bool volume_preserving() const noexcept;
  std::string describe() const;

  SmoothMap inverse() const;

 private:
  MapFamily family_;
  Direction direction_;
};

Point apply(const SmoothMap& map, const Point& x);

/// Inverse image of y.  Closed form for every family except CircleDiffeo,
/// which uses bisection on the monotone lift followed by Newton polishing.
/// Throws NumericalFailure if the residual stays above 1e-12.
Point apply_inverse(const SmoothMap& map, const Point& y);

/// Jacobian determinant of the lift at x.
double map_derivative(const SmoothMap& map, const Point& x);

/// One symbol of a semigroup word: a 0-based map index and a direction.
struct Letter {
  std::size_t map = 0;
  Direction direction = Direction::Forward;

  friend bool operator==(const Letter&, const Letter&) = default;
};

/// A finite composition of IFS maps, applied left to right: the first
/// letter acts first.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);

  /// All-forward word from 0-based map indices.
  static Word forward(std::span<const std::size_t> symbols);
  static Word forward(std::initializer_list<std::size_t> symbols);

  std::span<const Letter> letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  bool all(Direction direction) const noexcept;

  /// 0-based map indices in order (directions dropped).
  std::vector<std::size_t> symbols() const;

  Word then(const Word& next) const;
  void push_back(Letter letter) { letters_.push_back(letter); }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

/// A cylinder in the one-sided symbol space: the set of sequences whose
/// first symbols equal `prefix` (0-based).  Empty prefix = whole space.
struct Cylinder {
  std::vector<std::size_t> prefix;

  bool contains(std::span<const std::size_t> sequence) const;
};

/// Finite family of maps on a common phase space with selection
/// probabilities.
class IFSystem {
 public:
  IFSystem(PhaseSpace space, std::vector<SmoothMap> maps, std::vector<double> probs);

  PhaseSpace space() const noexcept { return space_; }
  std::size_t size() const noexcept { return maps_.size(); }
  std::span<const SmoothMap> maps() const noexcept { return maps_; }
  const SmoothMap& map(std::size_t i) const;
  std::span<const double> probs() const noexcept { return probs_; }
  bool volume_preserving() const noexcept;

  /// The system generated by the inverse maps, same probabilities.
  IFSystem inverse() const;

 private:
  PhaseSpace space_;
  std::vector<SmoothMap> maps_;
  std::vector<double> probs_;
};

Point apply_word(const Word& word, const IFSystem& ifs, const Point& x);

}  // namespace ergolab
