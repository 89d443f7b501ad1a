#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ergolab/phase_maps.hpp"

namespace ergolab {

/// Uniform partition of the phase space into half-open boxes.  The circle
/// has N boxes [i/N, (i+1)/N); the torus has N*N boxes with index
/// ix * N + iy.
class Grid {
 public:
  Grid(PhaseSpace space, std::size_t resolution);

  PhaseSpace space() const noexcept { return space_; }
  std::size_t resolution() const noexcept { return n_; }
  std::size_t box_count() const noexcept { return space_ == PhaseSpace::Circle ? n_ : n_ * n_; }

  std::size_t box_of(const Point& p) const;
  std::size_t box_index(std::size_t ix, std::size_t iy = 0) const;
  std::size_t ix(std::size_t box) const { return space_ == PhaseSpace::Circle ? box : box / n_; }
  std::size_t iy(std::size_t box) const { return space_ == PhaseSpace::Circle ? 0 : box % n_; }
  /// Point at fractional offsets (u, v) in [0,1) inside a box.
  Point point_in_box(std::size_t box, double u, double v = 0.5) const;
  Point box_center(std::size_t box) const { return point_in_box(box, 0.5, 0.5); }
  /// Edge-adjacent boxes with wrap-around (2 on the circle, 4 on the torus).
  std::vector<std::size_t> neighbors(std::size_t box) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  PhaseSpace space_;
  std::size_t n_;
};

/// Deduplicated, sorted set of boxes of a grid.
class BoxSet {
 public:
  explicit BoxSet(Grid grid) : grid_(grid) {}
  BoxSet(Grid grid, std::vector<std::size_t> boxes);

  static BoxSet all(const Grid& grid);
  /// Circle boxes whose centers lie in the arc [a, b) (taken mod 1).
  static BoxSet arc(const Grid& grid, double a, double b);
  /// Torus boxes whose centers lie in [x0,x1) x [y0,y1) (each taken mod 1).
  static BoxSet rect(const Grid& grid, double x0, double x1, double y0, double y1);
  static BoxSet from_mask(const Grid& grid, const std::vector<bool>& mask);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const std::size_t> boxes() const noexcept { return boxes_; }
  std::size_t size() const noexcept { return boxes_.size(); }
  bool empty() const noexcept { return boxes_.empty(); }
  bool contains(std::size_t box) const;
  std::vector<bool> mask() const;

  BoxSet complement() const;
  BoxSet unite(const BoxSet& other) const;
  BoxSet symmetric_difference(const BoxSet& other) const;
  /// Adds every edge- or corner-adjacent box.
  BoxSet dilate() const;

  friend bool operator==(const BoxSet&, const BoxSet&) = default;

 private:
  Grid grid_;
  std::vector<std::size_t> boxes_;
};

/// Probability measure carried by the boxes of a grid.
class GridMeasure {
 public:
  /// Validates nonnegativity and total mass 1 within 1e-9.
  GridMeasure(Grid grid, std::vector<double> weights);

  static GridMeasure uniform(const Grid& grid);
  static GridMeasure point_mass(const Grid& grid, std::size_t box);
  /// Rescales nonnegative weights to total mass one.
  static GridMeasure normalized(const Grid& grid, std::vector<double> weights);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](std::size_t box) const { return weights_[box]; }
  double mass(const BoxSet& set) const;
  double total() const;

 private:
  Grid grid_;
  std::vector<double> weights_;
};

struct UlamEntry {
  std::size_t col;
  double value;
};

/// Row-stochastic sparse matrix: entry (i, j) is the fraction of box i
/// mapped into box j.  Measures are row vectors, so a pushforward is mu * P.
class UlamMatrix {
 public:
  /// Takes CSR arrays; validates entries in [0,1] and unit row sums.
  UlamMatrix(Grid grid, std::vector<std::size_t> row_offsets, std::vector<UlamEntry> entries,
             std::string provenance);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.box_count(); }
  std::span<const UlamEntry> row(std::size_t i) const;
  double at(std::size_t i, std::size_t j) const;
  std::size_t nonzeros() const noexcept { return entries_.size(); }
  const std::string& provenance() const noexcept { return provenance_; }

  static UlamMatrix identity(const Grid& grid);

 private:
  Grid grid_;
  std::vector<std::size_t> offsets_;
  std::vector<UlamEntry> entries_;
  std::string provenance_;
};

struct UlamMethod {
  /// Exact: image-interval overlaps on the circle, image-parallelogram
  /// overlaps for the affine torus families.
  enum class Kind { Exact, Sampling };
  Kind kind = Kind::Exact;
  /// Sampling: points per box (circle: strata; torus: must be a square q*q).
  std::size_t samples = 64;
  std::uint64_t seed = 0;

  static UlamMethod exact() { return {}; }
  static UlamMethod sampling(std::size_t samples, std::uint64_t seed = 0) {
    return {Kind::Sampling, samples, seed};
  }
  /// Exact assembly; every bundled family admits it.
  static UlamMethod default_for(PhaseSpace space, std::uint64_t seed = 0);
};

UlamMatrix ulam_matrix(const SmoothMap& map, const Grid& grid, const UlamMethod& method,
                       unsigned threads = 1);

/// sum_i p_i Ulam(f_i).
UlamMatrix annealed_matrix(const IFSystem& ifs, const Grid& grid, const UlamMethod& method,
                           unsigned threads = 1);
UlamMatrix annealed_matrix(std::span<const UlamMatrix> parts, std::span<const double> weights);

/// Matrix product A * B; in the row-vector convention Ulam(g o f) ~ Ulam(f) * Ulam(g).
UlamMatrix multiply(const UlamMatrix& a, const UlamMatrix& b);

/// mu * P.
GridMeasure pushforward(const GridMeasure& mu, const UlamMatrix& p);
std::vector<double> pushforward_weights(std::span<const double> mu, const UlamMatrix& p);

double tv_distance(const GridMeasure& mu, const GridMeasure& nu);
double tv_distance(std::span<const double> mu, std::span<const double> nu);

/// Boxes whose Ulam row puts mass >= theta into A (discrete f^{-1}(A)).
BoxSet preimage_boxset(const UlamMatrix& p, const BoxSet& a, double theta = 0.5);
BoxSet preimage_boxset(const SmoothMap& map, const BoxSet& a, const Grid& grid, double theta = 0.5);

/// sum over f in F of mu(f^{-1}(A) delta A), preimages at threshold theta.
double symmetric_difference_score(const IFSystem& ifs, const GridMeasure& mu, const BoxSet& a,
                                  double theta = 0.5);
double symmetric_difference_score(std::span<const UlamMatrix> maps, const GridMeasure& mu,
                                  const BoxSet& a, double theta = 0.5);

struct QuasiInvarianceReport {
  bool quasi_invariant = true;
  std::vector<std::size_t> violating_boxes;
};

/// True iff every box receiving more than eps of f*mu already carries mass
/// under mu (discrete absolute continuity f*mu << mu).
QuasiInvarianceReport quasi_invariance_check(const GridMeasure& mu, const UlamMatrix& p, double eps);
QuasiInvarianceReport quasi_invariance_check(const GridMeasure& mu, const SmoothMap& map, double eps);

/// CSV exports: "row,col,value" and "box,weight".
void write_csv(std::ostream& out, const UlamMatrix& p);
void write_csv(std::ostream& out, const GridMeasure& mu);

}  // namespace ergolab
