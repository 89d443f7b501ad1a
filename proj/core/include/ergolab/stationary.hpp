#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ergolab/grid_measures.hpp"

namespace ergolab {

struct StationaryOptions {
  double tol = 1e-8;
  std::size_t max_iter = 2'000'000;
};

struct StationaryResult {
  GridMeasure measure;
  /// tv(mu, mu P), recomputed explicitly for the returned measure.
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// "power" for a raw iterate, "cesaro" for the running average.
  std::string estimator;
};

/// Fixed point of mu -> mu P by power iteration from the uniform measure.
/// The running (Cesaro) average is tracked alongside the raw iterate, so
/// periodic chains converge too.  On max_iter the better of the two
/// candidates is returned with converged = false.
StationaryResult stationary_measure(const UlamMatrix& p, const StationaryOptions& options = {});
StationaryResult stationary_measure(const IFSystem& ifs, const Grid& grid, const StationaryOptions& options = {},
                                    const UlamMethod& method = {}, unsigned threads = 1);

struct SupportDecomposition {
  /// Closed communicating classes of the thresholded support graph.
  std::vector<BoxSet> components;
  /// Support boxes that belong to no closed class.
  std::vector<std::size_t> transient;
};

/// Builds the graph on {i : mu_i > tol} with edges i -> j iff P[i][j] > tol
/// and returns its closed strongly connected classes.  Throws UsageError on
/// empty support.
SupportDecomposition decompose_support(const UlamMatrix& p, const GridMeasure& mu, double tol = 1e-10);
std::vector<BoxSet> ergodic_components(const UlamMatrix& p, const GridMeasure& mu, double tol = 1e-10);

struct PositivityReport {
  bool positive = true;
  std::size_t block = 1;
  /// Largest null run (circle: run length; torus: side of the largest null
  /// square) and the box where it starts (lowest index / lower-left corner).
  std::size_t largest_null_extent = 0;
  std::size_t largest_null_start = 0;
};

/// True iff every run of `block` consecutive boxes (circle) or every
/// block x block square (torus), with wrap-around, has mass > null_tol.
PositivityReport open_positivity_check(const GridMeasure& mu, std::size_t block, double null_tol = 0.0);

struct OpennessReport {
  std::size_t size = 0;
  std::size_t interior = 0;
  std::size_t boundary = 0;
  double boundary_fraction = 0.0;
  /// Boundary boxes a single connected, grid-open piece may carry per unit
  /// of resolution: 2 on the circle (two arc ends), 4 on the torus.
  double perimeter_bound = 0.0;
  /// 2 * perimeter_bound / N.
  double threshold = 0.0;
  bool grid_open = false;
};

OpennessReport component_is_open_mod0(const BoxSet& component);

}  // namespace ergolab
