#include "ergolab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

void renormalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  for (double& x : v) x /= s;
}

// Iterative Tarjan over an adjacency list; returns the component id of every
// vertex, ids in order of completion (sinks of the condensation first).
std::vector<std::size_t> tarjan(const std::vector<std::vector<std::size_t>>& graph, std::size_t& count) {
  constexpr auto kUnvisited = std::numeric_limits<std::size_t>::max();
  const std::size_t n = graph.size();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (vertex, next edge)
  std::size_t counter = 0;
  count = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge < graph[v].size()) {
        const std::size_t w = graph[v][edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      const std::size_t finished = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[finished]);
    }
  }
  return comp;
}

}  // namespace

StationaryResult stationary_measure(const UlamMatrix& p, const StationaryOptions& options) {
  if (!(options.tol > 0.0)) throw UsageError("stationary_measure: tol must be positive");
  const std::size_t n = p.size();
  const std::vector<double> start(n, 1.0 / static_cast<double>(n));
  std::vector<double> v = start;
  std::vector<double> sum(n, 0.0);  // sum of v_0 .. v_{t}
  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<double> best = v;
  std::string best_estimator = "power";

  auto finish = [&](std::vector<double> w, std::string estimator, std::size_t iterations, bool converged_hint) {
    renormalize(w);
    const double residual = tv_distance(w, pushforward_weights(w, p));
    GridMeasure mu(p.grid(), std::move(w));
    return StationaryResult{std::move(mu), residual, iterations, converged_hint && residual <= options.tol,
                            std::move(estimator)};
  };

  for (std::size_t t = 0; t < options.max_iter; ++t) {
    for (std::size_t i = 0; i < n; ++i) sum[i] += v[i];
    auto next = pushforward_weights(v, p);
    renormalize(next);
    const double raw_residual = tv_distance(v, next);
    if (raw_residual <= options.tol) {
      auto result = finish(v, "power", t + 1, true);
      if (result.converged) return result;
    }
    if (raw_residual < best_residual) {
      best_residual = raw_residual;
      best = v;
      best_estimator = "power";
    }
    // The Cesaro mean a_t = sum / (t+1) satisfies a_t P - a_t = (v_{t+1} - v_0) / (t+1).
    const double cesaro_bound = tv_distance(next, start) / static_cast<double>(t + 1);
    if (cesaro_bound <= options.tol) {
      auto result = finish(sum, "cesaro", t + 1, true);
      if (result.converged) return result;
    }
    if (cesaro_bound < best_residual) {
      best_residual = cesaro_bound;
      best = sum;
      best_estimator = "cesaro";
    }
    v = std::move(next);
  }
  return finish(best, best_estimator, options.max_iter, false);
}

StationaryResult stationary_measure(const IFSystem& ifs, const Grid& grid, const StationaryOptions& options,
                                    const UlamMethod& method, unsigned threads) {
  return stationary_measure(annealed_matrix(ifs, grid, method, threads), options);
}

SupportDecomposition decompose_support(const UlamMatrix& p, const GridMeasure& mu, double tol) {
  if (!(p.grid() == mu.grid())) throw UsageError("decompose_support: grid mismatch");
  const std::size_t n = p.size();
  std::vector<std::size_t> local(n, n);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i) {
    if (mu[i] > tol) {
      local[i] = support.size();
      support.push_back(i);
    }
  }
  if (support.empty()) throw UsageError("measure has empty support at this threshold");

  std::vector<std::vector<std::size_t>> graph(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) {
    for (const auto& e : p.row(support[k])) {
      if (e.value > tol && local[e.col] != n) graph[k].push_back(local[e.col]);
    }
  }
  std::size_t count = 0;
  const auto comp = tarjan(graph, count);

  std::vector<bool> closed(count, true);
  for (std::size_t k = 0; k < graph.size(); ++k) {
    for (auto w : graph[k]) {
      if (comp[w] != comp[k]) closed[comp[k]] = false;
    }
  }
  std::vector<std::vector<std::size_t>> members(count);
  SupportDecomposition out;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (closed[comp[k]]) {
      members[comp[k]].push_back(support[k]);
    } else {
      out.transient.push_back(support[k]);
    }
  }
  for (auto& m : members) {
    if (!m.empty()) out.components.emplace_back(p.grid(), std::move(m));
  }
  std::sort(out.components.begin(), out.components.end(),
            [](const BoxSet& a, const BoxSet& b) { return a.boxes().front() < b.boxes().front(); });
  return out;
}

std::vector<BoxSet> ergodic_components(const UlamMatrix& p, const GridMeasure& mu, double tol) {
  return decompose_support(p, mu, tol).components;
}

PositivityReport open_positivity_check(const GridMeasure& mu, std::size_t block, double null_tol) {
  if (block < 1) throw UsageError("open_positivity_check: block must be >= 1");
  const Grid& grid = mu.grid();
  const std::size_t n = grid.resolution();
  PositivityReport report;
  report.block = block;

  if (grid.space() == PhaseSpace::Circle) {
    // Longest cyclic run of null boxes.
    std::size_t best = 0, best_start = 0, run = 0;
    for (std::size_t k = 0; k < 2 * n; ++k) {
      if (mu[k % n] <= null_tol) {
        ++run;
        if (run > best) {
          best = std::min(run, n);
          best_start = (k + 1 - run) % n;
        }
      } else {
        run = 0;
      }
    }
    report.largest_null_extent = best;
    report.largest_null_start = best_start;
    report.positive = best < block;
    return report;
  }

  // Torus: prefix sums of null indicators over a doubled array, then the
  // largest square side s such that some s x s window is entirely null.
  const std::size_t m = 2 * n;
  std::vector<std::size_t> prefix((m + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return prefix[i * (m + 1) + j]; };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t null = mu[grid.box_index(i % n, j % n)] <= null_tol ? 1 : 0;
      at(i + 1, j + 1) = null + at(i, j + 1) + at(i + 1, j) - at(i, j);
    }
  }
  auto find_null_square = [&](std::size_t s, std::size_t& corner) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t count = at(i + s, j + s) - at(i, j + s) - at(i + s, j) + at(i, j);
        if (count == s * s) {
          corner = grid.box_index(i, j);
          return true;
        }
      }
    }
    return false;
  };
  std::size_t lo = 0, hi = n;  // largest s in [lo, hi] with a null square
  std::size_t corner = 0;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    std::size_t c = 0;
    if (find_null_square(mid, c)) {
      lo = mid;
      corner = c;
    } else {
      hi = mid - 1;
    }
  }
  report.largest_null_extent = lo;
  report.largest_null_start = corner;
  report.positive = lo < block;
  return report;
}

OpennessReport component_is_open_mod0(const BoxSet& component) {
  if (component.empty()) throw UsageError("component_is_open_mod0: empty component");
  const Grid& grid = component.grid();
  OpennessReport r;
  r.size = component.size();
  for (auto b : component.boxes()) {
    bool interior = true;
    for (auto nb : grid.neighbors(b)) {
      if (!component.contains(nb)) {
        interior = false;
        break;
      }
    }
    interior ? ++r.interior : ++r.boundary;
  }
  r.boundary_fraction = static_cast<double>(r.boundary) / static_cast<double>(r.size);
  r.perimeter_bound = 2.0 * dimension(grid.space());
  r.threshold = 2.0 * r.perimeter_bound / static_cast<double>(grid.resolution());
  r.grid_open = r.boundary_fraction <= r.threshold + 1e-15;
  return r;
}

}  // namespace ergolab
