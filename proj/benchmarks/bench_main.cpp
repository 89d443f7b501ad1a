#include <benchmark/benchmark.h>

#include <cmath>

#include "ergolab/grid_measures.hpp"
#include "ergolab/semigroup_topology.hpp"
#include "ergolab/skew_product.hpp"
#include "ergolab/stationary.hpp"

using namespace ergolab;

namespace {

const double kPhi = (std::sqrt(5.0) - 1.0) / 2.0;

IFSystem torus_system() {
  return IFSystem(PhaseSpace::Torus2,
                  {SmoothMap(ToralAutomorphism{{2, 1, 1, 1}}), SmoothMap(ToralTranslation{kPhi, std::sqrt(2.0) - 1.0})},
                  {0.5, 0.5});
}

void BM_UlamExactCircle(benchmark::State& state) {
  const Grid g(PhaseSpace::Circle, static_cast<std::size_t>(state.range(0)));
  const SmoothMap f(CircleDiffeo{0.1, 0.5, 1});
  for (auto _ : state) benchmark::DoNotOptimize(ulam_matrix(f, g, UlamMethod::exact()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_UlamExactCircle)->Arg(128)->Arg(1024)->Arg(4096);

void BM_UlamSampledTorus(benchmark::State& state) {
  const Grid g(PhaseSpace::Torus2, static_cast<std::size_t>(state.range(0)));
  const SmoothMap f(ToralAutomorphism{{2, 1, 1, 1}});
  for (auto _ : state) benchmark::DoNotOptimize(ulam_matrix(f, g, UlamMethod::sampling(64, 1)));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_UlamSampledTorus)->Arg(32)->Arg(64)->Arg(128);

void BM_StationaryTorus(benchmark::State& state) {
  const Grid g(PhaseSpace::Torus2, static_cast<std::size_t>(state.range(0)));
  const auto p = annealed_matrix(torus_system(), g, UlamMethod::sampling(64, 1));
  for (auto _ : state) benchmark::DoNotOptimize(stationary_measure(p));
}
BENCHMARK(BM_StationaryTorus)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ErgodicityVerdict(benchmark::State& state) {
  const auto ifs = torus_system();
  const std::vector<Observable> obs = {Observable::cos_cos()};
  ErgodicityOptions o;
  o.n = static_cast<std::size_t>(state.range(0));
  o.trials = 8;
  for (auto _ : state) benchmark::DoNotOptimize(ergodicity_verdict(ifs, obs, o));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 8);
}
BENCHMARK(BM_ErgodicityVerdict)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_FiniteCoverCircle(benchmark::State& state) {
  const Grid g(PhaseSpace::Circle, 128);
  const IFSystem ifs(PhaseSpace::Circle, {SmoothMap(Rotation{kPhi}), SmoothMap(Rotation{std::sqrt(2.0) - 1.0})},
                     {0.5, 0.5});
  const auto u = BoxSet::arc(g, 0.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(finite_cover(ifs, u, static_cast<std::size_t>(state.range(0)), 4096));
}
BENCHMARK(BM_FiniteCoverCircle)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_MinimalityGreedyTorus(benchmark::State& state) {
  MinimalityOptions o;
  o.direction = Direction::Inverse;
  o.mode = SearchMode::Greedy;
  o.sample = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(minimality_check(torus_system(), o));
}
BENCHMARK(BM_MinimalityGreedyTorus)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
