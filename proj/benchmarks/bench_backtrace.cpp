#include <benchmark/benchmark.h>

#include <vector>

#include "backtrace/inverse.hpp"
#include "backtrace/laxhopf.hpp"
#include "backtrace/oleinik.hpp"
#include "backtrace/oracle.hpp"

using namespace backtrace;

namespace {

const ConvexFlux kBurgers = ConvexFlux::burgers();

// Sawtooth with `teeth` downward jumps: each tooth rises with slope 0.5 over
// unit length and drops by 0.9 at its right end.
PiecewiseProfile sawtooth(int teeth) {
  std::vector<Piece> pieces;
  for (int i = 0; i < teeth; ++i) {
    const double x = -0.5 * teeth + i;
    pieces.push_back({x, x + 1.0, -0.4, 0.5});
  }
  return PiecewiseProfile(std::move(pieces), -0.4, -0.4);
}

void BM_BuildPartition(benchmark::State& state) {
  const PiecewiseProfile w = sawtooth(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const PMap pmap(w, kBurgers, 1.0);
    benchmark::DoNotOptimize(partition(pmap));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildPartition)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_Minimize(benchmark::State& state) {
  const LaxHopfSolver solver(sawtooth(static_cast<int>(state.range(0))), kBurgers);
  double x = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.minimize(1.0, x));
    x = x > 1.0 ? -1.0 : x + 1e-3;
  }
}
BENCHMARK(BM_Minimize)->RangeMultiplier(4)->Range(4, 1024);

void BM_EvolveProfile(benchmark::State& state) {
  const PiecewiseProfile u0 = sawtooth(16);
  const double dx = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_cl_profile(u0, kBurgers, 1.0, -10.0, 10.0, dx));
  }
  state.SetItemsProcessed(state.iterations() * 20 * state.range(0));
}
BENCHMARK(BM_EvolveProfile)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MembershipCL(benchmark::State& state) {
  const InverseProblem prob(sawtooth(static_cast<int>(state.range(0))), kBurgers, 1.0);
  const PiecewiseProfile u0 = construct_sharp(prob, prob.pmap().jumps().front().x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(membership_cl(prob, u0));
  }
}
BENCHMARK(BM_MembershipCL)->Arg(4)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_MembershipHJ(benchmark::State& state) {
  const InverseProblem prob(sawtooth(static_cast<int>(state.range(0))), kBurgers, 1.0);
  const PiecewiseProfile u0 = construct_sharp(prob, prob.pmap().jumps().front().x);
  const PiecewisePrimitive potential = aligned_potential(prob, u0);
  const PiecewisePrimitive target = prob.target_potential();
  for (auto _ : state) {
    benchmark::DoNotOptimize(membership_hj(prob, potential, target));
  }
}
BENCHMARK(BM_MembershipHJ)->Arg(4)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_GodunovStep(benchmark::State& state) {
  const FvGrid grid = make_grid(sawtooth(16), -10.0, 10.0, 20.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(godunov_step(grid, kBurgers));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GodunovStep)->RangeMultiplier(8)->Range(1 << 10, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
