#include <benchmark/benchmark.h>

#include "lct/boundary_ops.hpp"
#include "lct/go_probes.hpp"
#include "lct/wavesolver.hpp"

namespace {

lct::SpaceTimeGrid grid(int nx) {
  lct::GridParams p;
  p.nx = nx;
  return lct::SpaceTimeGrid(p);
}

void BM_ForwardSolve(benchmark::State& state) {
  const auto g = grid(static_cast<int>(state.range(0)));
  auto pair = lct::CoefficientPair::zero(g);
  pair.a = lct::make_bump(g, {{0.0, 0.0}, 1.25, 0.3, 0.35, 0.5}, lct::RegionId::QrStar);
  lct::ProbeSpec p;
  p.lambda = 10.0;
  p.phi = lct::Mollifier({1.25, 0.0}, 0.3);
  const auto f = lct::probe_dirichlet_trace(g, p, nullptr).real_part();
  lct::SolveOptions o;
  o.keep_field = false;
  for (auto _ : state) {
    auto tr = lct::solve_forward(pair, {&f, nullptr, nullptr, nullptr}, o);
    benchmark::DoNotOptimize(tr.u_final().data().data());
  }
  state.counters["node_steps/s"] = benchmark::Counter(
      static_cast<double>(g.slice_size()) * g.nt(), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ForwardSolve)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_ProbeTrace(benchmark::State& state) {
  const auto g = grid(129);
  const auto a = lct::make_bump(g, {{0.0, 0.0}, 1.25, 0.3, 0.35, 0.05}, lct::RegionId::QrStar);
  lct::ProbeSpec p;
  p.lambda = 110.0;
  p.phi = lct::Mollifier({1.25, 0.0}, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(lct::probe_dirichlet_trace(g, p, &a).l2_norm());
}
BENCHMARK(BM_ProbeTrace)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
