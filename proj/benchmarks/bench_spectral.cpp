#include <benchmark/benchmark.h>

#include <random>

#include "lct/coefficients.hpp"
#include "lct/continuation.hpp"
#include "lct/lightray.hpp"

namespace {

void BM_HMinus1(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> f(n * n * n);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  for (auto& v : f) v = N(rng);
  const std::size_t dims[] = {n, n, n};
  const double h[] = {0.01, 0.01, 0.01};
  for (auto _ : state) benchmark::DoNotOptimize(lct::h_minus1_norm(f, dims, h));
}
BENCHMARK(BM_HMinus1)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LagrangeExtend(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = lct::make_equispaced(-0.1, 0.1, n, [](double x) { return std::complex<double>(std::cos(x), 0.0); });
  for (auto _ : state) benchmark::DoNotOptimize(lct::lagrange_extend(p, std::complex<double>(0.4, 0.1)));
}
BENCHMARK(BM_LagrangeExtend)->Arg(10)->Arg(40);

void BM_SliceLattice(benchmark::State& state) {
  const lct::BumpField f({{0.0, 0.0}, 1.25, 0.3, 0.35, 1.0});
  lct::RayGrid R = lct::make_ray_grid({1.0, 0.0}, 3.0, 0.1);
  lct::fill_ray_grid(R, f, 2.5, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(lct::fourier_slice_lattice(R, 30.0, 1.0, 2.5).size());
}
BENCHMARK(BM_SliceLattice)->Unit(benchmark::kMillisecond);

void BM_RayGridFill(benchmark::State& state) {
  const lct::BumpField f({{0.0, 0.0}, 1.25, 0.3, 0.35, 1.0});
  for (auto _ : state) {
    lct::RayGrid R = lct::make_ray_grid({0.6, 0.8}, 3.0, 0.1);
    lct::fill_ray_grid(R, f, 2.5, 0.01);
    benchmark::DoNotOptimize(R.values.data());
  }
}
BENCHMARK(BM_RayGridFill)->Unit(benchmark::kMillisecond);

}  // namespace
