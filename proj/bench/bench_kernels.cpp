#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "fermitest/fock.hpp"
#include "fermitest/kernels.hpp"

namespace k = fermitest::kernels;
using fermitest::CMatrix;
using fermitest::Complex;

namespace {

double smooth(std::span<const double> x) { return 0.5 + 0.25 * std::cos(x[0]); }

std::vector<Complex> offset_table(int n) {
  std::vector<Complex> t(k::offset_table_size(n, 1));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 1.0 / (1.0 + std::abs(double(i) - n + 1));
  return t;
}

CMatrix random_matrix(int m) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  CMatrix a(m, m);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
  return a;
}

void BM_SampleSerial(benchmark::State& state) {
  const k::GridShape grid{{static_cast<int>(state.range(0))}};
  for (auto _ : state) benchmark::DoNotOptimize(k::sample_serial(grid, smooth));
}
void BM_SampleParallel(benchmark::State& state) {
  const k::GridShape grid{{static_cast<int>(state.range(0))}};
  for (auto _ : state) benchmark::DoNotOptimize(k::sample_parallel(grid, smooth));
}

void BM_DftSerial(benchmark::State& state) {
  const k::GridShape grid{{static_cast<int>(state.range(0))}};
  const auto values = k::sample_serial(grid, smooth);
  const int kk[] = {3};
  for (auto _ : state) benchmark::DoNotOptimize(k::dft_coefficient_serial(values, grid, kk));
}
void BM_DftParallel(benchmark::State& state) {
  const k::GridShape grid{{static_cast<int>(state.range(0))}};
  const auto values = k::sample_serial(grid, smooth);
  const int kk[] = {3};
  for (auto _ : state) benchmark::DoNotOptimize(k::dft_coefficient_parallel(values, grid, kk));
}

void BM_ToeplitzSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto table = offset_table(n);
  for (auto _ : state) benchmark::DoNotOptimize(k::toeplitz_fill_serial(n, 1, table));
}
void BM_ToeplitzParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto table = offset_table(n);
  for (auto _ : state) benchmark::DoNotOptimize(k::toeplitz_fill_parallel(n, 1, table));
}

void BM_WedgeSerial(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const fermitest::FockBasis basis(m);
  const CMatrix a = random_matrix(m);
  for (auto _ : state) benchmark::DoNotOptimize(k::wedge_block_serial(a, basis.sector(m / 2)));
}
void BM_WedgeParallel(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const fermitest::FockBasis basis(m);
  const CMatrix a = random_matrix(m);
  for (auto _ : state) benchmark::DoNotOptimize(k::wedge_block_parallel(a, basis.sector(m / 2)));
}

}  // namespace

BENCHMARK(BM_SampleSerial)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_SampleParallel)->Arg(1 << 12)->Arg(1 << 18);
BENCHMARK(BM_DftSerial)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_DftParallel)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_ToeplitzSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_ToeplitzParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_WedgeSerial)->Arg(8)->Arg(10);
BENCHMARK(BM_WedgeParallel)->Arg(8)->Arg(10);

BENCHMARK_MAIN();
