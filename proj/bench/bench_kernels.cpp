#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "apharm/expsum.hpp"
#include "apharm/kernels.hpp"

using namespace apharm;
using kernels::Exec;

namespace {

ExpSum sine_product() {
  return ExpSum::sin_pi() * ExpSum::shifted_sine(std::sqrt(2.0), {1.0}, {0.3, 0.1}) *
         ExpSum::shifted_sine(std::numbers::pi / 3, {1.0}, {-0.7, 0.0});
}

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_BoxMean(benchmark::State& state) {
  const std::vector<Term> terms = {{{1.0, 0.5}, {1.0, 0.3}}, {{0.25, 0.0}, {-2.0, 1.0}}, {{2.0, 0.0}, {0.0, 0.0}}};
  const ExpSum f(2, terms);
  const double y[2] = {0.1, -0.2};
  const long cells[2] = {800, 800};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::box_mean(f, y, 40.0, cells, exec_of(state)));
}

void BM_LogModulusMean(benchmark::State& state) {
  const ExpSum f = sine_product();
  const double y[1] = {0.05};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_modulus_mean(f, y, 40.0, exec_of(state)).value);
}

void BM_LogPotential2D(benchmark::State& state) {
  std::vector<kernels::DensityBox> boxes;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double u = -0.5 + 0.05 * i, v = -0.5 + 0.05 * j;
      boxes.push_back({{u, v}, {u + 0.05, v + 0.05}, 1.0});
    }
  std::vector<double> axis;
  for (int i = 0; i <= 60; ++i) axis.push_back(-1.5 + 0.05 * i);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_potential_2d(boxes, axis, axis, exec_of(state)));
}

void BM_GridIntegral(benchmark::State& state) {
  const auto integrand = [](std::span<const double> p) {
    double r2 = 0;
    for (double v : p) r2 += v * v;
    return r2 < 1 ? cplx(std::exp(-1 / (1 - r2)) * std::cos(p[0] + p[3]), 0.0) : cplx(0.0);
  };
  const double lo[4] = {-1, -1, -1, -1};
  const long count[4] = {41, 41, 41, 41};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::grid_integral(integrand, lo, count, 0.05, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_BoxMean)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogModulusMean)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogPotential2D)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridIntegral)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
