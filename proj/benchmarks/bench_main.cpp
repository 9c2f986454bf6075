#include <benchmark/benchmark.h>

#include <random>

#include "sweep/fbm.hpp"
#include "sweep/solvers.hpp"

using namespace sweep;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

ConvexSet polygon(int sides) {
  std::vector<Halfspace> hs;
  for (int i = 0; i < sides; ++i) {
    const double th = 2 * 3.141592653589793 * i / sides;
    hs.push_back({v2(std::cos(th), std::sin(th)), 1.0});
  }
  return ConvexSet::polytope(hs);
}

void BM_DykstraProjection(benchmark::State& state) {
  const ConvexSet c = polygon(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<Vector> pts;
  for (int i = 0; i < 256; ++i) pts.push_back(v2(u(rng), u(rng)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(project(c, pts[i++ % pts.size()]));
}
BENCHMARK(BM_DykstraProjection)->Arg(4)->Arg(8)->Arg(16);

void BM_PVariation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SamplePath x = sample_fbm({0.4, 1.0, n, 2, 3});
  for (auto _ : state) benchmark::DoNotOptimize(p_variation(x, 2.6));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PVariation)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared);

void BM_HoskingSample(benchmark::State& state) {
  const FbmSampler s({0.7, 1.0, static_cast<std::size_t>(state.range(0)), 1, 0});
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(seed++));
}
BENCHMARK(BM_HoskingSample)->Arg(256)->Arg(1024)->Arg(4096);

void BM_EulerReflectedOU(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SamplePath b = sample_fbm({0.7, 1.0, n, 1, 5});
  const SamplePath w(b.grid(), 0.3 * b.values());
  const auto m = MovingConvexSet::constant(1.0, ConvexSet::box(Vector::Zero(1), Vector::Ones(1)),
                                           Vector::Constant(1, 0.5), 0.5);
  const auto drift = VectorField::affine(Matrix::Zero(1, 1), {-Matrix::Ones(1, 1)});
  for (auto _ : state) benchmark::DoNotOptimize(euler_catching_up(m, Vector::Constant(1, 0.5), drift, w));
}
BENCHMARK(BM_EulerReflectedOU)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
