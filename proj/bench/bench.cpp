// Serial reference kernels against their OpenMP counterparts.
#include "homog/dense_lu.hpp"
#include "homog/geometry.hpp"
#include "homog/msd.hpp"
#include "homog/rate_matrix.hpp"
#include "homog/reflecting_walk.hpp"

#include <benchmark/benchmark.h>

using namespace homog;

namespace {

Mat lattice_generator(int n) {
  Mat l = build_rate_matrix(build_obstructed_lattice(n)).dense();
  l.row(0).setOnes();  // pinned row keeps the factorization nonsingular
  return l;
}

void BM_LuSerial(benchmark::State& state) {
  const Mat a = lattice_generator(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lu_factor_serial(a).min_pivot);
  state.counters["nodes"] = static_cast<double>(a.rows());
}

void BM_LuParallel(benchmark::State& state) {
  const Mat a = lattice_generator(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lu_factor_parallel(a).min_pivot);
  state.counters["nodes"] = static_cast<double>(a.rows());
}

MsdOptions bench_options() {
  MsdOptions o;
  o.n_paths = 200;
  o.t_end = 2.0;
  o.n_points = 20;
  o.bootstrap_resamples = 100;
  return o;
}

PathSampler reflecting_sampler(const ReflectingWalkConfig& config, const MsdOptions& o, const Vec& times) {
  return [config, o, times](std::uint64_t path, Mat& out) {
    Rng rng(substream_seed(o.seed, path));
    sample_reflecting_grid(config, times, rng, out);
  };
}

void BM_ReduceSerial(benchmark::State& state) {
  ReflectingWalkConfig c;
  c.h = 1.0 / static_cast<double>(state.range(0));
  const MsdOptions o = bench_options();
  const Vec times = default_time_grid(o.t_end, o.n_points);
  const PathSampler s = reflecting_sampler(c, o, times);
  for (auto _ : state) benchmark::DoNotOptimize(reduce_paths_serial(s, 2, times, o).d_e);
}

void BM_ReduceParallel(benchmark::State& state) {
  ReflectingWalkConfig c;
  c.h = 1.0 / static_cast<double>(state.range(0));
  MsdOptions o = bench_options();
  o.threads = 0;
  const Vec times = default_time_grid(o.t_end, o.n_points);
  const PathSampler s = reflecting_sampler(c, o, times);
  for (auto _ : state) benchmark::DoNotOptimize(reduce_paths_parallel(s, 2, times, o).d_e);
}

}  // namespace

BENCHMARK(BM_LuSerial)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LuParallel)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReduceSerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReduceParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
