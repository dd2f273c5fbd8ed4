// Serial reference vs OpenMP kernel, same inputs. Thread count follows
// OMP_NUM_THREADS / QMLCHA_THREADS.
#include <benchmark/benchmark.h>

#include <cstdlib>

#include "qmlcha/cha.hpp"
#include "qmlcha/ensemble.hpp"
#include "qmlcha/kext.hpp"
#include "qmlcha/parallel.hpp"
#include "qmlcha/sampling.hpp"

using namespace qmlcha;

namespace {

const ConvexHull& hull() {
  static const ConvexHull h = [] {
    Rng rng(1);
    return build_hull(Dims(2, 2), 2000, rng);
  }();
  return h;
}

const LabeledDataset& states() {
  static const LabeledDataset ds = [] {
    SamplerConfig cfg;
    cfg.seed = 2;
    return build_dataset(cfg, 2000, Labeler::ppt());
  }();
  return ds;
}

RMatrix points(std::size_t n) {
  RMatrix p(15, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) p.col(static_cast<Eigen::Index>(i)) = states().records[i].coords;
  return p;
}

template <bool Parallel>
void BM_AlphaBatch(benchmark::State& st) {
  const RMatrix p = points(200);
  for (auto _ : st) {
    auto r = Parallel ? alpha_batch(hull(), p) : alpha_batch_serial(hull(), p);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Parallel>
void BM_BuildDataset(benchmark::State& st) {
  SamplerConfig cfg;
  cfg.seed = 3;
  for (auto _ : st) {
    auto ds = Parallel ? build_dataset(cfg, 5000, Labeler::ppt()) : build_dataset_serial(cfg, 5000, Labeler::ppt());
    benchmark::DoNotOptimize(ds);
  }
}

template <bool Parallel>
void BM_Bagging(benchmark::State& st) {
  const TrainingSet ts = make_training_set(states(), FeatureMode::kRaw);
  for (auto _ : st) {
    Rng rng(4);
    auto c = Parallel ? train_bagging(ts, 16, TreeParams{}, rng) : train_bagging_serial(ts, 16, TreeParams{}, rng);
    benchmark::DoNotOptimize(c);
  }
}

template <bool Parallel>
void BM_Boundary(benchmark::State& st) {
  const CMatrix h1 = figure_observable_h1(), h2 = figure_observable_h2();
  for (auto _ : st) {
    auto b = Parallel ? boundary_projection(Dims(2, 2), h1, h2, 5, 32)
                      : boundary_projection_serial(Dims(2, 2), h1, h2, 5, 32);
    benchmark::DoNotOptimize(b);
  }
}

}  // namespace

BENCHMARK(BM_AlphaBatch<false>)->Name("alpha_batch/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AlphaBatch<true>)->Name("alpha_batch/openmp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BuildDataset<false>)->Name("build_dataset/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildDataset<true>)->Name("build_dataset/openmp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Bagging<false>)->Name("bagging/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bagging<true>)->Name("bagging/openmp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Boundary<false>)->Name("boundary/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Boundary<true>)->Name("boundary/openmp")->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  if (const char* t = std::getenv("QMLCHA_THREADS")) set_threads(std::atoi(t));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
