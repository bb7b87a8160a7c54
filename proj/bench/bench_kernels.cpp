// OpenMP kernels against their serial references. Run with OMP_NUM_THREADS
// set to compare thread counts.

#include <benchmark/benchmark.h>

#include "gekrig/benchmarks.hpp"
#include "gekrig/doe.hpp"
#include "gekrig/kernels.hpp"
#include "gekrig/models.hpp"

using namespace gekrig;

namespace {

Matrix unit_plan(std::size_t n, Eigen::Index d) {
  return lhs(n, Bounds::uniform(d, 0.0, 1.0), LhsCriterion::Random, 7).points;
}

KernelSpec spec_for(Eigen::Index d) { return KernelSpec::sq_exp(Vector::Constant(d, 0.5)); }

void BM_CorrelationMatrix(benchmark::State& state) {
  const Matrix X = unit_plan(static_cast<std::size_t>(state.range(0)), 20);
  const KernelSpec spec = spec_for(20);
  for (auto _ : state) benchmark::DoNotOptimize(correlation_matrix(spec, X));
}

void BM_CorrelationMatrixSerial(benchmark::State& state) {
  const Matrix X = unit_plan(static_cast<std::size_t>(state.range(0)), 20);
  const KernelSpec spec = spec_for(20);
  for (auto _ : state) benchmark::DoNotOptimize(correlation_matrix_serial(spec, X));
}

void BM_PairwiseFeatures(benchmark::State& state) {
  const Matrix X = unit_plan(static_cast<std::size_t>(state.range(0)), 20);
  const PairwiseFeatures pf(X, Matrix::Identity(20, 20));
  const Vector theta = Vector::Constant(20, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(pf.correlation(theta));
}

void BM_PairwiseFeaturesSerial(benchmark::State& state) {
  const Matrix X = unit_plan(static_cast<std::size_t>(state.range(0)), 20);
  const PairwiseFeatures pf(X, Matrix::Identity(20, 20));
  const Vector theta = Vector::Constant(20, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(pf.correlation_serial(theta));
}

void BM_CrossCorrelation(benchmark::State& state) {
  const Matrix A = unit_plan(2000, 20), B = unit_plan(static_cast<std::size_t>(state.range(0)), 20);
  const KernelSpec spec = spec_for(20);
  for (auto _ : state) benchmark::DoNotOptimize(cross_correlation(spec, A, B));
}

void BM_CrossCorrelationSerial(benchmark::State& state) {
  const Matrix A = unit_plan(2000, 20), B = unit_plan(static_cast<std::size_t>(state.range(0)), 20);
  const KernelSpec spec = spec_for(20);
  for (auto _ : state) benchmark::DoNotOptimize(cross_correlation_serial(spec, A, B));
}

TrainingData y1_data(Eigen::Index d, std::size_t n) {
  const BenchmarkFunction fn = make_function(FunctionId::Y1, d);
  const Matrix X = lhs(n, fn.bounds(), LhsCriterion::Maximin, 1).points;
  return TrainingData(X, fn.evaluate(X), fn.gradients(X), fn.bounds());
}

void BM_LocalInfluence(benchmark::State& state) {
  const TrainingData data = y1_data(state.range(0), 20);
  for (auto _ : state) benchmark::DoNotOptimize(local_influence(data, GeKplsConfig{}));
}

void BM_LocalInfluenceSerial(benchmark::State& state) {
  const TrainingData data = y1_data(state.range(0), 20);
  for (auto _ : state) benchmark::DoNotOptimize(local_influence_serial(data, GeKplsConfig{}));
}

void BM_Predict(benchmark::State& state) {
  const TrainingData data = y1_data(10, 50);
  FitOptions opts;
  opts.search.starts = 2;
  const FittedSurrogate model = fit_kriging(data, opts);
  const Matrix Xv = lhs(5000, data.bounds, LhsCriterion::Random, 3).points;
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(Xv));
}

void BM_PredictSerial(benchmark::State& state) {
  const TrainingData data = y1_data(10, 50);
  FitOptions opts;
  opts.search.starts = 2;
  const FittedSurrogate model = fit_kriging(data, opts);
  const Matrix Xv = lhs(5000, data.bounds, LhsCriterion::Random, 3).points;
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_serial(Xv));
}

}  // namespace

BENCHMARK(BM_CorrelationMatrix)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CorrelationMatrixSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairwiseFeatures)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairwiseFeaturesSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossCorrelation)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrossCorrelationSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalInfluence)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalInfluenceSerial)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
