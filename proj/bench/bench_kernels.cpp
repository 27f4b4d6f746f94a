// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <numeric>

#include "idsforge/featsel.hpp"
#include "idsforge/forest.hpp"
#include "idsforge/kernels.hpp"
#include "idsforge/rng.hpp"

using namespace idsforge;

namespace {

Dataset synthetic(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> values(n * d);
  std::vector<ClassIndex> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = rng.below(3);
    for (std::size_t j = 0; j < d; ++j) {
      const double signal = j % 3 == 0 ? static_cast<double>(labels[i]) : 0.0;
      values[i * d + j] = (signal + rng.uniform(0.0, 2.0)) / 4.0;
    }
  }
  std::vector<FeatureMeta> meta(d);
  for (std::size_t j = 0; j < d; ++j) meta[j].name = "f" + std::to_string(j);
  return Dataset(std::move(values), d, std::move(meta), std::move(labels), {"normal", "a", "b"}, 0, true);
}

const Dataset& data() {
  static const Dataset ds = synthetic(20000, 24, 7);
  return ds;
}

std::vector<std::size_t> rows_of(const Dataset& ds) {
  std::vector<std::size_t> rows(ds.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

void su_matrix_serial(benchmark::State& state) {
  const auto binned = discretize(data(), 10);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::su_matrix(binned));
}

void su_matrix_parallel(benchmark::State& state) {
  const auto binned = discretize(data(), 10);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::su_matrix(binned));
}

std::vector<FeatureSubset> random_subsets(std::size_t d, std::size_t count) {
  Rng rng(3);
  std::vector<FeatureSubset> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<bool> mask(d);
    for (std::size_t j = 0; j < d; ++j) mask[j] = rng.uniform() < 0.5;
    mask[rng.below(d)] = true;
    out.emplace_back(mask);
  }
  return out;
}

void merit_batch_serial(benchmark::State& state) {
  const auto cache = build_correlation_cache(data());
  const auto subsets = random_subsets(data().n_features(), 4096);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::merit_batch(subsets, cache));
}

void merit_batch_parallel(benchmark::State& state) {
  const auto cache = build_correlation_cache(data());
  const auto subsets = random_subsets(data().n_features(), 4096);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::merit_batch(subsets, cache));
}

template <bool Parallel>
void best_split(benchmark::State& state) {
  const Dataset& ds = data();
  const auto rows = rows_of(ds);
  std::vector<std::size_t> features(ds.n_features());
  std::iota(features.begin(), features.end(), 0);
  const auto counts = ds.class_counts();
  const kernels::SplitRequest req{&ds, rows, features, {}, counts, 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? kernels::best_split(req) : kernels::serial::best_split(req));
  }
}

template <bool Parallel>
void predict_batch(benchmark::State& state) {
  const Dataset& ds = data();
  const auto rows = rows_of(ds);
  static const Forest forest = rf_fit(ds, rows, 20, TreeParams{}, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? kernels::predict_batch(forest, ds, rows)
                                      : kernels::serial::predict_batch(forest, ds, rows));
  }
}

}  // namespace

BENCHMARK(su_matrix_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(su_matrix_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(merit_batch_serial)->Unit(benchmark::kMicrosecond);
BENCHMARK(merit_batch_parallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(best_split<false>)->Name("best_split_serial")->Unit(benchmark::kMillisecond);
BENCHMARK(best_split<true>)->Name("best_split_parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(predict_batch<false>)->Name("predict_batch_serial")->Unit(benchmark::kMillisecond);
BENCHMARK(predict_batch<true>)->Name("predict_batch_parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
