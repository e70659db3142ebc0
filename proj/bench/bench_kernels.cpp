// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>
#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fcr/dense_index.hpp"
#include "fcr/fusion.hpp"
#include "fcr/reference.hpp"
#include "fcr/sparse_index.hpp"

namespace {

constexpr std::size_t kDim = 256;
constexpr std::size_t kQueries = 64;
constexpr std::size_t kTopK = 50;

fcr::EmbeddingStore make_store(std::size_t rows) {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> normal;
  std::vector<fcr::EmbeddingRecord> records(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    records[i].id = fmt::format("fc{:07d}", i);
    records[i].vector.resize(kDim);
    for (auto& x : records[i].vector) x = normal(rng);
  }
  return fcr::EmbeddingStore::from_records(std::move(records));
}

std::vector<fcr::DenseQuery> make_queries() {
  std::mt19937_64 rng(2);
  std::normal_distribution<float> normal;
  std::vector<fcr::DenseQuery> queries(kQueries);
  for (std::size_t i = 0; i < kQueries; ++i) {
    queries[i].id = fmt::format("q{}", i);
    queries[i].vector.resize(kDim);
    for (auto& x : queries[i].vector) x = normal(rng);
  }
  return queries;
}

const fcr::EmbeddingStore& store_of(std::size_t rows) {
  static std::map<std::size_t, fcr::EmbeddingStore> cache;
  auto it = cache.find(rows);
  if (it == cache.end()) it = cache.emplace(rows, make_store(rows)).first;
  return it->second;
}

void BM_DenseBatchParallel(benchmark::State& state) {
  const auto& store = store_of(static_cast<std::size_t>(state.range(0)));
  const auto queries = make_queries();
  for (auto _ : state) benchmark::DoNotOptimize(fcr::batch_search(store, queries, kTopK));
  state.SetItemsProcessed(state.iterations() * kQueries);
}

void BM_DenseBatchSerial(benchmark::State& state) {
  const auto& store = store_of(static_cast<std::size_t>(state.range(0)));
  const auto queries = make_queries();
  for (auto _ : state) benchmark::DoNotOptimize(fcr::reference::batch_search_serial(store, queries, kTopK));
  state.SetItemsProcessed(state.iterations() * kQueries);
}

void BM_DenseSingleParallel(benchmark::State& state) {
  const auto& store = store_of(static_cast<std::size_t>(state.range(0)));
  const auto query = make_queries().front();
  for (auto _ : state) benchmark::DoNotOptimize(fcr::search(store, query.vector, kTopK));
}

void BM_DenseSingleSerial(benchmark::State& state) {
  const auto& store = store_of(static_cast<std::size_t>(state.range(0)));
  const auto query = make_queries().front();
  for (auto _ : state) benchmark::DoNotOptimize(fcr::reference::search_serial(store, query.vector, kTopK));
}

struct SparseFixture {
  fcr::InvertedIndex index;
  std::vector<fcr::SparseQuery> queries;
};

const SparseFixture& sparse_fixture() {
  static const SparseFixture fixture = [] {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> word(0, 5000), len(10, 60);
    std::vector<std::pair<std::string, std::string>> docs;
    for (int i = 0; i < 20000; ++i) {
      std::string text;
      for (int j = len(rng); j > 0; --j) text += fmt::format("t{} ", word(rng));
      docs.emplace_back(fmt::format("d{}", i), std::move(text));
    }
    SparseFixture f{fcr::InvertedIndex::build(docs), {}};
    for (std::size_t q = 0; q < kQueries; ++q) {
      std::string text;
      for (int j = 0; j < 8; ++j) text += fmt::format("t{} ", word(rng));
      f.queries.push_back({fmt::format("q{}", q), std::move(text)});
    }
    return f;
  }();
  return fixture;
}

void BM_Bm25BatchParallel(benchmark::State& state) {
  const auto& f = sparse_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(fcr::bm25_batch_search(f.index, f.queries, kTopK));
  state.SetItemsProcessed(state.iterations() * kQueries);
}

void BM_Bm25BatchSerial(benchmark::State& state) {
  const auto& f = sparse_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fcr::reference::bm25_batch_search_serial(f.index, f.queries, kTopK));
  }
  state.SetItemsProcessed(state.iterations() * kQueries);
}

void BM_RrfFuseRuns(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::vector<std::string> pool;
  for (int i = 0; i < 500; ++i) pool.push_back(fmt::format("d{}", i));
  std::vector<std::vector<fcr::Ranking>> runs(2);
  for (auto& run : runs) {
    for (int q = 0; q < 1000; ++q) {
      std::shuffle(pool.begin(), pool.end(), rng);
      fcr::Ranking r{fmt::format("q{}", q), {}, fcr::Stage::dense};
      for (std::size_t i = 0; i < kTopK; ++i) r.entries.push_back({pool[i], 1.0 / static_cast<double>(i + 1)});
      run.push_back(std::move(r));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(fcr::rrf_fuse_runs(runs));
  state.SetItemsProcessed(state.iterations() * 1000);
}

}  // namespace

BENCHMARK(BM_DenseBatchParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseBatchSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseSingleParallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseSingleSerial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bm25BatchParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bm25BatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RrfFuseRuns)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
