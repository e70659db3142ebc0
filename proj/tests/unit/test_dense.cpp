#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fcr/dense_index.hpp"
#include "fcr/error.hpp"
#include "fcr/reference.hpp"
#include "fcr/text_util.hpp"
#include "mocks.hpp"
#include "oracles.hpp"

using namespace fcr;

namespace {

std::vector<EmbeddingRecord> random_records(std::size_t n, std::size_t d, std::mt19937_64& rng,
                                            const std::string& prefix = "d") {
  std::normal_distribution<float> normal;
  std::vector<EmbeddingRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = prefix + std::to_string(i);
    out[i].vector.resize(d);
    for (auto& x : out[i].vector) x = normal(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("store validates and normalizes") {
  auto store = EmbeddingStore::from_records({{"b", {3, 4}}, {"a", {0, 2}}});
  CHECK(store.size() == 2);
  CHECK(store.dimension() == 2);
  CHECK(store.id(0) == "a");
  CHECK(store.row(1)[0] == doctest::Approx(0.6));
  CHECK(store.find("b") == 1u);
  CHECK_FALSE(store.find("c").has_value());

  CHECK_THROWS_AS(EmbeddingStore::from_records({{"a", {1, 0}}, {"b", {1, 0, 0}}}), DimensionMismatchError);
  CHECK_THROWS_AS(EmbeddingStore::from_records({{"a", {0, 0}}}), ZeroNormError);
  CHECK_THROWS_AS(EmbeddingStore::from_records({{"a", {NAN, 1}}}), ValidationError);
  CHECK_THROWS_AS(EmbeddingStore::from_records({{"a", {1, 0}}, {"a", {0, 1}}}), DuplicateIdError);
  CHECK_THROWS_AS(EmbeddingStore::from_records({{"a", {}}}), ValidationError);
}

TEST_CASE("embeddings JSONL round trip and errors") {
  const auto dir = testing::temp_dir("emb");
  const auto path = dir + "/e.jsonl";
  std::vector<EmbeddingRecord> recs{{"x", {0.1f, -0.25f, 1e-8f}}, {"y", {1.f, 2.f, 3.f}}};
  write_embedding_records(path, recs);
  const auto back = read_embedding_records(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].vector == recs[0].vector);
  CHECK(load_embeddings(path).size() == 2);

  write_file_atomic(path, "{\"id\":\"a\",\"vec\":[1,0]}\n{\"id\":\"b\",\"vec\":[1,0,0]}\n");
  CHECK_THROWS_AS(read_embedding_records(path), ValidationError);
  write_file_atomic(path, "{\"id\":\"a\",\"vec\":[1,\"x\"]}\n");
  CHECK_THROWS_AS(read_embedding_records(path), ParseError);
  write_file_atomic(path, "{\"id\":\"a\"}\n");
  CHECK_THROWS_AS(read_embedding_records(path), ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("search matches the double-precision oracle") {
  std::mt19937_64 rng(11);
  const auto docs = random_records(300, 12, rng);
  const auto store = EmbeddingStore::from_records(docs);
  std::vector<std::pair<std::string, std::vector<float>>> raw;
  for (const auto& r : docs) raw.emplace_back(r.id, r.vector);
  const auto queries = random_records(20, 12, rng, "q");
  for (const auto& q : queries) {
    for (std::size_t k : {1u, 7u, 300u, 500u}) {
      const auto got = search(store, q.vector, k, q.id);
      const auto want = testing::naive_cosine_top_k(raw, q.vector, k);
      REQUIRE(got.size() == want.size());
      CHECK(got.query_id == q.id);
      CHECK(got.stage == Stage::dense);
      for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(got.entries[i].doc_id == want[i].id);
        CHECK(std::abs(got.entries[i].score - want[i].score) < 1e-5);
      }
    }
  }
}

TEST_CASE("search breaks ties by id and honours filters") {
  const auto store = EmbeddingStore::from_records({{"c", {1, 0}}, {"a", {1, 0}}, {"b", {0, 1}}});
  const std::vector<float> q{1, 0};
  const auto r = search(store, q, 3);
  CHECK(r.entries[0].doc_id == "a");
  CHECK(r.entries[1].doc_id == "c");
  CHECK(r.entries[2].doc_id == "b");

  const std::vector<std::uint8_t> filter{0, 1, 1};  // rows a, b, c
  const auto f = search(store, q, 3, "q", filter);
  REQUIRE(f.size() == 2);
  CHECK(f.entries[0].doc_id == "c");

  CHECK_THROWS_AS(search(store, q, 0), ValidationError);
  CHECK_THROWS_AS(search(store, std::vector<float>{1, 0, 0}, 2), DimensionMismatchError);
  CHECK_THROWS_AS(search(store, std::vector<float>{0, 0}, 2), ZeroNormError);
  CHECK_THROWS_AS(search(store, q, 2, "q", std::vector<std::uint8_t>{1}), ValidationError);
}

TEST_CASE("parallel kernels equal the serial reference at any thread count") {
  std::mt19937_64 rng(5);
  const auto store = EmbeddingStore::from_records(random_records(kParallelScanThreshold + 3001, 8, rng));
  const auto recs = random_records(12, 8, rng, "q");
  std::vector<DenseQuery> queries;
  for (const auto& r : recs) queries.push_back({r.id, r.vector});
  std::vector<std::vector<std::uint8_t>> filter_storage;
  std::vector<RowFilter> filters;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto& f = filter_storage.emplace_back(store.size());
    for (std::size_t row = 0; row < store.size(); ++row) f[row] = (row + i) % 3 != 0;
  }
  for (const auto& f : filter_storage) filters.emplace_back(f);

  const auto expected = reference::batch_search_serial(store, queries, 25);
  const auto expected_filtered = reference::batch_search_serial(store, queries, 25, filters);
  const int saved = omp_get_max_threads();
  for (int threads = 1; threads <= 4; ++threads) {
    omp_set_num_threads(threads);
    CHECK(batch_search(store, queries, 25) == expected);
    CHECK(batch_search(store, queries, 25, filters) == expected_filtered);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      CHECK(search(store, queries[i].vector, 25, queries[i].id) == expected[i]);
    }
  }
  omp_set_num_threads(saved);
}

TEST_CASE("batch_search validates the filter count") {
  const auto store = EmbeddingStore::from_records({{"a", {1, 0}}});
  const std::vector<DenseQuery> qs{{"q1", {1, 0}}, {"q2", {0, 1}}};
  const std::vector<std::uint8_t> f{1};
  const std::vector<RowFilter> one{RowFilter(f)};
  CHECK_THROWS_AS(batch_search(store, qs, 1, one), ValidationError);
}
