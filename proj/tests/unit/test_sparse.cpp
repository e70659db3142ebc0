#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "fcr/error.hpp"
#include "fcr/reference.hpp"
#include "fcr/sparse_index.hpp"
#include "oracles.hpp"

using namespace fcr;

using Docs = std::vector<std::pair<std::string, std::string>>;

TEST_CASE("tokenizer") {
  CHECK(tokenize("The cat, the CAT.") == std::vector<std::string>{"the", "cat", "the", "cat"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("covid-19 vaccine") == std::vector<std::string>{"covid", "19", "vaccine"});
  CHECK(tokenize("Ünïcode ÉTÉ") == std::vector<std::string>{"ünïcode", "été"});
  CHECK(tokenize("Привет, МИР!") == std::vector<std::string>{"привет", "мир"});
  CHECK(tokenize("हिन्दी") == std::vector<std::string>{"हिन्दी"});
  CHECK(tokenize("😀 ok!!") == std::vector<std::string>{"ok"});
}

TEST_CASE("index counts") {
  const Docs two{{"d1", "a b"}, {"d2", "b c"}};
  const auto idx = InvertedIndex::build(two);
  CHECK(idx.term_count() == 3);
  CHECK(idx.postings("b").size() == 2);
  CHECK(idx.postings("zzz").empty());

  const Docs one{{"d", "x x x"}};
  const auto single = InvertedIndex::build(one);
  REQUIRE(single.postings("x").size() == 1);
  CHECK(single.postings("x")[0].term_frequency == 3);
  CHECK(single.avg_doc_length() == 3.0);

  CHECK_THROWS_AS(InvertedIndex::build(Docs{}), ValidationError);
  CHECK_THROWS_AS(InvertedIndex::build(Docs{{"a", "x"}, {"a", "y"}}), DuplicateIdError);
}

TEST_CASE("toy example by hand") {
  const Docs docs{{"d1", "apple banana"}, {"d2", "apple apple"}, {"d3", "cherry"}};
  const auto idx = InvertedIndex::build(docs);
  const auto r = bm25_search(idx, "apple", 10, {}, "q");
  REQUIRE(r.size() == 2);
  CHECK(r.stage == Stage::sparse);
  CHECK(r.entries[0].doc_id == "d2");
  CHECK(r.entries[1].doc_id == "d1");
  // idf = ln(1 + 1.5/2.5); avgdl = 5/3; d1 norm 1.2 * (0.25 + 0.75 * 2 / (5/3)) = 1.38.
  const double idf = std::log(1.6);
  CHECK(r.entries[0].score == doctest::Approx(idf * 2 * 2.2 / (2 + 1.38)).epsilon(1e-12));
  CHECK(r.entries[1].score == doctest::Approx(idf * 2.2 / (1 + 1.38)).epsilon(1e-12));

  CHECK(bm25_search(idx, "durian", 10).empty());
  CHECK(bm25_search(idx, "apple apple", 10) == bm25_search(idx, "apple", 10));
}

TEST_CASE("term in every document keeps a positive idf") {
  const Docs docs{{"a", "x y"}, {"b", "x"}, {"c", "x z z"}};
  const auto idx = InvertedIndex::build(docs);
  CHECK(idx.idf(3) == doctest::Approx(std::log(1.0 + 0.5 / 3.5)));
  CHECK(idx.idf(3) > 0.0);
  CHECK(bm25_search(idx, "x", 10).size() == 3);
}

TEST_CASE("bm25 matches the scalar oracle on random corpora") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> n_docs(1, 60), len(1, 20), word(0, 40);
    Docs docs;
    std::vector<std::pair<std::string, std::vector<std::string>>> tokenized;
    const int n = n_docs(rng);
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> toks;
      std::string text;
      for (int j = len(rng); j > 0; --j) {
        toks.push_back("w" + std::to_string(word(rng)));
        text += toks.back() + ' ';
      }
      docs.emplace_back("doc" + std::to_string(i), text);
      tokenized.emplace_back(docs.back().first, toks);
    }
    const auto idx = InvertedIndex::build(docs);
    for (int q = 0; q < 5; ++q) {
      std::string query;
      for (int j = len(rng) % 6 + 1; j > 0; --j) query += "w" + std::to_string(word(rng)) + ' ';
      const Bm25Params params{0.5 + trial * 0.1, 0.05 * trial};
      const auto want = testing::scalar_bm25(tokenized, testing::words(query), params.k1, params.b);
      const auto got = bm25_search(idx, query, 1000, params);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(std::abs(got.entries[i].score - want[i].score) < 1e-9);
      }
    }
  }
}

TEST_CASE("filters and k") {
  const Docs docs{{"a", "x"}, {"b", "x x"}, {"c", "x y"}};
  const auto idx = InvertedIndex::build(docs);
  const std::vector<std::uint8_t> f{1, 0, 1};
  const auto r = bm25_search(idx, "x", 10, {}, "q", f);
  CHECK(r.size() == 2);
  for (const auto& e : r.entries) CHECK(e.doc_id != "b");
  CHECK(bm25_search(idx, "x", 1).size() == 1);
  CHECK_THROWS_AS(bm25_search(idx, "x", 0), ValidationError);
  CHECK_THROWS_AS(bm25_search(idx, "x", 1, {}, "q", std::vector<std::uint8_t>{1}), ValidationError);
}

TEST_CASE("parallel bm25 equals the serial reference") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> word(0, 200), len(3, 30);
  Docs docs;
  for (int i = 0; i < 2000; ++i) {
    std::string t;
    for (int j = len(rng); j > 0; --j) t += "t" + std::to_string(word(rng)) + ' ';
    docs.emplace_back("d" + std::to_string(i), t);
  }
  const auto idx = InvertedIndex::build(docs);
  std::vector<SparseQuery> queries;
  for (int q = 0; q < 40; ++q) {
    std::string t;
    for (int j = 0; j < 4; ++j) t += "t" + std::to_string(word(rng)) + ' ';
    queries.push_back({"q" + std::to_string(q), t});
  }
  const auto expected = reference::bm25_batch_search_serial(idx, queries, 30);
  const int saved = omp_get_max_threads();
  for (int threads = 1; threads <= 4; ++threads) {
    omp_set_num_threads(threads);
    CHECK(bm25_batch_search(idx, queries, 30) == expected);
  }
  omp_set_num_threads(saved);
}
