#include <doctest.h>

#include <filesystem>
#include <random>

#include "fcr/error.hpp"
#include "fcr/llm/rerank.hpp"
#include "mocks.hpp"

using namespace fcr;
using namespace fcr::llm;

namespace {

std::unordered_set<std::string> ids(std::size_t n) {
  std::unordered_set<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.insert("fc" + std::to_string(i));
  return out;
}

Ranking base_ranking(std::size_t n) {
  Ranking r{"post", {}, Stage::dense};
  for (std::size_t i = 0; i < n; ++i) r.entries.push_back({"fc" + std::to_string(i), 1.0 - 0.001 * static_cast<double>(i)});
  return r;
}

RerankRequest request_for(const Ranking& base) {
  RerankRequest req{"query", std::nullopt, {}};
  for (const auto& e : base.entries) req.candidates.push_back({e.doc_id, "text of " + e.doc_id});
  return req;
}

const RetryPolicy kNoWait{0, std::chrono::milliseconds(0), 2.0};

}  // namespace

TEST_CASE("clean tab-separated response") {
  const auto r = parse_rerank_response("fc3\tfc1\tfc2\n", ids(5));
  CHECK(r.status == ParseStatus::clean);
  CHECK(r.ranked_ids == std::vector<std::string>{"fc3", "fc1", "fc2"});
}

TEST_CASE("single id is clean") {
  const auto r = parse_rerank_response("  fc4 ", ids(5));
  CHECK(r.status == ParseStatus::clean);
  CHECK(r.ranked_ids == std::vector<std::string>{"fc4"});
}

TEST_CASE("repairs") {
  SUBCASE("commas and brackets") {
    const auto r = parse_rerank_response("[\"fc1\", \"fc0\", 'fc2']", ids(5));
    CHECK(r.status == ParseStatus::repaired);
    CHECK(r.ranked_ids == std::vector<std::string>{"fc1", "fc0", "fc2"});
  }
  SUBCASE("prose around ids") {
    const auto r = parse_rerank_response("Here are the IDs: fc2 fc0.", ids(5));
    CHECK(r.status == ParseStatus::repaired);
    CHECK(r.ranked_ids == std::vector<std::string>{"fc2", "fc0"});
  }
  SUBCASE("unknown and repeated ids are dropped") {
    const auto r = parse_rerank_response("fc1\tfc99\tfc1\tfc0", ids(5));
    CHECK(r.status == ParseStatus::repaired);
    CHECK(r.ranked_ids == std::vector<std::string>{"fc1", "fc0"});
  }
  SUBCASE("more than ten ids are cut without counting as a repair") {
    std::string raw;
    for (int i = 0; i < 15; ++i) raw += "fc" + std::to_string(i) + "\t";
    const auto r = parse_rerank_response(raw, ids(20));
    CHECK(r.ranked_ids.size() == 10);
    CHECK(r.ranked_ids.back() == "fc9");
    CHECK(r.status == ParseStatus::clean);
  }
  SUBCASE("a bad token before the cut is a repair") {
    const auto r = parse_rerank_response("fc1\tnope\tfc2", ids(20));
    CHECK(r.ranked_ids == std::vector<std::string>{"fc1", "fc2"});
    CHECK(r.status == ParseStatus::repaired);
  }
}

TEST_CASE("failures") {
  CHECK(parse_rerank_response("", ids(3)).status == ParseStatus::failed);
  CHECK(parse_rerank_response("I cannot do that.", ids(3)).status == ParseStatus::failed);
  CHECK(parse_rerank_response("fc7\tfc8", ids(3)).status == ParseStatus::failed);
  CHECK(parse_rerank_response("fc7\tfc8", ids(3)).ranked_ids.empty());
}

TEST_CASE("fuzzed responses respect the output contract") {
  std::mt19937_64 rng(23);
  const auto cands = ids(50);
  const std::vector<std::string> pieces{"fc1", "fc2", "fc10", "fc49", "fc50", "fc", "\t", " ", ",", ";", "\n",
                                        "[", "]", "\"", "'", "ID:", "fc1fc2", "*", "..", "FC1", "fc01"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), len(0, 40);
  for (int i = 0; i < 2000; ++i) {
    std::string raw;
    for (std::size_t n = len(rng); n > 0; --n) raw += pieces[pick(rng)];
    const auto r = parse_rerank_response(raw, cands);
    CHECK(r.ranked_ids.size() <= 10);
    std::unordered_set<std::string> seen;
    for (const auto& id : r.ranked_ids) {
      CHECK(cands.count(id) == 1);
      CHECK(seen.insert(id).second);
    }
    CHECK((r.status == ParseStatus::failed) == r.ranked_ids.empty());
  }
}

TEST_CASE("rerank scores by position and falls back on failure") {
  const auto base = base_ranking(20);
  const auto req = request_for(base);

  testing::ScriptedClient reverse([](const std::string& prompt) {
    auto v = testing::prompt_candidate_ids(prompt);
    std::reverse(v.begin(), v.end());
    std::string out;
    for (const auto& id : v) out += id + "\t";
    return out;
  });
  const auto ok = rerank(reverse, req, base, nullptr, kNoWait);
  CHECK_FALSE(ok.fallback);
  CHECK(ok.status == ParseStatus::clean);
  CHECK(ok.ranking.stage == Stage::reranked);
  CHECK(ok.ranking.query_id == "post");
  REQUIRE(ok.ranking.size() == 10);
  CHECK(ok.ranking.entries[0].doc_id == "fc19");
  CHECK(ok.ranking.entries[1].score == doctest::Approx(0.5));

  testing::ScriptedClient garbage(testing::garbage_responder());
  const auto bad = rerank(garbage, req, base, nullptr, kNoWait);
  CHECK(bad.fallback);
  CHECK(bad.status == ParseStatus::failed);
  CHECK(bad.ranking.stage == Stage::reranked);
  CHECK(bad.ranking.entries == base.truncated(10).entries);

  testing::ScriptedClient down(testing::failing_responder());
  const auto failed = rerank(down, req, base, nullptr, RetryPolicy{2, std::chrono::milliseconds(0), 2.0});
  CHECK(failed.fallback);
  CHECK(down.calls() == 3);
}

TEST_CASE("rerank uses the cache") {
  const auto dir = testing::temp_dir("rerank-cache");
  const ResponseCache cache(dir);
  const auto base = base_ranking(5);
  const auto req = request_for(base);
  testing::ScriptedClient identity(testing::identity_reranker());
  const auto first = rerank(identity, req, base, &cache, kNoWait);
  const auto second = rerank(identity, req, base, &cache, kNoWait);
  CHECK(identity.calls() == 1);
  CHECK_FALSE(first.from_cache);
  CHECK(second.from_cache);
  CHECK(first.ranking == second.ranking);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rerank_batch counts fallbacks and keeps order") {
  std::vector<Ranking> bases;
  std::vector<RerankRequest> reqs;
  for (int q = 0; q < 8; ++q) {
    auto b = base_ranking(12);
    b.query_id = "q" + std::to_string(q);
    reqs.push_back(request_for(b));
    reqs.back().query_text = q % 2 ? "garbage" : "fine";
    bases.push_back(b);
  }
  testing::ScriptedClient mixed([](const std::string& prompt) {
    return testing::prompt_query(prompt) == "garbage" ? std::string("no") : std::string("fc5\tfc6");
  });
  const auto batch = rerank_batch(mixed, reqs, bases, nullptr, kNoWait, 3);
  CHECK(batch.fallbacks == 4);
  for (int q = 0; q < 8; ++q) {
    CHECK(batch.outcomes[q].ranking.query_id == "q" + std::to_string(q));
    CHECK(batch.outcomes[q].fallback == (q % 2 == 1));
  }
  CHECK_THROWS_AS(rerank_batch(mixed, reqs, std::span<const Ranking>(bases).first(2), nullptr, kNoWait, 1),
                  ValidationError);
}
