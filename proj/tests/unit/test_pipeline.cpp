#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "fcr/cli.hpp"
#include "fcr/error.hpp"
#include "fcr/pipeline.hpp"
#include "fcr/text_util.hpp"
#include "mocks.hpp"

using namespace fcr;
namespace fs = std::filesystem;

namespace {

PipelineConfig planted_config(const std::string& tag) {
  auto c = load_pipeline_config(testing::data_dir() + "/planted/pipeline.toml");
  c.output_dir = testing::temp_dir(tag);
  c.rerank.retry_backoff_ms = 0;
  return c;
}

std::vector<std::string> ids(const Ranking& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries) out.push_back(e.doc_id);
  return out;
}

/// Reverses the candidate order of each prompt.
testing::ScriptedClient::Responder reversing_reranker() {
  return [](const std::string& prompt) {
    auto c = testing::prompt_candidate_ids(prompt);
    std::reverse(c.begin(), c.end());
    std::string out;
    for (const auto& id : c) out += (out.empty() ? "" : "\t") + id;
    return out;
  };
}

}  // namespace

TEST_CASE("identity reranker keeps the first-stage order") {
  auto cfg = planted_config("identity");
  testing::MockFactory mock{testing::identity_reranker()};
  const auto result = run_pipeline(cfg, {false, mock.factory()});
  CHECK(result.fallbacks() == 0);
  CHECK(*mock.calls == 50);

  const auto dense = read_run_file(cfg.output_dir + "/runs/dense.tsv");
  REQUIRE(dense.size() == result.final_rankings.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    CHECK(ids(result.final_rankings[i]) == ids(dense[i].truncated(10)));
  }
  CHECK(result.report.macro_avg == doctest::Approx(1.0));
  for (const char* f : {"runs/dense.tsv", "runs/reranked.tsv", "runs/fused.tsv", "runs/final.tsv", "report.json",
                        "stages.tsv", "manifest.json", "rerank_log.jsonl"}) {
    CHECK_MESSAGE(fs::exists(cfg.output_dir + "/" + f), f);
  }
  CHECK_FALSE(fs::exists(cfg.output_dir + "/runs/sparse.tsv"));
}

TEST_CASE("dry run writes nothing and makes no model calls") {
  auto cfg = planted_config("dry");
  fs::remove_all(cfg.output_dir);
  testing::MockFactory mock{testing::identity_reranker()};
  const auto result = run_pipeline(cfg, {true, mock.factory()});
  CHECK(result.dry_run);
  CHECK(*mock.calls == 0);
  CHECK_FALSE(fs::exists(cfg.output_dir));
}

TEST_CASE("input problems fail before any client exists") {
  testing::MockFactory mock{testing::identity_reranker()};
  auto cfg = planted_config("failfast");
  cfg.fact_check_embeddings = cfg.output_dir + "/nope.jsonl";
  CHECK_THROWS_AS(run_pipeline(cfg, {false, mock.factory()}), ConfigError);

  cfg = planted_config("failfast-dim");
  const auto bad = cfg.output_dir + "/bad_posts.jsonl";
  write_file_atomic(bad, "{\"id\":\"post-000\",\"vec\":[1.0,0.0]}\n");
  cfg.post_embeddings = bad;
  CHECK_THROWS_AS(run_pipeline(cfg, {false, mock.factory()}), DimensionMismatchError);
  CHECK(*mock.created == 0);
  CHECK(*mock.calls == 0);
}

TEST_CASE("garbage reranker output falls back and is counted") {
  auto cfg = planted_config("garbage");
  testing::MockFactory mock{testing::garbage_responder()};
  const auto result = run_pipeline(cfg, {false, mock.factory()});
  CHECK(result.rerank_fallbacks == 50);
  const auto dense = read_run_file(cfg.output_dir + "/runs/dense.tsv");
  const auto reranked = read_run_file(cfg.output_dir + "/runs/reranked.tsv");
  REQUIRE(reranked.size() == dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) CHECK(ids(reranked[i]) == ids(dense[i].truncated(10)));
  const auto log = read_file(cfg.output_dir + "/rerank_log.jsonl");
  CHECK(log.find("\"fallback\":true") != std::string::npos);
  CHECK(log.find("\"fallback\":false") == std::string::npos);
}

TEST_CASE("pipeline final run equals the single-stage CLI chain") {
  auto cfg = planted_config("isolation");
  testing::MockFactory mock{reversing_reranker()};
  run_pipeline(cfg, {false, mock.factory()});

  const auto dir = testing::data_dir() + "/planted/";
  const auto work = testing::temp_dir("isolation-cli");
  const cli::Services services{mock.factory()};
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, services, out, err); };
  REQUIRE(run({"search", "--mode", "dense", "--doc-embeddings", dir + "fact_check_embeddings.jsonl",
               "--query-embeddings", dir + "post_embeddings.jsonl", "--k", "50", "--out", work + "/dense.tsv"}) ==
          0);
  REQUIRE(run({"rerank", "--run", work + "/dense.tsv", "--posts", dir + "posts.jsonl", "--fact-checks",
               dir + "fact_checks.jsonl", "--depth", "50", "--base-url", "http://127.0.0.1:9/v1", "--model",
               "mock-reranker", "--out", work + "/reranked.tsv"}) == 0);
  REQUIRE(run({"fuse", work + "/dense.tsv", work + "/reranked.tsv", "--top", "10", "--out", work + "/final.tsv"}) ==
          0);
  CHECK(read_file(work + "/dense.tsv") == read_file(cfg.output_dir + "/runs/dense.tsv"));
  CHECK(read_file(work + "/reranked.tsv") == read_file(cfg.output_dir + "/runs/reranked.tsv"));
  CHECK(read_file(work + "/final.tsv") == read_file(cfg.output_dir + "/runs/final.tsv"));
}

TEST_CASE("translation stage rewrites the post text") {
  auto cfg = planted_config("translate");
  cfg.rerank.enabled = false;
  cfg.translation.enabled = true;
  cfg.translation.endpoint.base_url = "http://127.0.0.1:9/v1";
  cfg.translation.endpoint.model_name = "mock-translator";
  testing::MockFactory mock{testing::echo_translator()};
  const auto result = run_pipeline(cfg, {false, mock.factory()});
  CHECK(result.translation_fallbacks == 0);
  CHECK(*mock.calls == 50);
  const auto translated = read_posts(cfg.output_dir + "/translated_posts.jsonl");
  REQUIRE(translated.size() == 50);
  for (const auto& p : translated) {
    REQUIRE(p.translated_text);
    CHECK(p.translated_text->rfind("EN: ", 0) == 0);
  }
  CHECK_FALSE(fs::exists(cfg.output_dir + "/runs/reranked.tsv"));
}

TEST_CASE("BM25 hybrid stage and same-language pool") {
  auto cfg = planted_config("hybrid");
  cfg.rerank.enabled = false;
  cfg.bm25.enabled = true;
  cfg.pool = PoolMode::same_language;
  const auto result = run_pipeline(cfg, {false, testing::MockFactory{testing::identity_reranker()}.factory()});
  const auto sparse = read_run_file(cfg.output_dir + "/runs/sparse.tsv");
  const auto hybrid = read_run_file(cfg.output_dir + "/runs/hybrid.tsv");
  CHECK(sparse.size() == 50);
  CHECK(hybrid.size() == 50);

  const auto corpus = load_corpus(cfg.corpus);
  std::map<std::string, std::string> language;
  for (const auto& fc : corpus.fact_checks()) language[fc.id] = fc.language;
  for (const auto& run : {sparse, hybrid}) {
    for (std::size_t i = 0; i < run.size(); ++i) {
      const auto& post = corpus.posts()[i];
      CHECK(run[i].query_id == post.id);
      for (const auto& e : run[i].entries) CHECK(language[e.doc_id] == post.language);
    }
  }
  // Every post quotes four words of its gold claim, so BM25 alone finds it.
  REQUIRE(result.stage_reports.size() == 4);
  CHECK(result.stage_reports[1].config_label == "planted/sparse");
  CHECK(result.stage_reports[1].macro_avg == doctest::Approx(1.0));
  CHECK(result.report.macro_avg == doctest::Approx(1.0));
}
