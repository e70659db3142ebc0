#include "fcr/pipeline.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <omp.h>

#include <chrono>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <unordered_map>

#include "fcr/error.hpp"
#include "fcr/fusion.hpp"
#include "fcr/hashing.hpp"
#include "fcr/llm/cache.hpp"
#include "fcr/llm/rerank.hpp"
#include "fcr/llm/translate.hpp"
#include "fcr/sparse_index.hpp"
#include "fcr/text_util.hpp"
#include "fcr/version.hpp"

namespace fcr {

namespace fs = std::filesystem;

ChatClientFactory http_client_factory() {
  return [](const llm::ChatEndpointConfig& cfg) -> std::unique_ptr<llm::ChatClient> {
    return std::make_unique<llm::HttpChatClient>(cfg);
  };
}

std::vector<DenseQuery> post_queries(const Corpus& corpus,
                                     const std::vector<EmbeddingRecord>& post_embeddings) {
  std::unordered_map<std::string_view, const EmbeddingRecord*> by_id;
  for (const auto& r : post_embeddings) {
    if (!by_id.emplace(r.id, &r).second) throw DuplicateIdError("post embedding", r.id);
  }
  std::vector<DenseQuery> out;
  out.reserve(corpus.posts().size());
  for (const auto& post : corpus.posts()) {
    auto it = by_id.find(post.id);
    if (it == by_id.end()) {
      throw ValidationError(fmt::format("post \"{}\" has no embedding", post.id));
    }
    normalized(it->second->vector, post.id);
    out.push_back(DenseQuery{post.id, it->second->vector});
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> language_filters(const Corpus& corpus, const EmbeddingStore& store,
                                                        PoolMode pool) {
  std::vector<std::vector<std::uint8_t>> out(corpus.posts().size());
  if (pool == PoolMode::full) return out;
  std::map<std::string, std::vector<std::uint8_t>> by_language;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& language = corpus.posts()[i].language;
    auto [it, inserted] = by_language.try_emplace(language);
    if (inserted) {
      it->second.resize(store.size());
      for (std::size_t row = 0; row < store.size(); ++row) {
        const auto* fc = corpus.find_fact_check(store.id(row));
        it->second[row] = fc && fc->language == language ? 1 : 0;
      }
    }
    out[i] = it->second;
  }
  return out;
}

std::vector<llm::RerankRequest> build_rerank_requests(const Corpus& corpus,
                                                      std::span<const Ranking> first_stage,
                                                      const TextSelector& post_text,
                                                      const TextSelector& doc_text, std::size_t depth) {
  std::vector<llm::RerankRequest> out;
  out.reserve(first_stage.size());
  for (const auto& ranking : first_stage) {
    const auto* post = corpus.find_post(ranking.query_id);
    if (!post) throw DanglingReferenceError("post", ranking.query_id);
    llm::RerankRequest req;
    req.query_text = select_text(*post, post_text);
    if (post->ocr_text && !post->ocr_text->empty()) req.augmentation_text = *post->ocr_text;
    const auto n = std::min({depth, ranking.entries.size(), llm::kMaxRerankCandidates});
    for (std::size_t i = 0; i < n; ++i) {
      const auto* fc = corpus.find_fact_check(ranking.entries[i].doc_id);
      if (!fc) throw DanglingReferenceError("fact-check", ranking.entries[i].doc_id);
      req.candidates.push_back(llm::RerankCandidate{fc->id, select_text(*fc, doc_text)});
    }
    out.push_back(std::move(req));
  }
  return out;
}

void check_store_against_corpus(const EmbeddingStore& store, const Corpus& corpus) {
  for (const auto& id : store.ids()) {
    if (!corpus.find_fact_check(id)) throw DanglingReferenceError("fact-check", id);
  }
}

MiningRetriever dense_mining_retriever(const EmbeddingStore& store, std::span<const DenseQuery> queries) {
  auto unit = std::make_shared<std::unordered_map<std::string, std::vector<float>>>();
  for (const auto& q : queries) unit->emplace(q.id, normalized(q.vector, q.id));
  auto query = [unit](const std::string& post_id) -> const std::vector<float>& {
    const auto it = unit->find(post_id);
    if (it == unit->end()) throw ValidationError(fmt::format("post \"{}\" has no embedding", post_id));
    return it->second;
  };
  MiningRetriever retriever;
  retriever.search = [&store, query](const std::string& post_id, std::size_t depth) {
    return search(store, query(post_id), depth, post_id);
  };
  retriever.score = [&store, query](const std::string& post_id, const std::string& doc_id) {
    const auto row = store.find(doc_id);
    if (!row) throw ValidationError(fmt::format("fact-check \"{}\" has no embedding", doc_id));
    return static_cast<double>(dot(store.row(*row), query(post_id)));
  };
  return retriever;
}

namespace {

std::string now_utc() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
}

std::vector<Ranking> fuse_per_query(const std::vector<Ranking>& a, const std::vector<Ranking>& b,
                                    const RrfConfig& rrf) {
  std::vector<Ranking> out(a.size());
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const Ranking inputs[2] = {a[u], b[u]};
    out[u] = rrf_fuse(inputs, rrf);
  }
  return out;
}

std::vector<Ranking> truncate_all(const std::vector<Ranking>& rankings, std::size_t k) {
  std::vector<Ranking> out;
  out.reserve(rankings.size());
  for (const auto& r : rankings) out.push_back(r.truncated(k));
  return out;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const PipelineOptions& options) {
  config.validate(true);
  if (config.threads > 0) omp_set_num_threads(config.threads);

  // Load and cross-check every input before any model call or scan.
  Corpus corpus = load_corpus(config.corpus);
  const auto store = load_embeddings(config.fact_check_embeddings);
  if (store.empty()) throw ValidationError("fact-check embeddings file is empty");
  check_store_against_corpus(store, corpus);
  const auto post_records = read_embedding_records(config.post_embeddings);
  if (!post_records.empty() && post_records.front().vector.size() != store.dimension()) {
    throw DimensionMismatchError(store.dimension(), post_records.front().vector.size());
  }
  const auto queries = post_queries(corpus, post_records);

  const auto factory = options.client_factory ? options.client_factory : http_client_factory();
  std::unique_ptr<llm::ChatClient> translator;
  std::unique_ptr<llm::ChatClient> reranker;
  if (config.translation.enabled) translator = factory(config.translation.endpoint);
  if (config.rerank.enabled) reranker = factory(config.rerank.endpoint);

  PipelineResult result;
  if (options.dry_run) {
    result.dry_run = true;
    return result;
  }

  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir / "runs");
  std::unique_ptr<llm::ResponseCache> cache;
  if (translator || reranker) cache = std::make_unique<llm::ResponseCache>(config.effective_cache_dir());

  if (translator) {
    const llm::RetryPolicy retry{config.translation.endpoint.max_retries,
                                 std::chrono::milliseconds(config.translation.retry_backoff_ms)};
    const auto batch = llm::translate_posts(*translator, corpus.posts(), cache.get(), retry,
                                            config.translation.endpoint.max_concurrent_requests);
    result.translation_fallbacks = batch.fallbacks;
    auto translated = llm::apply_translations(corpus.posts(), batch);
    write_posts((out_dir / "translated_posts.jsonl").string(), translated);
    corpus = Corpus(std::move(translated), corpus.fact_checks(), corpus.pairs());
  }

  const auto gold = GoldStandard::from_corpus(corpus);
  auto stage_report = [&](const std::vector<Ranking>& rankings, std::string_view stage) {
    result.stage_reports.push_back(
        evaluate(rankings, gold, config.final_k, fmt::format("{}/{}", config.label, stage)));
  };
  auto write_stage = [&](const std::vector<Ranking>& rankings, std::string_view stage) {
    write_run_file((out_dir / "runs" / fmt::format("{}.tsv", stage)).string(), rankings);
  };

  // First stage: dense, optionally fused with BM25.
  const auto filter_storage = language_filters(corpus, store, config.pool);
  std::vector<RowFilter> filters;
  if (config.pool == PoolMode::same_language) {
    for (const auto& f : filter_storage) filters.emplace_back(f);
  }
  auto dense = batch_search(store, queries, config.k_candidates, filters);
  write_stage(dense, "dense");
  stage_report(dense, "dense");

  std::vector<Ranking> first_stage = dense;
  if (config.bm25.enabled) {
    std::vector<std::pair<std::string, std::string>> docs;
    docs.reserve(corpus.fact_checks().size());
    for (const auto& fc : corpus.fact_checks()) docs.emplace_back(fc.id, select_text(fc, config.doc_text));
    const auto index = InvertedIndex::build(docs);
    std::vector<SparseQuery> sparse_queries;
    for (const auto& post : corpus.posts()) sparse_queries.push_back({post.id, select_text(post, config.post_text)});

    std::vector<std::vector<std::uint8_t>> doc_filter_storage;
    std::vector<RowFilter> doc_filters;
    if (config.pool == PoolMode::same_language) {
      std::map<std::string, std::vector<std::uint8_t>> by_language;
      for (const auto& post : corpus.posts()) {
        auto [it, inserted] = by_language.try_emplace(post.language);
        if (inserted) {
          for (const auto& fc : corpus.fact_checks()) it->second.push_back(fc.language == post.language);
        }
        doc_filter_storage.push_back(it->second);
      }
      for (const auto& f : doc_filter_storage) doc_filters.emplace_back(f);
    }
    const auto sparse = bm25_batch_search(index, sparse_queries, config.k_candidates, config.bm25.params, doc_filters);
    write_stage(sparse, "sparse");
    stage_report(sparse, "sparse");
    first_stage = truncate_all(fuse_per_query(dense, sparse, config.rrf), config.k_candidates);
    write_stage(first_stage, "hybrid");
    stage_report(first_stage, "hybrid");
  }

  std::vector<Ranking> final_full = first_stage;
  if (reranker) {
    const auto requests = build_rerank_requests(corpus, first_stage, config.post_text, config.doc_text,
                                                config.k_candidates);
    const llm::RetryPolicy retry{config.rerank.endpoint.max_retries,
                                 std::chrono::milliseconds(config.rerank.retry_backoff_ms)};
    const auto batch = llm::rerank_batch(*reranker, requests, first_stage, cache.get(), retry,
                                         config.rerank.endpoint.max_concurrent_requests);
    result.rerank_fallbacks = batch.fallbacks;
    std::vector<Ranking> reranked;
    std::string log;
    for (std::size_t i = 0; i < batch.outcomes.size(); ++i) {
      const auto& o = batch.outcomes[i];
      reranked.push_back(o.ranking);
      log += nlohmann::json{{"query_id", first_stage[i].query_id},
                            {"status", llm::to_string(o.status)},
                            {"fallback", o.fallback}}
                 .dump();
      log += '\n';
    }
    write_stage(reranked, "reranked");
    stage_report(reranked, "reranked");
    write_file_atomic((out_dir / "rerank_log.jsonl").string(), log);
    final_full = fuse_per_query(first_stage, reranked, config.rrf);
    write_stage(final_full, "fused");
  }

  result.final_rankings = truncate_all(final_full, config.final_k);
  write_stage(result.final_rankings, "final");
  result.report = evaluate(result.final_rankings, gold, config.final_k, config.label);
  result.stage_reports.push_back(result.report);

  write_file_atomic((out_dir / "report.json").string(), result.report.to_json());
  write_file_atomic((out_dir / "stages.tsv").string(), ablation_report(result.stage_reports));

  nlohmann::ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["created_at"] = now_utc();
  manifest["config"] = nlohmann::ordered_json::parse(config.to_json());
  nlohmann::ordered_json inputs;
  for (const auto& path : {config.corpus.posts, config.corpus.fact_checks, config.corpus.pairs,
                           config.post_embeddings, config.fact_check_embeddings}) {
    inputs[path] = sha256_file_hex(path);
  }
  manifest["inputs"] = inputs;
  manifest["prompt_templates"] = {std::string(llm::kTranslationTemplateVersion),
                                  std::string(llm::kRerankTemplateVersion)};
  manifest["fallbacks"] = {{"translation", result.translation_fallbacks},
                           {"rerank", result.rerank_fallbacks}};
  write_file_atomic((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
  return result;
}

}  // namespace fcr
