#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fcr/config.hpp"
#include "fcr/corpus.hpp"
#include "fcr/dense_index.hpp"
#include "fcr/evaluation.hpp"
#include "fcr/llm/chat.hpp"
#include "fcr/llm/prompts.hpp"
#include "fcr/mining.hpp"
#include "fcr/ranking.hpp"

namespace fcr {

/// Builds chat clients for the LLM stages. The default creates
/// HttpChatClient; tests substitute in-process fakes.
using ChatClientFactory =
    std::function<std::unique_ptr<llm::ChatClient>(const llm::ChatEndpointConfig&)>;

ChatClientFactory http_client_factory();

// Building blocks shared by the pipeline and the single-stage CLI commands.

/// One dense query per corpus post, in corpus order. Throws ValidationError
/// when a post has no embedding.
std::vector<DenseQuery> post_queries(const Corpus& corpus, const std::vector<EmbeddingRecord>& post_embeddings);

/// Per-post row filters over `store` (same-language pool) or none (full pool).
std::vector<std::vector<std::uint8_t>> language_filters(const Corpus& corpus, const EmbeddingStore& store,
                                                        PoolMode pool);

/// Rerank requests from the top `depth` entries of each first-stage ranking.
/// The augmentation slot carries the post's OCR text when it has one.
std::vector<llm::RerankRequest> build_rerank_requests(const Corpus& corpus,
                                                      std::span<const Ranking> first_stage,
                                                      const TextSelector& post_text,
                                                      const TextSelector& doc_text, std::size_t depth);

/// Mining view of exact dense search. `store` must outlive the retriever.
MiningRetriever dense_mining_retriever(const EmbeddingStore& store, std::span<const DenseQuery> queries);

/// Fails when a store id is not a corpus fact-check.
void check_store_against_corpus(const EmbeddingStore& store, const Corpus& corpus);

struct PipelineResult {
  EvalReport report;                       // final rankings
  std::vector<EvalReport> stage_reports;   // one per produced stage
  std::vector<Ranking> final_rankings;
  std::size_t translation_fallbacks = 0;
  std::size_t rerank_fallbacks = 0;
  bool dry_run = false;

  std::size_t fallbacks() const { return translation_fallbacks + rerank_fallbacks; }
};

struct PipelineOptions {
  bool dry_run = false;
  ChatClientFactory client_factory;  // empty: HTTP clients
};

/// Runs dense retrieval, optional BM25 hybrid fusion, optional translation,
/// optional LLM reranking and RRF of the first stage with the reranked list,
/// then scores the final top final_k. Every configuration and input problem is
/// detected before any model call or scan. Writes under config.output_dir:
///   runs/<stage>.tsv, report.json, stages.tsv, manifest.json and, when
///   translation is on, translated_posts.jsonl.
/// A dry run stops after validation and loading and writes nothing.
PipelineResult run_pipeline(const PipelineConfig& config, const PipelineOptions& options = {});

}  // namespace fcr
