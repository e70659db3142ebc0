#pragma once

#include <cstddef>
#include <string>

#include "fcr/corpus.hpp"
#include "fcr/fusion.hpp"
#include "fcr/llm/chat.hpp"
#include "fcr/sparse_index.hpp"

namespace fcr {

struct LlmStageConfig {
  bool enabled = false;
  llm::ChatEndpointConfig endpoint;
  int retry_backoff_ms = 500;
};

struct Bm25StageConfig {
  bool enabled = false;
  Bm25Params params;
};

/// Every toggle of the retrieval pipeline. Relative paths in a config file
/// are resolved against the file's directory.
struct PipelineConfig {
  std::string label = "pipeline";
  CorpusPaths corpus;
  std::string post_embeddings;
  std::string fact_check_embeddings;
  TextSelector post_text{TextMode::translated_with_fallback, false};
  TextSelector doc_text{TextMode::translated_with_fallback, true};
  PoolMode pool = PoolMode::full;
  std::size_t k_candidates = 50;
  std::size_t final_k = 10;
  LlmStageConfig translation;
  LlmStageConfig rerank;
  Bm25StageConfig bm25;
  RrfConfig rrf;
  std::string output_dir = "out";
  std::string cache_dir;  // empty: <output_dir>/cache
  int threads = 0;        // 0: OpenMP default

  /// Throws ConfigError on broken invariants, and for missing input files
  /// when `check_paths` is set.
  void validate(bool check_paths = true) const;

  std::string effective_cache_dir() const;
  /// Resolved configuration as pretty-printed JSON (no secrets).
  std::string to_json() const;
};

PipelineConfig parse_pipeline_config(const std::string& toml_text, const std::string& base_dir = ".");
PipelineConfig load_pipeline_config(const std::string& path);

}  // namespace fcr
