#include "fcr/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <json.hpp>
#include <toml.hpp>

#include "fcr/error.hpp"
#include "fcr/llm/prompts.hpp"
#include "fcr/text_util.hpp"

namespace fcr {

namespace fs = std::filesystem;

namespace {

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(fmt::format("{} path is not set", what));
  if (!fs::is_regular_file(path)) throw ConfigError(fmt::format("{} file \"{}\" does not exist", what, path));
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

template <typename T>
T get_or(const toml::table& table, std::string_view key, T fallback) {
  const auto* node = table.get(key);
  if (!node) return fallback;
  if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node->value<std::string>()) return *v;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node->value<bool>()) return *v;
  } else if constexpr (std::is_floating_point_v<T>) {
    if (auto v = node->value<double>()) return static_cast<T>(*v);
  } else {
    if (auto v = node->value<std::int64_t>()) {
      if (*v < 0 && std::is_unsigned_v<T>) throw ConfigError(fmt::format("\"{}\" must not be negative", key));
      return static_cast<T>(*v);
    }
  }
  throw ConfigError(fmt::format("config key \"{}\" has the wrong type", key));
}

const toml::table& section(const toml::table& root, std::string_view name) {
  static const toml::table empty;
  const auto* node = root.get(name);
  if (!node) return empty;
  if (const auto* t = node->as_table()) return *t;
  throw ConfigError(fmt::format("config key \"{}\" must be a table", name));
}

void check_keys(const toml::table& table, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  for (const auto& [key, _] : table) {
    if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end()) {
      throw ConfigError(where.empty() ? fmt::format("unknown config key \"{}\"", key.str())
                                      : fmt::format("unknown config key \"{}.{}\"", where, key.str()));
    }
  }
}

LlmStageConfig read_llm_stage(const toml::table& t, std::string_view where) {
  check_keys(t,
             {"enabled", "base_url", "model", "api_key_env", "timeout_seconds", "max_retries",
              "max_concurrent_requests", "temperature", "retry_backoff_ms"},
             where);
  LlmStageConfig s;
  s.enabled = get_or(t, "enabled", false);
  s.endpoint.base_url = get_or(t, "base_url", std::string());
  s.endpoint.model_name = get_or(t, "model", std::string());
  s.endpoint.api_key_env_var = get_or(t, "api_key_env", std::string());
  s.endpoint.timeout_seconds = get_or(t, "timeout_seconds", s.endpoint.timeout_seconds);
  s.endpoint.max_retries = get_or(t, "max_retries", s.endpoint.max_retries);
  s.endpoint.max_concurrent_requests = get_or(t, "max_concurrent_requests", s.endpoint.max_concurrent_requests);
  s.endpoint.temperature = get_or(t, "temperature", s.endpoint.temperature);
  s.retry_backoff_ms = get_or(t, "retry_backoff_ms", s.retry_backoff_ms);
  return s;
}

nlohmann::ordered_json llm_stage_json(const LlmStageConfig& s) {
  return {{"enabled", s.enabled},
          {"base_url", s.endpoint.base_url},
          {"model", s.endpoint.model_name},
          {"api_key_env", s.endpoint.api_key_env_var},
          {"timeout_seconds", s.endpoint.timeout_seconds},
          {"max_retries", s.endpoint.max_retries},
          {"max_concurrent_requests", s.endpoint.max_concurrent_requests},
          {"temperature", s.endpoint.temperature},
          {"retry_backoff_ms", s.retry_backoff_ms}};
}

}  // namespace

void PipelineConfig::validate(bool check_paths) const {
  if (k_candidates < 1) throw ConfigError("k_candidates must be at least 1");
  if (final_k < 1) throw ConfigError("final_k must be at least 1");
  if (final_k > k_candidates) {
    throw ConfigError(fmt::format("final_k ({}) exceeds k_candidates ({})", final_k, k_candidates));
  }
  if (rerank.enabled && k_candidates > llm::kMaxRerankCandidates) {
    throw ConfigError(fmt::format("the reranker accepts at most {} candidates, k_candidates is {}",
                                  llm::kMaxRerankCandidates, k_candidates));
  }
  if (!(rrf.k_rrf > 0.0)) throw ConfigError("rrf.k must be positive");
  if (!rrf.weights.empty() && rrf.weights.size() != 2) {
    throw ConfigError("rrf.weights must hold two values (first stage, second list)");
  }
  for (double w : rrf.weights) {
    if (!(w > 0.0)) throw ConfigError("rrf.weights must be positive");
  }
  if (bm25.enabled && (!(bm25.params.k1 >= 0.0) || !(bm25.params.b >= 0.0 && bm25.params.b <= 1.0))) {
    throw ConfigError("bm25 needs k1 >= 0 and 0 <= b <= 1");
  }
  if (translation.enabled) translation.endpoint.validate();
  if (rerank.enabled) rerank.endpoint.validate();
  if (output_dir.empty()) throw ConfigError("output_dir is not set");
  if (check_paths) {
    require_file(corpus.posts, "posts");
    require_file(corpus.fact_checks, "fact_checks");
    require_file(corpus.pairs, "pairs");
    require_file(post_embeddings, "post embeddings");
    require_file(fact_check_embeddings, "fact-check embeddings");
  }
}

std::string PipelineConfig::effective_cache_dir() const {
  return cache_dir.empty() ? (fs::path(output_dir) / "cache").string() : cache_dir;
}

std::string PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["label"] = label;
  j["corpus"] = {{"posts", corpus.posts},
                 {"fact_checks", corpus.fact_checks},
                 {"pairs", corpus.pairs},
                 {"post_text_mode", to_string(post_text.mode)},
                 {"doc_text_mode", to_string(doc_text.mode)},
                 {"include_title", doc_text.include_title},
                 {"pool", to_string(pool)}};
  j["embeddings"] = {{"posts", post_embeddings}, {"fact_checks", fact_check_embeddings}};
  j["retrieval"] = {{"k_candidates", k_candidates}, {"final_k", final_k}};
  j["bm25"] = {{"enabled", bm25.enabled}, {"k1", bm25.params.k1}, {"b", bm25.params.b}};
  j["rrf"] = {{"k", rrf.k_rrf}, {"weights", rrf.weights}};
  j["translation"] = llm_stage_json(translation);
  j["rerank"] = llm_stage_json(rerank);
  j["output_dir"] = output_dir;
  j["cache_dir"] = effective_cache_dir();
  j["threads"] = threads;
  return j.dump(2);
}

PipelineConfig parse_pipeline_config(const std::string& toml_text, const std::string& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("invalid TOML at line {}: {}", e.source().begin.line, e.description()));
  }
  check_keys(root,
             {"label", "output_dir", "threads", "corpus", "embeddings", "retrieval", "bm25", "rrf",
              "translation", "rerank", "cache"},
             "");
  PipelineConfig c;
  c.label = get_or(root, "label", c.label);
  c.output_dir = resolve(base_dir, get_or(root, "output_dir", c.output_dir));
  c.threads = get_or(root, "threads", c.threads);

  const auto& corpus = section(root, "corpus");
  check_keys(corpus, {"posts", "fact_checks", "pairs", "text_mode", "include_title", "pool"}, "corpus");
  c.corpus.posts = resolve(base_dir, get_or(corpus, "posts", std::string()));
  c.corpus.fact_checks = resolve(base_dir, get_or(corpus, "fact_checks", std::string()));
  c.corpus.pairs = resolve(base_dir, get_or(corpus, "pairs", std::string()));
  const auto mode = parse_text_mode(get_or(corpus, "text_mode", std::string(to_string(c.post_text.mode))));
  c.post_text.mode = mode;
  c.doc_text.mode = mode;
  c.doc_text.include_title = get_or(corpus, "include_title", c.doc_text.include_title);
  c.pool = parse_pool_mode(get_or(corpus, "pool", std::string(to_string(c.pool))));

  const auto& emb = section(root, "embeddings");
  check_keys(emb, {"posts", "fact_checks"}, "embeddings");
  c.post_embeddings = resolve(base_dir, get_or(emb, "posts", std::string()));
  c.fact_check_embeddings = resolve(base_dir, get_or(emb, "fact_checks", std::string()));

  const auto& retrieval = section(root, "retrieval");
  check_keys(retrieval, {"k_candidates", "final_k"}, "retrieval");
  c.k_candidates = get_or(retrieval, "k_candidates", c.k_candidates);
  c.final_k = get_or(retrieval, "final_k", c.final_k);

  const auto& bm25 = section(root, "bm25");
  check_keys(bm25, {"enabled", "k1", "b"}, "bm25");
  c.bm25.enabled = get_or(bm25, "enabled", false);
  c.bm25.params.k1 = get_or(bm25, "k1", c.bm25.params.k1);
  c.bm25.params.b = get_or(bm25, "b", c.bm25.params.b);

  const auto& rrf = section(root, "rrf");
  check_keys(rrf, {"k", "weights"}, "rrf");
  c.rrf.k_rrf = get_or(rrf, "k", c.rrf.k_rrf);
  if (const auto* w = rrf.get("weights")) {
    const auto* arr = w->as_array();
    if (!arr) throw ConfigError("rrf.weights must be an array");
    for (const auto& x : *arr) {
      auto v = x.value<double>();
      if (!v) throw ConfigError("rrf.weights must hold numbers");
      c.rrf.weights.push_back(*v);
    }
  }

  c.translation = read_llm_stage(section(root, "translation"), "translation");
  c.rerank = read_llm_stage(section(root, "rerank"), "rerank");

  const auto& cache = section(root, "cache");
  check_keys(cache, {"dir"}, "cache");
  c.cache_dir = resolve(base_dir, get_or(cache, "dir", std::string()));
  return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_pipeline_config(text, fs::path(path).parent_path().string());
}

}  // namespace fcr
