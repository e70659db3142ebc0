#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fcr/llm/cache.hpp"
#include "fcr/llm/chat.hpp"
#include "fcr/llm/prompts.hpp"
#include "fcr/ranking.hpp"

namespace fcr::llm {

enum class ParseStatus { clean, repaired, failed };

std::string_view to_string(ParseStatus status);

struct RerankResponse {
  std::vector<std::string> ranked_ids;  // subset of the candidates, unique, at most 10
  std::string raw_text;
  ParseStatus status = ParseStatus::failed;
};

/// Reads the reranker's id list. The expected shape is one tab-separated line.
/// When that yields fewer than two tokens, or tokens that are not candidates,
/// the text is re-split on commas, semicolons and whitespace with wrapping
/// quotes and brackets stripped. Unknown ids are dropped, repeats keep their
/// first position and the list is cut at 10.
RerankResponse parse_rerank_response(std::string_view raw,
                                     const std::unordered_set<std::string>& candidate_ids);

struct RerankOutcome {
  Ranking ranking;           // stage reranked
  ParseStatus status = ParseStatus::failed;
  bool fallback = false;     // ranking is the base top 10
  bool from_cache = false;
  std::string raw_text;
};

/// Asks the model to reorder the request's candidates. A parsed id list
/// becomes a ranking scored 1/position, with no padding. A failed parse,
/// transport failure or invalid request yields `base` cut to 10 entries with
/// `fallback` set. Only ConfigError escapes.
RerankOutcome rerank(ChatClient& client, const RerankRequest& request, const Ranking& base,
                     const ResponseCache* cache, const RetryPolicy& retry);

struct RerankBatch {
  std::vector<RerankOutcome> outcomes;
  std::size_t fallbacks = 0;
};

/// requests[i] pairs with bases[i]; at most `max_concurrent` calls in flight.
RerankBatch rerank_batch(ChatClient& client, std::span<const RerankRequest> requests,
                         std::span<const Ranking> bases, const ResponseCache* cache,
                         const RetryPolicy& retry, int max_concurrent);

}  // namespace fcr::llm
