#include "fcr/llm/rerank.hpp"

#include <algorithm>

#include "fcr/error.hpp"
#include "fcr/parallel.hpp"
#include "fcr/text_util.hpp"

namespace fcr::llm {

std::string_view to_string(ParseStatus status) {
  switch (status) {
    case ParseStatus::clean: return "clean";
    case ParseStatus::repaired: return "repaired";
    case ParseStatus::failed: return "failed";
  }
  return "failed";
}

namespace {

std::vector<std::string> tab_tokens(std::string_view raw) {
  std::vector<std::string> out;
  for (auto part : split(trim(raw), '\t')) {
    part = trim(part);
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

bool is_separator(char c) {
  return c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_wrapper(char c) {
  return c == '"' || c == '\'' || c == '`' || c == '[' || c == ']' || c == '(' || c == ')' ||
         c == '{' || c == '}' || c == '<' || c == '>' || c == '*' || c == '.' || c == ':';
}

std::vector<std::string> repair_tokens(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && is_separator(raw[i])) ++i;
    const auto start = i;
    while (i < raw.size() && !is_separator(raw[i])) ++i;
    auto token = raw.substr(start, i - start);
    while (!token.empty() && is_wrapper(token.front())) token.remove_prefix(1);
    while (!token.empty() && is_wrapper(token.back())) token.remove_suffix(1);
    if (!token.empty()) out.emplace_back(token);
  }
  return out;
}

// Valid, first-occurrence ids capped at kRerankKeep. `modified` reports
// whether an invalid or repeated token was dropped before the cap.
std::vector<std::string> filter_tokens(const std::vector<std::string>& tokens,
                                       const std::unordered_set<std::string>& candidates,
                                       bool& modified) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  modified = false;
  for (const auto& t : tokens) {
    if (!candidates.count(t) || !seen.insert(t).second) {
      modified = true;
      continue;
    }
    out.push_back(t);
    if (out.size() == kRerankKeep) break;
  }
  return out;
}

RerankOutcome fallback_outcome(const Ranking& base, std::string raw, ParseStatus status) {
  RerankOutcome out;
  out.ranking = base.truncated(kRerankKeep);
  out.ranking.stage = Stage::reranked;
  out.status = status;
  out.fallback = true;
  out.raw_text = std::move(raw);
  return out;
}

}  // namespace

RerankResponse parse_rerank_response(std::string_view raw,
                                     const std::unordered_set<std::string>& candidate_ids) {
  RerankResponse response;
  response.raw_text = std::string(raw);

  const auto first = tab_tokens(raw);
  bool first_modified = false;
  auto first_ids = filter_tokens(first, candidate_ids, first_modified);
  if (first.size() >= 2 && !first_modified) {
    response.ranked_ids = std::move(first_ids);
    response.status = ParseStatus::clean;
    return response;
  }

  const auto second = repair_tokens(raw);
  bool second_modified = false;
  auto second_ids = filter_tokens(second, candidate_ids, second_modified);
  // A lone well-formed id is a clean answer, not a repair.
  const bool clean_single = second == first && !second_modified;
  if (first.size() >= 2 && first_ids.size() >= second_ids.size()) {
    response.ranked_ids = std::move(first_ids);
  } else {
    response.ranked_ids = std::move(second_ids);
  }
  if (response.ranked_ids.empty()) {
    response.status = ParseStatus::failed;
  } else {
    response.status = clean_single ? ParseStatus::clean : ParseStatus::repaired;
  }
  return response;
}

RerankOutcome rerank(ChatClient& client, const RerankRequest& request, const Ranking& base,
                     const ResponseCache* cache, const RetryPolicy& retry) {
  std::string prompt;
  try {
    prompt = build_rerank_prompt(request);
  } catch (const ValidationError&) {
    return fallback_outcome(base, {}, ParseStatus::failed);
  }

  const auto key = cache_key(kRerankTemplateVersion, client.model_name(), prompt);
  std::string raw;
  bool from_cache = false;
  if (cache) {
    if (auto hit = cache->get(key)) {
      raw = std::move(*hit);
      from_cache = true;
    }
  }
  if (!from_cache) {
    const std::vector<ChatMessage> messages{{"user", prompt}};
    try {
      raw = complete_with_retries(client, messages, retry);
    } catch (const TransportError&) {
      return fallback_outcome(base, {}, ParseStatus::failed);
    }
    if (cache) cache->put(key, raw);
  }

  std::unordered_set<std::string> ids;
  for (const auto& c : request.candidates) ids.insert(c.doc_id);
  auto parsed = parse_rerank_response(raw, ids);
  if (parsed.status == ParseStatus::failed) {
    auto out = fallback_outcome(base, std::move(parsed.raw_text), ParseStatus::failed);
    out.from_cache = from_cache;
    return out;
  }

  RerankOutcome out;
  out.ranking.query_id = base.query_id;
  out.ranking.stage = Stage::reranked;
  for (std::size_t i = 0; i < parsed.ranked_ids.size(); ++i) {
    out.ranking.entries.push_back(
        RankedDoc{std::move(parsed.ranked_ids[i]), 1.0 / static_cast<double>(i + 1)});
  }
  out.status = parsed.status;
  out.from_cache = from_cache;
  out.raw_text = std::move(parsed.raw_text);
  return out;
}

RerankBatch rerank_batch(ChatClient& client, std::span<const RerankRequest> requests,
                         std::span<const Ranking> bases, const ResponseCache* cache,
                         const RetryPolicy& retry, int max_concurrent) {
  if (requests.size() != bases.size()) {
    throw ValidationError("rerank_batch needs one base ranking per request");
  }
  RerankBatch batch;
  batch.outcomes.resize(requests.size());
  const auto n = static_cast<std::ptrdiff_t>(requests.size());
  ExceptionCollector errors;
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, max_concurrent))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    errors.run([&] {
      const auto u = static_cast<std::size_t>(i);
      batch.outcomes[u] = rerank(client, requests[u], bases[u], cache, retry);
    });
  }
  errors.rethrow_if_any();
  for (const auto& o : batch.outcomes) batch.fallbacks += o.fallback ? 1 : 0;
  return batch;
}

}  // namespace fcr::llm
