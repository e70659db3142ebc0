#pragma once

#include <span>
#include <string>
#include <vector>

#include "fcr/corpus.hpp"
#include "fcr/llm/cache.hpp"
#include "fcr/llm/chat.hpp"

namespace fcr::llm {

struct TranslationResult {
  std::string text;
  bool fallback = false;    // every attempt failed; text is the source text
  bool from_cache = false;
};

/// Translates the post's original text plus OCR text. Responses are trimmed
/// and cached under the raw response. Transport failures after the retry
/// budget degrade to the source text with `fallback` set; only ConfigError
/// escapes.
TranslationResult translate_post(ChatClient& client, const Post& post, const ResponseCache* cache,
                                 const RetryPolicy& retry);

struct TranslationBatch {
  std::vector<TranslationResult> results;  // one per input post
  std::size_t fallbacks = 0;
  std::size_t cache_hits = 0;
};

/// Runs translate_post over every post with at most `max_concurrent` calls in
/// flight. Posts that already carry a translation are passed through unless
/// `overwrite` is set.
TranslationBatch translate_posts(ChatClient& client, std::span<const Post> posts,
                                 const ResponseCache* cache, const RetryPolicy& retry,
                                 int max_concurrent, bool overwrite = false);

/// Copies `posts`, storing successful translations in translated_text. Fallback
/// results leave the field untouched so a later run can retry them.
std::vector<Post> apply_translations(std::span<const Post> posts, const TranslationBatch& batch);

}  // namespace fcr::llm
