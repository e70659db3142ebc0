#include "fcr/llm/translate.hpp"

#include <algorithm>

#include "fcr/error.hpp"
#include "fcr/llm/prompts.hpp"
#include "fcr/parallel.hpp"
#include "fcr/text_util.hpp"

namespace fcr::llm {

TranslationResult translate_post(ChatClient& client, const Post& post, const ResponseCache* cache,
                                 const RetryPolicy& retry) {
  const auto source = select_text(post, TextSelector{TextMode::original_plus_ocr, false});
  const auto prompt = build_translation_prompt(source);
  const auto key = cache_key(kTranslationTemplateVersion, client.model_name(), source);

  if (cache) {
    if (auto hit = cache->get(key)) {
      return TranslationResult{std::string(trim(*hit)), false, true};
    }
  }
  std::string raw;
  try {
    raw = complete_with_retries(client, prompt.messages(), retry);
  } catch (const TransportError&) {
    return TranslationResult{source, true, false};
  }
  auto text = std::string(trim(raw));
  if (text.empty()) return TranslationResult{source, true, false};
  if (cache) cache->put(key, raw);
  return TranslationResult{std::move(text), false, false};
}

TranslationBatch translate_posts(ChatClient& client, std::span<const Post> posts,
                                 const ResponseCache* cache, const RetryPolicy& retry,
                                 int max_concurrent, bool overwrite) {
  TranslationBatch batch;
  batch.results.resize(posts.size());
  const auto n = static_cast<std::ptrdiff_t>(posts.size());
  ExceptionCollector errors;
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, max_concurrent))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    errors.run([&] {
      const auto& post = posts[static_cast<std::size_t>(i)];
      auto& result = batch.results[static_cast<std::size_t>(i)];
      if (!overwrite && post.translated_text && !post.translated_text->empty()) {
        result = TranslationResult{*post.translated_text, false, false};
        return;
      }
      result = translate_post(client, post, cache, retry);
    });
  }
  errors.rethrow_if_any();
  for (const auto& r : batch.results) {
    batch.fallbacks += r.fallback ? 1 : 0;
    batch.cache_hits += r.from_cache ? 1 : 0;
  }
  return batch;
}

std::vector<Post> apply_translations(std::span<const Post> posts, const TranslationBatch& batch) {
  std::vector<Post> out(posts.begin(), posts.end());
  for (std::size_t i = 0; i < out.size() && i < batch.results.size(); ++i) {
    if (!batch.results[i].fallback) out[i].translated_text = batch.results[i].text;
  }
  return out;
}

}  // namespace fcr::llm
