#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fcr/llm/chat.hpp"

namespace fcr::llm {

/// Bumped whenever a template's bytes change, which invalidates cached
/// responses built from the old text.
inline constexpr std::string_view kTranslationTemplateVersion = "translate-v1";
inline constexpr std::string_view kRerankTemplateVersion = "rerank-v1";

inline constexpr std::size_t kMaxRerankCandidates = 50;
inline constexpr std::size_t kRerankKeep = 10;

/// Instruction block for cleaning and translating a post into English.
std::string_view translation_instructions();

struct Prompt {
  std::string system;
  std::string user;

  /// Instruction block, a blank line, then the user content.
  std::string text() const;
  std::vector<ChatMessage> messages() const;
};

/// System block = translation instructions; user content = the post text.
Prompt build_translation_prompt(std::string_view post_text);

struct RerankCandidate {
  std::string doc_id;
  std::string text;
};

struct RerankRequest {
  std::string query_text;
  std::optional<std::string> augmentation_text;
  std::vector<RerankCandidate> candidates;  // retrieval order, at most 50

  /// Throws ValidationError for an empty or oversized list or repeated ids.
  void validate() const;
};

/// Rerank template with the query, augmentation and candidate slots filled.
/// Candidates render as "ID: <doc_id>\nTEXT: <text>" in request order.
std::string build_rerank_prompt(const RerankRequest& request);

}  // namespace fcr::llm
