#include "fcr/llm/prompts.hpp"

#include <fmt/format.h>

#include <unordered_set>

#include "fcr/error.hpp"

namespace fcr::llm {

namespace {

constexpr std::string_view kTranslationInstructions =
    "You are given text (possibly noisy social media data) that may be partially or entirely in "
    "a non-English language. \n"
    "It could contain repeated emojis, excessive punctuation, or minor errors.\n"
    "Your task is to produce a “cleaned but faithful” English version. Specifically:\n"
    "1) If the text is not in English, translate it to English as literally as possible.\n"
    "2) Preserve important meaning, tone, and references (e.g., named entities, hashtags, or "
    "domain-specific terms).\n"
    "3) Remove or reduce meaningless filler (like repeated punctuation or stray symbols) without "
    "losing factual content.\n"
    "4) Avoid adding your own commentary, opinions, or extra interpretation. Keep the style and "
    "intent aligned with the original.";

constexpr std::string_view kRerankHeader =
    "## You are an expert fact-checker and information retrieval specialist. Your task is to "
    "analyze a query and a set of articles to identify the most relevant ones for fact-checking "
    "purposes.\n"
    "\n"
    "## Task:\n"
    "1. Review the query that needs fact-checking\n"
    "2. Analyze the candidate articles provided\n"
    "3. Select the 10 most relevant articles that would be most useful for fact-checking the "
    "query\n"
    "4. Return ONLY the article IDs of these 10 articles in a tab-separated format\n"
    "\n"
    "## Important Instructions:\n"
    "- Focus on selecting articles that:\n"
    "  * Directly address the claim in the query\n"
    "  * Provide factual evidence or counter-evidence\n"
    "  * Come from reliable sources\n"
    "  * Contain specific details relevant to the query\n"
    "  * Cover different aspects of the claim for comprehensive fact-checking\n"
    "- Output format must be EXACTLY:\n"
    "  * Only article IDs\n"
    "  * Tab-separated\n"
    "  * One line only\n"
    "  * Top 10 articles in order of relevance\n"
    "  * No explanations or additional text\n"
    "\n";

constexpr std::string_view kRerankQueryLabel = "## Query for fact-checking: ";
constexpr std::string_view kRerankAugmentationLabel = "## Data Augmentations:  ";
constexpr std::string_view kRerankCandidatesLabel = "## Candidate Articles:\n";
constexpr std::string_view kRerankFooter = "ONLY RETURN tab-seperated IDs....NOTHING ELSE";

}  // namespace

std::string_view translation_instructions() { return kTranslationInstructions; }

std::string Prompt::text() const {
  if (system.empty()) return user;
  return system + "\n\n" + user;
}

std::vector<ChatMessage> Prompt::messages() const {
  std::vector<ChatMessage> out;
  if (!system.empty()) out.push_back({"system", system});
  out.push_back({"user", user});
  return out;
}

Prompt build_translation_prompt(std::string_view post_text) {
  return Prompt{std::string(kTranslationInstructions), std::string(post_text)};
}

void RerankRequest::validate() const {
  if (candidates.empty()) throw ValidationError("rerank request has no candidates");
  if (candidates.size() > kMaxRerankCandidates) {
    throw ValidationError(fmt::format("rerank request has {} candidates, limit is {}",
                                      candidates.size(), kMaxRerankCandidates));
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& c : candidates) {
    if (!seen.insert(c.doc_id).second) throw DuplicateIdError("rerank candidate", c.doc_id);
  }
}

std::string build_rerank_prompt(const RerankRequest& request) {
  request.validate();
  std::string out(kRerankHeader);
  out += kRerankQueryLabel;
  out += request.query_text;
  out += '\n';
  out += kRerankAugmentationLabel;
  out += request.augmentation_text.value_or("");
  out += '\n';
  out += kRerankCandidatesLabel;
  for (const auto& c : request.candidates) {
    out += "ID: ";
    out += c.doc_id;
    out += "\nTEXT: ";
    out += c.text;
    out += '\n';
  }
  out += kRerankFooter;
  return out;
}

}  // namespace fcr::llm
