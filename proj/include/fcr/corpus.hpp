#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fcr {

/// Social-media post used as a query.
struct Post {
  std::string id;
  std::string original_text;
  std::optional<std::string> ocr_text;
  std::optional<std::string> translated_text;
  std::string language;  // ISO-639-3, lowercase

  friend bool operator==(const Post&, const Post&) = default;
};

/// Previously fact-checked claim, the retrievable document.
struct FactCheck {
  std::string id;
  std::string claim;
  std::optional<std::string> title;
  std::optional<std::string> translated_claim;
  std::string language;

  friend bool operator==(const FactCheck&, const FactCheck&) = default;
};

struct RelevancePair {
  std::string post_id;
  std::string fact_check_id;

  friend bool operator==(const RelevancePair&, const RelevancePair&) = default;
  friend auto operator<=>(const RelevancePair&, const RelevancePair&) = default;
};

enum class TextMode { original, original_plus_ocr, translated_with_fallback };

std::string_view to_string(TextMode mode);
TextMode parse_text_mode(std::string_view text);

/// Which view of an item is embedded, searched and shown to the reranker.
struct TextSelector {
  TextMode mode = TextMode::translated_with_fallback;
  /// Fact-checks only: prefix the claim with its title, separated by "\n".
  bool include_title = true;
};

/// Never empty. Throws EmptyTextError when every candidate field is empty.
std::string select_text(const Post& post, const TextSelector& selector);
std::string select_text(const FactCheck& fact_check, const TextSelector& selector);

/// Exactly three lowercase ASCII letters.
bool is_valid_language_code(std::string_view code);
/// True for the ten languages of the monolingual evaluation track.
bool is_known_language(std::string_view code);

struct CorpusCounts {
  std::size_t posts = 0;
  std::size_t fact_checks = 0;
  std::size_t pairs = 0;

  friend bool operator==(const CorpusCounts&, const CorpusCounts&) = default;
};

/// Non-fatal findings of a load.
struct ValidationReport {
  CorpusCounts counts;
  /// Language code -> number of items carrying it, for codes outside the
  /// known set.
  std::map<std::string, std::size_t> unknown_languages;
  std::size_t posts_without_pairs = 0;

  std::string to_json() const;
};

/// Immutable set of posts, fact-checks and gold pairs with id lookups.
class Corpus {
 public:
  Corpus() = default;
  /// Validates all invariants; throws DuplicateIdError,
  /// DanglingReferenceError or ValidationError.
  Corpus(std::vector<Post> posts, std::vector<FactCheck> fact_checks,
         std::vector<RelevancePair> pairs);

  const std::vector<Post>& posts() const noexcept { return posts_; }
  const std::vector<FactCheck>& fact_checks() const noexcept { return fact_checks_; }
  const std::vector<RelevancePair>& pairs() const noexcept { return pairs_; }

  CorpusCounts counts() const noexcept { return {posts_.size(), fact_checks_.size(), pairs_.size()}; }

  const Post* find_post(std::string_view id) const;
  const FactCheck* find_fact_check(std::string_view id) const;
  std::size_t post_index(std::string_view id) const;
  std::size_t fact_check_index(std::string_view id) const;

  /// Gold fact-check ids of a post; empty when it has none.
  const std::set<std::string>& gold_for(std::string_view post_id) const;

  ValidationReport validation_report() const;

 private:
  std::vector<Post> posts_;
  std::vector<FactCheck> fact_checks_;
  std::vector<RelevancePair> pairs_;
  std::unordered_map<std::string, std::size_t> post_index_;
  std::unordered_map<std::string, std::size_t> fact_check_index_;
  std::unordered_map<std::string, std::set<std::string>> gold_;
};

struct CorpusPaths {
  std::string posts;
  std::string fact_checks;
  std::string pairs;
};

// JSONL readers. Malformed lines raise ParseError with the 1-based line
// number. Text fields are whitespace-normalized on the way in.

std::vector<Post> read_posts(const std::string& path);
std::vector<FactCheck> read_fact_checks(const std::string& path);
std::vector<RelevancePair> read_pairs(const std::string& path);

Corpus load_corpus(const CorpusPaths& paths);
void write_corpus(const Corpus& corpus, const CorpusPaths& paths);

void write_posts(const std::string& path, const std::vector<Post>& posts);
void write_fact_checks(const std::string& path, const std::vector<FactCheck>& fact_checks);
void write_pairs(const std::string& path, const std::vector<RelevancePair>& pairs);

enum class PoolMode {
  same_language,  // monolingual track: fact-checks in the post's language
  full            // crosslingual track: every fact-check
};

std::string_view to_string(PoolMode mode);
PoolMode parse_pool_mode(std::string_view text);

/// One per-language evaluation slice; members are indices into the corpus.
struct LanguageSlice {
  std::vector<std::size_t> posts;
  std::vector<std::size_t> fact_checks;
  std::vector<std::size_t> pairs;
};

std::map<std::string, LanguageSlice> split_by_language(const Corpus& corpus, PoolMode pool);

}  // namespace fcr
