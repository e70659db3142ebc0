#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fcr/corpus.hpp"

namespace fcr::multiclaim {

// Best-effort converter for the MultiClaim CSV release:
//   posts.csv:        post_id, instances, ocr, verdicts, text
//   fact_checks.csv:  fact_check_id, claim, instances, title
//   pairs csv:        fact_check_id, post_id
// Text cells hold Python tuple literals ('original', 'english', [('lang', p)]).

/// RFC 4180 CSV: quoted fields may contain separators, quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// (original, translation, language) extracted from one tuple literal.
/// The language is the highest-probability entry; empty when absent.
struct TextTuple {
  std::string original;
  std::string translation;
  std::string language;
};

/// Parses "('a', 'b', [('eng', 1.0)])"; an empty cell yields an empty tuple.
/// Throws ValidationError on malformed literals.
TextTuple parse_text_tuple(std::string_view literal);
/// Parses a list of text tuples, as used by the ocr column.
std::vector<TextTuple> parse_text_tuple_list(std::string_view literal);

struct ConversionStats {
  std::size_t posts = 0;
  std::size_t fact_checks = 0;
  std::size_t pairs = 0;
  std::size_t skipped_rows = 0;
};

struct Converted {
  std::vector<Post> posts;
  std::vector<FactCheck> fact_checks;
  std::vector<RelevancePair> pairs;
  ConversionStats stats;
};

/// Rows that cannot be converted are skipped and counted. Pairs whose ids do
/// not resolve are dropped the same way.
Converted convert(const std::string& posts_csv, const std::string& fact_checks_csv,
                  const std::string& pairs_csv);

}  // namespace fcr::multiclaim
