#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fcr/dense_index.hpp"
#include "fcr/ranking.hpp"

namespace fcr {

/// Lowercased maximal runs of letters, digits and combining marks. Anything
/// else (punctuation, symbols, whitespace) separates terms. No stemming and
/// no stopwords.
std::vector<std::string> tokenize(std::string_view text);

struct Posting {
  std::uint32_t doc;  // index into InvertedIndex::doc_ids()
  std::uint32_t term_frequency;
};

/// Okapi BM25 parameters.
struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

class InvertedIndex {
 public:
  /// Throws ValidationError on an empty list and DuplicateIdError on repeated
  /// ids. Documents keep their input order.
  static InvertedIndex build(std::span<const std::pair<std::string, std::string>> docs);

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  double avg_doc_length() const noexcept { return avg_doc_length_; }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  std::uint32_t doc_length(std::size_t doc) const { return doc_lengths_[doc]; }
  std::size_t term_count() const noexcept { return postings_.size(); }

  /// Empty span for unknown terms.
  std::span<const Posting> postings(const std::string& term) const;
  const std::unordered_map<std::string, std::vector<Posting>>& all_postings() const noexcept {
    return postings_;
  }

  /// ln(1 + (N - df + 0.5) / (df + 0.5)); always positive.
  double idf(std::size_t document_frequency) const;

 private:
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

struct SparseQuery {
  std::string id;
  std::string text;
};

/// Each distinct query term contributes once. Documents scoring zero are
/// omitted, so a query without corpus terms gives an empty ranking. `filter`
/// is indexed like doc_ids().
Ranking bm25_search(const InvertedIndex& index, std::string_view query, std::size_t k,
                    const Bm25Params& params = {}, const std::string& query_id = {},
                    RowFilter filter = {});

/// Parallel across queries; result i belongs to queries[i].
std::vector<Ranking> bm25_batch_search(const InvertedIndex& index,
                                       std::span<const SparseQuery> queries, std::size_t k,
                                       const Bm25Params& params = {},
                                       std::span<const RowFilter> filters = {});

}  // namespace fcr
