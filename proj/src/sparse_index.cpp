#include "fcr/sparse_index.hpp"

#include <fmt/format.h>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "fcr/error.hpp"

namespace fcr {

namespace {

bool is_term_char(UChar32 c) {
  if (u_isalnum(c)) return true;
  switch (u_charType(c)) {
    case U_NON_SPACING_MARK:
    case U_COMBINING_SPACING_MARK:
    case U_ENCLOSING_MARK:
      return true;
    default:
      return u_hasBinaryProperty(c, UCHAR_ALPHABETIC);
  }
}

void append_lower(std::string& out, UChar32 c) {
  const UChar32 lower = u_tolower(c);
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, lower);
  out.append(buf, static_cast<std::size_t>(len));
}

std::vector<std::string> distinct_terms(std::string_view query) {
  std::vector<std::string> terms;
  std::unordered_set<std::string> seen;
  for (auto& t : tokenize(query)) {
    if (seen.insert(t).second) terms.push_back(std::move(t));
  }
  return terms;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> terms;
  std::string current;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c >= 0 && is_term_char(c)) {
      append_lower(current, c);
    } else if (!current.empty()) {
      terms.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) terms.push_back(std::move(current));
  return terms;
}

InvertedIndex InvertedIndex::build(std::span<const std::pair<std::string, std::string>> docs) {
  if (docs.empty()) throw ValidationError("cannot build an index over zero documents");
  InvertedIndex index;
  index.doc_ids_.reserve(docs.size());
  index.doc_lengths_.reserve(docs.size());
  std::unordered_set<std::string_view> seen;
  std::uint64_t total_length = 0;

  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto& [id, text] = docs[d];
    if (!seen.insert(id).second) throw DuplicateIdError("document", id);
    const auto terms = tokenize(text);
    std::unordered_map<std::string, std::uint32_t> tf;
    std::vector<const std::string*> order;
    for (const auto& t : terms) {
      auto [it, inserted] = tf.try_emplace(t, 0);
      if (inserted) order.push_back(&it->first);
      ++it->second;
    }
    for (const auto* t : order) {
      index.postings_[*t].push_back(Posting{static_cast<std::uint32_t>(d), tf[*t]});
    }
    index.doc_ids_.push_back(id);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    total_length += terms.size();
  }
  index.avg_doc_length_ = static_cast<double>(total_length) / static_cast<double>(docs.size());
  return index;
}

std::span<const Posting> InvertedIndex::postings(const std::string& term) const {
  auto it = postings_.find(term);
  if (it == postings_.end()) return {};
  return it->second;
}

double InvertedIndex::idf(std::size_t document_frequency) const {
  const auto n = static_cast<double>(doc_count());
  const auto df = static_cast<double>(document_frequency);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

Ranking bm25_search(const InvertedIndex& index, std::string_view query, std::size_t k,
                    const Bm25Params& params, const std::string& query_id, RowFilter filter) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (!filter.empty() && filter.size() != index.doc_count()) {
    throw ValidationError(fmt::format("document filter has {} flags for {} documents",
                                      filter.size(), index.doc_count()));
  }
  std::vector<double> scores(index.doc_count(), 0.0);
  std::vector<std::uint32_t> touched;
  const double avg = index.avg_doc_length();

  for (const auto& term : distinct_terms(query)) {
    const auto postings = index.postings(term);
    if (postings.empty()) continue;
    const double idf = index.idf(postings.size());
    for (const auto& p : postings) {
      if (!filter.empty() && !filter[p.doc]) continue;
      const double tf = p.term_frequency;
      const double norm =
          params.k1 * (1.0 - params.b + params.b * index.doc_length(p.doc) / avg);
      if (scores[p.doc] == 0.0) touched.push_back(p.doc);
      scores[p.doc] += idf * tf * (params.k1 + 1.0) / (tf + norm);
    }
  }

  Ranking out{query_id, {}, Stage::sparse};
  out.entries.reserve(touched.size());
  for (auto d : touched) {
    if (scores[d] > 0.0) out.entries.push_back(RankedDoc{index.doc_ids()[d], scores[d]});
  }
  const auto keep = std::min(k, out.entries.size());
  std::partial_sort(out.entries.begin(), out.entries.begin() + static_cast<std::ptrdiff_t>(keep),
                    out.entries.end(), ranks_before);
  out.entries.resize(keep);
  return out;
}

std::vector<Ranking> bm25_batch_search(const InvertedIndex& index,
                                       std::span<const SparseQuery> queries, std::size_t k,
                                       const Bm25Params& params,
                                       std::span<const RowFilter> filters) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (!filters.empty() && filters.size() != queries.size()) {
    throw ValidationError("one document filter per query is required");
  }
  for (const auto& f : filters) {
    if (!f.empty() && f.size() != index.doc_count()) {
      throw ValidationError("document filter size does not match the index");
    }
  }
  std::vector<Ranking> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] = bm25_search(index, queries[u].text, k, params, queries[u].id,
                         filters.empty() ? RowFilter{} : filters[u]);
  }
  return out;
}

}  // namespace fcr
