#pragma once

// Independent reference computations for the tests. They share no code with
// the library beyond the plain data types.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fcr::testing {

struct ScoredId {
  std::string id;
  double score;
};

/// Cosine similarity of raw (unnormalized) vectors in double precision, all
/// documents scored, sorted by score descending then id ascending, cut at k.
std::vector<ScoredId> naive_cosine_top_k(const std::vector<std::pair<std::string, std::vector<float>>>& docs,
                                         const std::vector<float>& query, std::size_t k);

/// Okapi BM25 over pre-tokenized documents, one query term occurrence counted
/// once. Returns every document with a positive score, best first.
std::vector<ScoredId> scalar_bm25(const std::vector<std::pair<std::string, std::vector<std::string>>>& docs,
                                  const std::vector<std::string>& query, double k1, double b);

/// Reciprocal rank fusion by direct summation over each list.
std::vector<ScoredId> rrf_sum(const std::vector<std::vector<std::string>>& lists, double k,
                              const std::vector<double>& weights);

/// 1 when a gold id appears among the first k ids.
int success_scan(const std::vector<std::string>& ids, const std::set<std::string>& gold, std::size_t k);

/// Whitespace split.
std::vector<std::string> words(const std::string& text);

}  // namespace fcr::testing
