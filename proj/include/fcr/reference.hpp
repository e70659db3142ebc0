#pragma once

// Serial reference kernels. They follow the same arithmetic as the parallel
// paths without any threading and exist so tests and benchmarks can compare
// the two.

#include <span>
#include <string>
#include <vector>

#include "fcr/dense_index.hpp"
#include "fcr/ranking.hpp"
#include "fcr/sparse_index.hpp"

namespace fcr::reference {

/// Scores every row, then sorts all of them.
Ranking search_serial(const EmbeddingStore& store, std::span<const float> query, std::size_t k,
                      const std::string& query_id = {}, RowFilter filter = {});

std::vector<Ranking> batch_search_serial(const EmbeddingStore& store,
                                         std::span<const DenseQuery> queries, std::size_t k,
                                         std::span<const RowFilter> filters = {});

std::vector<Ranking> bm25_batch_search_serial(const InvertedIndex& index,
                                              std::span<const SparseQuery> queries, std::size_t k,
                                              const Bm25Params& params = {});

}  // namespace fcr::reference
