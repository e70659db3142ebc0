#include "fcr/reference.hpp"

#include <algorithm>

#include "fcr/error.hpp"

namespace fcr::reference {

Ranking search_serial(const EmbeddingStore& store, std::span<const float> query, std::size_t k,
                      const std::string& query_id, RowFilter filter) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (query.size() != store.dimension()) throw DimensionMismatchError(store.dimension(), query.size());
  const auto q = normalized(query, query_id.empty() ? "query" : query_id);
  Ranking out{query_id, {}, Stage::dense};
  for (std::size_t row = 0; row < store.size(); ++row) {
    if (!filter.empty() && !filter[row]) continue;
    out.entries.push_back(RankedDoc{store.id(row), static_cast<double>(dot(store.row(row), q))});
  }
  sort_entries(out.entries);
  if (out.entries.size() > k) out.entries.resize(k);
  return out;
}

std::vector<Ranking> batch_search_serial(const EmbeddingStore& store,
                                         std::span<const DenseQuery> queries, std::size_t k,
                                         std::span<const RowFilter> filters) {
  std::vector<Ranking> out;
  out.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out.push_back(search_serial(store, queries[i].vector, k, queries[i].id,
                                filters.empty() ? RowFilter{} : filters[i]));
  }
  return out;
}

std::vector<Ranking> bm25_batch_search_serial(const InvertedIndex& index,
                                              std::span<const SparseQuery> queries, std::size_t k,
                                              const Bm25Params& params) {
  std::vector<Ranking> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(bm25_search(index, q.text, k, params, q.id));
  return out;
}

}  // namespace fcr::reference
