#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcr/ranking.hpp"

namespace fcr {

struct EmbeddingRecord {
  std::string id;
  std::vector<float> vector;
};

/// Immutable matrix of unit-norm embeddings, rows ordered by ascending id so
/// that the row index doubles as the tie-break key.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  /// Validates (uniform dimension, finite, non-zero, unique ids), normalizes
  /// and sorts the records.
  static EmbeddingStore from_records(std::vector<EmbeddingRecord> records);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dimension_, dimension_};
  }
  std::optional<std::size_t> find(const std::string& id) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
};

/// Raw records as stored in an embeddings JSONL file ({"id", "vec"}).
std::vector<EmbeddingRecord> read_embedding_records(const std::string& path);
void write_embedding_records(const std::string& path, const std::vector<EmbeddingRecord>& records);

EmbeddingStore load_embeddings(const std::string& path);

/// Unit-length copy of `v`. Throws ZeroNormError for zero or non-finite input.
std::vector<float> normalized(std::span<const float> v, const std::string& id = "query");

/// Dot product with single-precision accumulation in index order. Every
/// dense score in the library goes through this function.
float dot(std::span<const float> a, std::span<const float> b);

struct DenseQuery {
  std::string id;
  std::vector<float> vector;
};

/// Restricts a search to rows whose flag is non-zero. Empty means all rows.
using RowFilter = std::span<const std::uint8_t>;

/// Exact top-k cosine search. Returns min(k, eligible rows) entries sorted by
/// score descending, then doc id ascending. Large stores are scanned in
/// parallel chunks; the result does not depend on the thread count.
Ranking search(const EmbeddingStore& store, std::span<const float> query, std::size_t k,
               const std::string& query_id = {}, RowFilter filter = {});

/// One search per query, parallel across queries. Result i belongs to
/// queries[i]. `filters`, when non-empty, holds one filter per query.
std::vector<Ranking> batch_search(const EmbeddingStore& store, std::span<const DenseQuery> queries,
                                  std::size_t k, std::span<const RowFilter> filters = {});

/// Stores below this size are scanned by a single thread per query.
inline constexpr std::size_t kParallelScanThreshold = 1u << 14;

}  // namespace fcr
