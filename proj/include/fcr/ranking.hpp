#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fcr {

enum class Stage { dense, sparse, reranked, fused };

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view text);

struct RankedDoc {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const RankedDoc&, const RankedDoc&) = default;
};

/// Strict weak order used everywhere a ranking is sorted: score descending,
/// then doc id ascending.
inline bool ranks_before(const RankedDoc& a, const RankedDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

/// Ordered result list for one query. Entries are sorted by `ranks_before`
/// and doc ids are unique.
struct Ranking {
  std::string query_id;
  std::vector<RankedDoc> entries;
  Stage stage = Stage::dense;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  /// Keeps the first `k` entries.
  Ranking truncated(std::size_t k) const;

  friend bool operator==(const Ranking&, const Ranking&) = default;
};

/// Sorts entries by the global tie rule.
void sort_entries(std::vector<RankedDoc>& entries);

/// Throws ValidationError when entries are unsorted or hold duplicate ids.
void check_ranking(const Ranking& ranking);

// TREC-run style TSV: query_id, doc_id, rank, score, stage. One row per entry,
// rank is 1-based. Scores are written in shortest round-trip form.

void write_run(std::ostream& out, const std::vector<Ranking>& rankings);
void write_run_file(const std::string& path, const std::vector<Ranking>& rankings);

/// Rankings in order of first appearance of each query id. Rows of a query are
/// ordered by their rank column.
std::vector<Ranking> read_run(std::istream& in, const std::string& source_name = "<run>");
std::vector<Ranking> read_run_file(const std::string& path);

}  // namespace fcr
