#include "fcr/dense_index.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <unordered_set>

#include "fcr/error.hpp"
#include "fcr/text_util.hpp"

namespace fcr {

namespace {

struct Candidate {
  double score;
  std::size_t row;
};

// Rows are id-sorted, so comparing row indices applies the doc-id tie rule.
bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.row < b.row;
}

// Bounded selection of the best `k` candidates. The heap top is the worst kept.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k); }

  void push(const Candidate& c) {
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(), better);
    } else if (better(c, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), better);
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end(), better);
    }
  }

  std::vector<Candidate>& items() { return heap_; }

 private:
  std::size_t k_;
  std::vector<Candidate> heap_;
};

void scan_rows(const EmbeddingStore& store, std::span<const float> q, RowFilter filter,
               std::size_t begin, std::size_t end, TopK& top) {
  for (std::size_t row = begin; row < end; ++row) {
    if (!filter.empty() && !filter[row]) continue;
    top.push(Candidate{static_cast<double>(dot(store.row(row), q)), row});
  }
}

Ranking to_ranking(const EmbeddingStore& store, std::vector<Candidate> cands, std::size_t k,
                   const std::string& query_id) {
  std::sort(cands.begin(), cands.end(), better);
  if (cands.size() > k) cands.resize(k);
  Ranking out{query_id, {}, Stage::dense};
  out.entries.reserve(cands.size());
  for (const auto& c : cands) out.entries.push_back(RankedDoc{store.id(c.row), c.score});
  return out;
}

void check_query(const EmbeddingStore& store, std::span<const float> query, std::size_t k,
                 RowFilter filter) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (query.size() != store.dimension()) {
    throw DimensionMismatchError(store.dimension(), query.size());
  }
  if (!filter.empty() && filter.size() != store.size()) {
    throw ValidationError(
        fmt::format("row filter has {} flags for {} rows", filter.size(), store.size()));
  }
}

Ranking search_serial_scan(const EmbeddingStore& store, std::span<const float> query,
                           std::size_t k, const std::string& query_id, RowFilter filter) {
  const auto q = normalized(query, query_id.empty() ? "query" : query_id);
  TopK top(k);
  scan_rows(store, q, filter, 0, store.size(), top);
  return to_ranking(store, std::move(top.items()), k, query_id);
}

}  // namespace

float dot(std::span<const float> a, std::span<const float> b) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::vector<float> normalized(std::span<const float> v, const std::string& id) {
  double sq = 0.0;
  for (float x : v) {
    if (!std::isfinite(x)) throw ValidationError(fmt::format("vector \"{}\" has a non-finite component", id));
    sq += static_cast<double>(x) * x;
  }
  if (sq == 0.0) throw ZeroNormError(id);
  const double norm = std::sqrt(sq);
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

EmbeddingStore EmbeddingStore::from_records(std::vector<EmbeddingRecord> records) {
  EmbeddingStore store;
  if (records.empty()) return store;
  store.dimension_ = records.front().vector.size();
  if (store.dimension_ == 0) throw ValidationError("embedding dimension must be at least 1");

  std::unordered_set<std::string_view> seen;
  for (const auto& r : records) {
    if (r.vector.size() != store.dimension_) {
      throw DimensionMismatchError(store.dimension_, r.vector.size());
    }
    if (!seen.insert(r.id).second) throw DuplicateIdError("embedding", r.id);
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });

  store.ids_.reserve(records.size());
  store.data_.reserve(records.size() * store.dimension_);
  for (auto i : order) {
    const auto unit = normalized(records[i].vector, records[i].id);
    store.data_.insert(store.data_.end(), unit.begin(), unit.end());
    store.ids_.push_back(std::move(records[i].id));
  }
  return store;
}

std::optional<std::size_t> EmbeddingStore::find(const std::string& id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::vector<EmbeddingRecord> read_embedding_records(const std::string& path) {
  using nlohmann::json;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path));
  std::vector<EmbeddingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dimension = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    EmbeddingRecord rec;
    try {
      const auto j = json::parse(line);
      rec.id = j.at("id").get<std::string>();
      const auto& vec = j.at("vec");
      if (!vec.is_array()) throw ParseError(path, line_no, "\"vec\" must be an array");
      rec.vector.reserve(vec.size());
      for (const auto& x : vec) rec.vector.push_back(x.get<float>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
    if (records.empty()) {
      dimension = rec.vector.size();
    } else if (rec.vector.size() != dimension) {
      throw DimensionMismatchError(dimension, rec.vector.size());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_embedding_records(const std::string& path, const std::vector<EmbeddingRecord>& records) {
  std::string buf;
  for (const auto& r : records) {
    buf += nlohmann::json{{"id", r.id}, {"vec", r.vector}}.dump();
    buf += '\n';
  }
  write_file_atomic(path, buf);
}

EmbeddingStore load_embeddings(const std::string& path) {
  return EmbeddingStore::from_records(read_embedding_records(path));
}

Ranking search(const EmbeddingStore& store, std::span<const float> query, std::size_t k,
               const std::string& query_id, RowFilter filter) {
  check_query(store, query, k, filter);
  const std::size_t n = store.size();
  if (n < kParallelScanThreshold || omp_in_parallel()) {
    return search_serial_scan(store, query, k, query_id, filter);
  }

  const auto q = normalized(query, query_id.empty() ? "query" : query_id);
  const int threads = omp_get_max_threads();
  std::vector<std::vector<Candidate>> partial(static_cast<std::size_t>(threads));

#pragma omp parallel num_threads(threads)
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t begin = n * t / nt;
    const std::size_t end = n * (t + 1) / nt;
    TopK top(k);
    scan_rows(store, q, filter, begin, end, top);
    partial[t] = std::move(top.items());
  }

  std::vector<Candidate> merged;
  for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  return to_ranking(store, std::move(merged), k, query_id);
}

std::vector<Ranking> batch_search(const EmbeddingStore& store, std::span<const DenseQuery> queries,
                                  std::size_t k, std::span<const RowFilter> filters) {
  if (!filters.empty() && filters.size() != queries.size()) {
    throw ValidationError("one row filter per query is required");
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    check_query(store, queries[i].vector, k, filters.empty() ? RowFilter{} : filters[i]);
    normalized(queries[i].vector, queries[i].id);
  }
  std::vector<Ranking> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& q = queries[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = search_serial_scan(
        store, q.vector, k, q.id, filters.empty() ? RowFilter{} : filters[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace fcr
