#include "fcr/ranking.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "fcr/error.hpp"
#include "fcr/text_util.hpp"

namespace fcr {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::dense: return "dense";
    case Stage::sparse: return "sparse";
    case Stage::reranked: return "reranked";
    case Stage::fused: return "fused";
  }
  return "dense";
}

Stage parse_stage(std::string_view text) {
  if (text == "dense") return Stage::dense;
  if (text == "sparse") return Stage::sparse;
  if (text == "reranked") return Stage::reranked;
  if (text == "fused") return Stage::fused;
  throw ValidationError(fmt::format("unknown ranking stage \"{}\"", text));
}

Ranking Ranking::truncated(std::size_t k) const {
  Ranking out{query_id, {}, stage};
  const auto n = std::min(k, entries.size());
  out.entries.assign(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

void sort_entries(std::vector<RankedDoc>& entries) {
  std::sort(entries.begin(), entries.end(), ranks_before);
}

void check_ranking(const Ranking& ranking) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& e = ranking.entries[i];
    if (!seen.insert(e.doc_id).second) {
      throw ValidationError(
          fmt::format("ranking for \"{}\" repeats doc \"{}\"", ranking.query_id, e.doc_id));
    }
    if (i > 0 && ranks_before(e, ranking.entries[i - 1])) {
      throw ValidationError(
          fmt::format("ranking for \"{}\" is not sorted at position {}", ranking.query_id, i + 1));
    }
  }
}

void write_run(std::ostream& out, const std::vector<Ranking>& rankings) {
  fmt::memory_buffer buf;
  for (const auto& r : rankings) {
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      fmt::format_to(std::back_inserter(buf), "{}\t{}\t{}\t{}\t{}\n", r.query_id,
                     r.entries[i].doc_id, i + 1, r.entries[i].score, to_string(r.stage));
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_run_file(const std::string& path, const std::vector<Ranking>& rankings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path));
  write_run(out, rankings);
  if (!out) throw IoError(fmt::format("failed writing {}", path));
}

namespace {

template <typename T>
T parse_number(std::string_view field, const std::string& source, std::size_t line) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(source, line, fmt::format("bad numeric field \"{}\"", field));
  }
  return value;
}

}  // namespace

std::vector<Ranking> read_run(std::istream& in, const std::string& source_name) {
  struct Row {
    std::size_t rank;
    RankedDoc doc;
  };
  std::vector<Ranking> rankings;
  std::vector<std::vector<Row>> rows;
  std::unordered_map<std::string, std::size_t> slot;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 5) {
      throw ParseError(source_name, line_no,
                       fmt::format("expected 5 tab-separated fields, got {}", fields.size()));
    }
    const std::string qid(fields[0]);
    auto [it, inserted] = slot.try_emplace(qid, rankings.size());
    Stage stage;
    try {
      stage = parse_stage(fields[4]);
    } catch (const ValidationError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (inserted) {
      rankings.push_back(Ranking{qid, {}, stage});
      rows.emplace_back();
    }
    rows[it->second].push_back(Row{parse_number<std::size_t>(fields[2], source_name, line_no),
                                   RankedDoc{std::string(fields[1]),
                                             parse_number<double>(fields[3], source_name, line_no)}});
  }
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    auto& r = rows[i];
    std::stable_sort(r.begin(), r.end(), [](const Row& a, const Row& b) { return a.rank < b.rank; });
    rankings[i].entries.reserve(r.size());
    for (auto& row : r) rankings[i].entries.push_back(std::move(row.doc));
  }
  return rankings;
}

std::vector<Ranking> read_run_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open run file {}", path));
  return read_run(in, path);
}

}  // namespace fcr
