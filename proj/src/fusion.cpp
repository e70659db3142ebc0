#include "fcr/fusion.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <string_view>
#include <unordered_map>

#include "fcr/error.hpp"

namespace fcr {

namespace {

void check_config(const RrfConfig& config, std::size_t inputs) {
  if (!(config.k_rrf > 0.0)) throw ValidationError("k_rrf must be positive");
  if (!config.weights.empty()) {
    if (config.weights.size() != inputs) {
      throw ValidationError(fmt::format("{} RRF weights for {} rankings", config.weights.size(), inputs));
    }
    for (double w : config.weights) {
      if (!(w > 0.0)) throw ValidationError("RRF weights must be positive");
    }
  }
}

}  // namespace

Ranking rrf_fuse(std::span<const Ranking> rankings, const RrfConfig& config) {
  if (rankings.empty()) throw ValidationError("rrf_fuse needs at least one ranking");
  check_config(config, rankings.size());

  std::vector<std::string_view> order;
  std::unordered_map<std::string_view, std::vector<double>> contributions;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    if (rankings[i].query_id != rankings.front().query_id) {
      throw ValidationError(fmt::format("cannot fuse rankings of queries \"{}\" and \"{}\"",
                                        rankings.front().query_id, rankings[i].query_id));
    }
    const double w = config.weights.empty() ? 1.0 : config.weights[i];
    const auto& entries = rankings[i].entries;
    for (std::size_t r = 0; r < entries.size(); ++r) {
      auto [it, inserted] = contributions.try_emplace(entries[r].doc_id);
      if (inserted) order.push_back(entries[r].doc_id);
      it->second.push_back(w / (config.k_rrf + static_cast<double>(r + 1)));
    }
  }

  Ranking out{rankings.front().query_id, {}, Stage::fused};
  out.entries.reserve(order.size());
  for (auto id : order) {
    auto& terms = contributions[id];
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    out.entries.push_back(RankedDoc{std::string(id), sum});
  }
  sort_entries(out.entries);
  return out;
}

std::vector<Ranking> rrf_fuse_runs(std::span<const std::vector<Ranking>> runs,
                                   const RrfConfig& config) {
  if (runs.empty()) throw ValidationError("rrf_fuse_runs needs at least one run");
  check_config(config, runs.size());
  // Align by query id; a query missing from some run is fused from the others.
  std::vector<std::string> queries;
  std::unordered_map<std::string, std::vector<const Ranking*>> by_query;
  std::unordered_map<std::string, std::vector<double>> weights;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const auto& r : runs[i]) {
      auto [it, inserted] = by_query.try_emplace(r.query_id);
      if (inserted) queries.push_back(r.query_id);
      it->second.push_back(&r);
      weights[r.query_id].push_back(config.weights.empty() ? 1.0 : config.weights.at(i));
    }
  }
  std::vector<Ranking> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    std::vector<Ranking> inputs;
    for (const auto* r : by_query[q]) inputs.push_back(*r);
    RrfConfig per_query{config.k_rrf, config.weights.empty() ? std::vector<double>{} : weights[q]};
    out.push_back(rrf_fuse(inputs, per_query));
  }
  return out;
}

}  // namespace fcr
