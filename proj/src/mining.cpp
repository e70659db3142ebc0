#include "fcr/mining.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <json.hpp>
#include <unordered_set>

#include "fcr/error.hpp"
#include "fcr/parallel.hpp"
#include "fcr/text_util.hpp"

namespace fcr {

void MiningConfig::validate() const {
  if (negatives_per_query < 1) throw ConfigError("negatives_per_query must be at least 1");
  if (negatives_per_query > candidate_depth) {
    throw ConfigError(fmt::format("negatives_per_query ({}) exceeds candidate_depth ({})",
                                  negatives_per_query, candidate_depth));
  }
  if (margin && !(*margin >= 0.0)) throw ConfigError("margin must be non-negative");
}

double MiningStats::mean_negatives() const {
  return triplets == 0 ? 0.0 : static_cast<double>(total_negatives) / static_cast<double>(triplets);
}

double MiningStats::exclusion_rate() const {
  return candidates_considered == 0
             ? 0.0
             : static_cast<double>(margin_excluded) / static_cast<double>(candidates_considered);
}

namespace {

struct PairOutcome {
  TrainingTriplet triplet;
  std::size_t considered = 0;
  std::size_t excluded = 0;
};

PairOutcome mine_pair(const MiningRetriever& retriever, const Corpus& corpus,
                      const MiningConfig& config, const RelevancePair& pair) {
  PairOutcome out;
  const auto& post = *corpus.find_post(pair.post_id);
  const auto& positive = *corpus.find_fact_check(pair.fact_check_id);
  const auto& gold = corpus.gold_for(pair.post_id);

  auto& t = out.triplet;
  t.post_id = post.id;
  t.positive_id = positive.id;
  t.query_text = select_text(post, config.query_text);
  t.positive_text = select_text(positive, config.doc_text);

  const auto candidates = retriever.search(post.id, config.candidate_depth);

  std::optional<double> threshold;
  if (config.margin) {
    double positive_score = 0.0;
    auto it = std::find_if(candidates.entries.begin(), candidates.entries.end(),
                           [&](const RankedDoc& d) { return d.doc_id == positive.id; });
    if (it != candidates.entries.end()) {
      positive_score = it->score;
    } else if (retriever.score) {
      positive_score = retriever.score(post.id, positive.id);
    } else {
      throw ConfigError("margin filtering needs a retriever score function");
    }
    threshold = positive_score - *config.margin;
  }

  std::unordered_set<std::string> seen_texts{t.positive_text};
  for (const auto& cand : candidates.entries) {
    if (t.negative_ids.size() == config.negatives_per_query) break;
    if (gold.count(cand.doc_id)) continue;
    ++out.considered;
    if (threshold && cand.score >= *threshold) {
      ++out.excluded;
      continue;
    }
    const auto* doc = corpus.find_fact_check(cand.doc_id);
    if (!doc) throw DanglingReferenceError("fact-check", cand.doc_id);
    auto text = select_text(*doc, config.doc_text);
    if (!seen_texts.insert(text).second) continue;
    t.negative_ids.push_back(cand.doc_id);
    t.negative_texts.push_back(std::move(text));
  }
  return out;
}

}  // namespace

MiningResult mine_negatives(const MiningRetriever& retriever, const Corpus& corpus,
                            const MiningConfig& config) {
  config.validate();
  if (!retriever.search) throw ConfigError("mining retriever has no search function");
  const auto& pairs = corpus.pairs();
  std::vector<PairOutcome> outcomes(pairs.size());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
  ExceptionCollector errors;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    errors.run([&] {
      const auto u = static_cast<std::size_t>(i);
      outcomes[u] = mine_pair(retriever, corpus, config, pairs[u]);
    });
  }
  errors.rethrow_if_any();

  MiningResult result;
  result.triplets.reserve(outcomes.size());
  for (auto& o : outcomes) {
    auto& s = result.stats;
    ++s.triplets;
    s.total_negatives += o.triplet.negative_ids.size();
    if (o.triplet.negative_ids.size() < config.negatives_per_query) ++s.short_triplets;
    if (o.triplet.negative_ids.empty()) ++s.empty_triplets;
    s.candidates_considered += o.considered;
    s.margin_excluded += o.excluded;
    result.triplets.push_back(std::move(o.triplet));
  }
  return result;
}

TripletFormat parse_triplet_format(std::string_view text) {
  if (text == "jsonl_triplet") return TripletFormat::jsonl_triplet;
  if (text == "jsonl_pair_with_negs") return TripletFormat::jsonl_pair_with_negs;
  throw ConfigError(fmt::format("unknown triplet format \"{}\"", text));
}

std::string format_triplets(std::span<const TrainingTriplet> triplets, TripletFormat format) {
  using nlohmann::json;
  std::string out;
  for (const auto& t : triplets) {
    if (format == TripletFormat::jsonl_triplet) {
      for (const auto& neg : t.negative_texts) {
        out += json{{"query", t.query_text}, {"positive", t.positive_text}, {"negative", neg}}.dump();
        out += '\n';
      }
    } else {
      out += json{{"query", t.query_text}, {"positive", t.positive_text}, {"negatives", t.negative_texts}}
                 .dump();
      out += '\n';
    }
  }
  return out;
}

void export_triplets(std::span<const TrainingTriplet> triplets, const std::string& path,
                     TripletFormat format) {
  write_file_atomic(path, format_triplets(triplets, format));
}

std::vector<SweepRow> mining_sweep(const MiningRetriever& retriever, const Corpus& corpus,
                                   const MiningConfig& config, std::span<const std::size_t> n_values) {
  if (!std::is_sorted(n_values.begin(), n_values.end())) {
    throw ConfigError("sweep values must be sorted ascending");
  }
  std::vector<SweepRow> rows;
  if (n_values.empty()) return rows;
  MiningConfig run = config;
  run.candidate_depth = std::max(config.candidate_depth, n_values.back());
  for (auto n : n_values) {
    run.negatives_per_query = n;
    rows.push_back(SweepRow{n, mine_negatives(retriever, corpus, run).stats});
  }
  return rows;
}

std::string format_sweep_report(std::span<const SweepRow> rows) {
  std::string out = "n\ttriplets\tmean_negatives\texclusion_rate\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{:.4f}\t{:.4f}\n", r.negatives_per_query, r.stats.triplets,
                       r.stats.mean_negatives(), r.stats.exclusion_rate());
  }
  return out;
}

}  // namespace fcr
