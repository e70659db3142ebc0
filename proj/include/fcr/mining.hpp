#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcr/corpus.hpp"
#include "fcr/ranking.hpp"

namespace fcr {

struct MiningConfig {
  std::size_t negatives_per_query = 20;
  std::size_t candidate_depth = 100;
  /// Skip candidates scoring at or above (positive score - margin).
  std::optional<double> margin;
  /// Recorded in run manifests; rank-order mining itself draws no random numbers.
  std::uint64_t seed = 0;
  TextSelector query_text{TextMode::translated_with_fallback, false};
  TextSelector doc_text{TextMode::translated_with_fallback, true};

  void validate() const;
};

/// The base retriever as seen by the miner. `score` is only needed when a
/// margin is set; it must agree with the scores `search` reports.
struct MiningRetriever {
  std::function<Ranking(const std::string& post_id, std::size_t depth)> search;
  std::function<double(const std::string& post_id, const std::string& doc_id)> score;
};

struct TrainingTriplet {
  std::string post_id;
  std::string positive_id;
  std::vector<std::string> negative_ids;  // hardest first
  std::string query_text;
  std::string positive_text;
  std::vector<std::string> negative_texts;
};

struct MiningStats {
  std::size_t triplets = 0;
  std::size_t total_negatives = 0;
  /// Triplets that came out with fewer than negatives_per_query negatives.
  std::size_t short_triplets = 0;
  std::size_t empty_triplets = 0;
  /// Non-gold candidates considered and how many the margin removed.
  std::size_t candidates_considered = 0;
  std::size_t margin_excluded = 0;

  double mean_negatives() const;
  double exclusion_rate() const;
};

struct MiningResult {
  std::vector<TrainingTriplet> triplets;  // one per gold pair, corpus order
  MiningStats stats;
};

/// For every gold pair: retrieve candidate_depth docs for the post, drop all of
/// the post's gold docs, apply the margin filter, and keep the first
/// negatives_per_query survivors in retrieval order. Candidates whose text
/// equals the positive's, or repeats an earlier negative's, are skipped too.
/// Parallel across pairs; output order and content do not depend on threads.
MiningResult mine_negatives(const MiningRetriever& retriever, const Corpus& corpus,
                            const MiningConfig& config);

enum class TripletFormat {
  jsonl_triplet,        // {"query","positive","negative"} per negative
  jsonl_pair_with_negs  // {"query","positive","negatives":[...]} per pair
};

TripletFormat parse_triplet_format(std::string_view text);

void export_triplets(std::span<const TrainingTriplet> triplets, const std::string& path,
                     TripletFormat format);
std::string format_triplets(std::span<const TrainingTriplet> triplets, TripletFormat format);

struct SweepRow {
  std::size_t negatives_per_query = 0;
  MiningStats stats;
};

/// Mines once per n in `n_values` (ascending, each >= 1). Every run uses a
/// candidate depth of max(config.candidate_depth, largest n), so a larger n
/// always extends the smaller run's negatives.
std::vector<SweepRow> mining_sweep(const MiningRetriever& retriever, const Corpus& corpus,
                                   const MiningConfig& config, std::span<const std::size_t> n_values);

/// TSV with header: n, triplets, mean_negatives, exclusion_rate.
std::string format_sweep_report(std::span<const SweepRow> rows);

}  // namespace fcr
