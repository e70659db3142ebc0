#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fcr/corpus.hpp"
#include "fcr/ranking.hpp"

namespace fcr {

/// 1 when any of the first min(k, size) entries is gold, else 0. Throws
/// ValidationError for k = 0 or an empty gold set.
int success_at_k(const Ranking& ranking, const std::set<std::string>& gold_ids, std::size_t k);

/// Gold judgments and query languages, decoupled from the full corpus so run
/// files can be scored from a pairs file alone.
struct GoldStandard {
  std::map<std::string, std::set<std::string>> gold;  // post id -> fact-check ids
  std::map<std::string, std::string> language;        // post id -> language

  static GoldStandard from_corpus(const Corpus& corpus);
  /// Posts missing from `posts` are assigned `default_language`.
  static GoldStandard from_pairs(std::span<const RelevancePair> pairs, std::span<const Post> posts,
                                 const std::string& default_language = "und");
};

struct EvalReport {
  std::string config_label;
  std::size_t k = 10;
  std::map<std::string, double> per_language;
  std::map<std::string, std::size_t> n_queries;
  double macro_avg = 0.0;
  /// Judged queries without a ranking; each counted as a miss.
  std::size_t missing_rankings = 0;
  /// Rankings whose query has no gold pair; ignored.
  std::size_t unjudged_rankings = 0;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
};

/// success@k averaged per language over every judged query, then averaged
/// across languages without weighting.
EvalReport evaluate(std::span<const Ranking> rankings, const GoldStandard& gold, std::size_t k,
                    const std::string& config_label = {});

/// Human-readable per-language table plus the average.
std::string format_report_table(const EvalReport& report);

/// TSV with one row per report sorted by average (descending, stable):
/// config, one column per language, avg, delta. Delta is the average minus
/// the first input report's average. Values use 4 decimals; a language a
/// report lacks prints as NA.
std::string ablation_report(std::span<const EvalReport> reports);

}  // namespace fcr
