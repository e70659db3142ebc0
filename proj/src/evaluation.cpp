#include "fcr/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <json.hpp>
#include <numeric>
#include <unordered_map>

#include "fcr/error.hpp"

namespace fcr {

int success_at_k(const Ranking& ranking, const std::set<std::string>& gold_ids, std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (gold_ids.empty()) throw ValidationError(fmt::format("query \"{}\" has no gold documents", ranking.query_id));
  const auto n = std::min(k, ranking.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (gold_ids.count(ranking.entries[i].doc_id)) return 1;
  }
  return 0;
}

GoldStandard GoldStandard::from_corpus(const Corpus& corpus) {
  GoldStandard g;
  for (const auto& pair : corpus.pairs()) g.gold[pair.post_id].insert(pair.fact_check_id);
  for (const auto& [post_id, _] : g.gold) g.language[post_id] = corpus.find_post(post_id)->language;
  return g;
}

GoldStandard GoldStandard::from_pairs(std::span<const RelevancePair> pairs, std::span<const Post> posts,
                                      const std::string& default_language) {
  GoldStandard g;
  for (const auto& pair : pairs) g.gold[pair.post_id].insert(pair.fact_check_id);
  std::unordered_map<std::string, std::string> langs;
  for (const auto& p : posts) langs.emplace(p.id, p.language);
  for (const auto& [post_id, _] : g.gold) {
    auto it = langs.find(post_id);
    g.language[post_id] = it == langs.end() ? default_language : it->second;
  }
  return g;
}

EvalReport evaluate(std::span<const Ranking> rankings, const GoldStandard& gold, std::size_t k,
                    const std::string& config_label) {
  if (k == 0) throw ValidationError("k must be at least 1");
  EvalReport report;
  report.config_label = config_label;
  report.k = k;

  std::unordered_map<std::string_view, const Ranking*> by_query;
  for (const auto& r : rankings) {
    if (!gold.gold.count(r.query_id)) {
      ++report.unjudged_rankings;
      continue;
    }
    by_query.emplace(r.query_id, &r);
  }

  std::map<std::string, std::size_t> hits;
  for (const auto& [post_id, gold_ids] : gold.gold) {
    const auto& language = gold.language.at(post_id);
    ++report.n_queries[language];
    auto& h = hits[language];
    auto it = by_query.find(post_id);
    if (it == by_query.end()) {
      ++report.missing_rankings;
      continue;
    }
    h += static_cast<std::size_t>(success_at_k(*it->second, gold_ids, k));
  }
  for (const auto& [language, n] : report.n_queries) {
    report.per_language[language] = static_cast<double>(hits[language]) / static_cast<double>(n);
  }
  if (!report.per_language.empty()) {
    double sum = 0.0;
    for (const auto& [_, v] : report.per_language) sum += v;
    report.macro_avg = sum / static_cast<double>(report.per_language.size());
  }
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["config_label"] = config_label;
  j["k"] = k;
  j["per_language"] = per_language;
  j["n_queries"] = n_queries;
  j["macro_avg"] = macro_avg;
  j["missing_rankings"] = missing_rankings;
  j["unjudged_rankings"] = unjudged_rankings;
  return j.dump(2) + "\n";
}

EvalReport EvalReport::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EvalReport r;
    r.config_label = j.at("config_label").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.per_language = j.at("per_language").get<std::map<std::string, double>>();
    r.n_queries = j.at("n_queries").get<std::map<std::string, std::size_t>>();
    r.macro_avg = j.at("macro_avg").get<double>();
    r.missing_rankings = j.value("missing_rankings", std::size_t{0});
    r.unjudged_rankings = j.value("unjudged_rankings", std::size_t{0});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed evaluation report: {}", e.what()));
  }
}

std::string format_report_table(const EvalReport& report) {
  std::string out = fmt::format("{:<10}{:>10}{:>10}\n", "language", fmt::format("S@{}", report.k), "queries");
  for (const auto& [language, value] : report.per_language) {
    out += fmt::format("{:<10}{:>10.4f}{:>10}\n", language, value, report.n_queries.at(language));
  }
  std::size_t total = 0;
  for (const auto& [_, n] : report.n_queries) total += n;
  out += fmt::format("{:<10}{:>10.4f}{:>10}\n", "avg", report.macro_avg, total);
  if (report.missing_rankings > 0) {
    out += fmt::format("missing rankings (scored 0): {}\n", report.missing_rankings);
  }
  return out;
}

std::string ablation_report(std::span<const EvalReport> reports) {
  if (reports.empty()) return "config\tavg\tdelta\n";
  for (const auto& r : reports) {
    if (r.k != reports.front().k) throw ValidationError("ablation reports must share k");
  }
  std::set<std::string> languages;
  for (const auto& r : reports) {
    for (const auto& [language, _] : r.per_language) languages.insert(language);
  }
  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return reports[a].macro_avg > reports[b].macro_avg;
  });

  std::string out = "config";
  for (const auto& language : languages) out += fmt::format("\t{}", language);
  out += "\tavg\tdelta\n";
  const double baseline = reports.front().macro_avg;
  for (auto i : order) {
    const auto& r = reports[i];
    out += r.config_label;
    for (const auto& language : languages) {
      auto it = r.per_language.find(language);
      out += it == r.per_language.end() ? std::string("\tNA") : fmt::format("\t{:.4f}", it->second);
    }
    out += fmt::format("\t{:.4f}\t{:+.4f}\n", r.macro_avg, r.macro_avg - baseline);
  }
  return out;
}

}  // namespace fcr
