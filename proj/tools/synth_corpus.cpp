// Generates the synthetic corpora used by the end-to-end tests.
//
//   planted      every post's gold fact-checks are its nearest neighbours
//   adversarial  every post's single gold fact-check sits at dense rank --gold-rank

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "fcr/corpus.hpp"
#include "fcr/dense_index.hpp"
#include "fcr/error.hpp"
#include "fcr/text_util.hpp"

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 5> kLanguages{"eng", "spa", "por", "fra", "deu"};

using Vec = std::vector<float>;

class Generator {
 public:
  Generator(std::uint64_t seed, std::size_t dim) : rng_(seed), dim_(dim) {
    static constexpr std::array<const char*, 16> syllables{"ka", "lo", "mi", "ne", "ru", "ta", "vo", "zi",
                                                           "ba", "de", "fu", "go", "ha", "ji", "pe", "so"};
    std::uniform_int_distribution<std::size_t> pick(0, syllables.size() - 1);
    std::uniform_int_distribution<int> len(2, 4);
    while (vocabulary_.size() < 400) {
      std::string w;
      for (int n = len(rng_); n > 0; --n) w += syllables[pick(rng_)];
      if (std::find(vocabulary_.begin(), vocabulary_.end(), w) == vocabulary_.end()) vocabulary_.push_back(w);
    }
  }

  Vec unit_vector() {
    std::normal_distribution<double> normal;
    std::vector<double> v(dim_);
    for (auto& x : v) x = normal(rng_);
    return to_unit(v);
  }

  /// Unit vector with cosine `t` to the unit vector `q` whose remaining
  /// component is orthogonal to every vector of the orthonormal `basis`.
  Vec at_cosine(const Vec& q, double t, const std::vector<std::vector<double>>& basis) {
    std::normal_distribution<double> normal;
    std::vector<double> u(dim_);
    for (auto& x : u) x = normal(rng_);
    remove_span(u, basis);
    double norm = 0.0;
    for (double x : u) norm += x * x;
    norm = std::sqrt(norm);
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    std::vector<double> g(dim_);
    for (std::size_t i = 0; i < dim_; ++i) g[i] = t * q[i] + s * u[i] / norm;
    return to_unit(g);
  }

  Vec perturbed(const Vec& q, double noise) {
    std::normal_distribution<double> normal(0.0, noise);
    std::vector<double> g(dim_);
    for (std::size_t i = 0; i < dim_; ++i) g[i] = q[i] + normal(rng_);
    return to_unit(g);
  }

  std::vector<std::string> words(std::size_t lo, std::size_t hi) {
    std::uniform_int_distribution<std::size_t> count(lo, hi);
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary_.size() - 1);
    std::vector<std::string> out(count(rng_));
    for (auto& w : out) w = vocabulary_[pick(rng_)];
    return out;
  }

  std::mt19937_64& rng() { return rng_; }

  /// Projects the span of the orthonormal `basis` out of `v`.
  static void remove_span(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
    for (const auto& b : basis) {
      double proj = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) proj += v[i] * b[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * b[i];
    }
  }

 private:
  static Vec to_unit(const std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
    return fcr::normalized(out);
  }

  std::mt19937_64 rng_;
  std::size_t dim_;
  std::vector<std::string> vocabulary_;
};

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

/// 1-based rank of `gold` among all fact-checks for query `q`, ties counted
/// against the gold.
std::size_t rank_of(const Vec& q, const std::vector<Vec>& fcs, std::size_t gold) {
  const float g = fcr::dot(q, fcs[gold]);
  std::size_t rank = 1;
  for (std::size_t j = 0; j < fcs.size(); ++j) {
    if (j != gold && fcr::dot(q, fcs[j]) >= g) ++rank;
  }
  return rank;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic corpus generator"};
  std::string kind = "planted", out_dir;
  std::size_t n_posts = 50, n_fact_checks = 500, dim = 64, gold_rank = 30;
  std::uint64_t seed = 7;
  app.add_option("--kind", kind, "planted | adversarial")->capture_default_str();
  app.add_option("--out", out_dir)->required();
  app.add_option("--posts", n_posts)->capture_default_str();
  app.add_option("--fact-checks", n_fact_checks)->capture_default_str();
  app.add_option("--dim", dim)->capture_default_str();
  app.add_option("--gold-rank", gold_rank, "Dense rank of the gold in the adversarial corpus")
      ->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const bool adversarial = kind == "adversarial";
  if (!adversarial && kind != "planted") {
    std::cerr << "fcr_synth: unknown kind " << kind << '\n';
    return 1;
  }
  const std::size_t block = n_fact_checks / n_posts;
  if (block < 10 || gold_rank < 2 || gold_rank > n_fact_checks) {
    std::cerr << "fcr_synth: need at least 10 fact-checks per post and 2 <= gold-rank <= fact-checks\n";
    return 1;
  }

  Generator gen(seed, dim);
  std::vector<fcr::FactCheck> fact_checks(n_fact_checks);
  std::vector<Vec> fc_vecs(n_fact_checks);
  for (std::size_t j = 0; j < n_fact_checks; ++j) {
    auto& fc = fact_checks[j];
    fc.id = fmt::format("fc-{:04d}", j);
    fc.language = kLanguages[j % kLanguages.size()];
    fc.claim = join(gen.words(8, 14));
    fc.title = join(gen.words(3, 5));
    fc_vecs[j] = gen.unit_vector();
  }

  // Gold of post i lives in its own block of fact-checks and shares the
  // post's language; every fourth planted post has a second gold.
  std::vector<fcr::Post> posts(n_posts);
  std::vector<Vec> post_vecs(n_posts);
  std::vector<std::vector<std::size_t>> gold(n_posts);
  std::vector<fcr::RelevancePair> pairs;
  for (std::size_t i = 0; i < n_posts; ++i) {
    auto& post = posts[i];
    post.id = fmt::format("post-{:03d}", i);
    post.language = kLanguages[i % kLanguages.size()];
    gold[i].push_back(i * block + i % kLanguages.size());
    if (!adversarial && i % 4 == 0) gold[i].push_back(gold[i][0] + kLanguages.size());
    auto text = gen.words(5, 8);
    const auto claim_words = fcr::split(fact_checks[gold[i][0]].claim, ' ');
    text.insert(text.end(), claim_words.begin(), claim_words.begin() + 4);
    std::shuffle(text.begin(), text.end(), gen.rng());
    post.original_text = join(text);
    if (i % 3 == 0) post.ocr_text = join(gen.words(2, 4));
    post_vecs[i] = gen.unit_vector();
    for (auto g : gold[i]) pairs.push_back({post.id, fact_checks[g].id});
  }

  if (!adversarial) {
    for (std::size_t i = 0; i < n_posts; ++i) {
      for (auto g : gold[i]) fc_vecs[g] = gen.perturbed(post_vecs[i], 0.02);
    }
    for (std::size_t i = 0; i < n_posts; ++i) {
      for (auto g : gold[i]) {
        if (rank_of(post_vecs[i], fc_vecs, g) > gold[i].size()) {
          std::cerr << "fcr_synth: planting failed for " << posts[i].id << '\n';
          return 2;
        }
      }
    }
  } else {
    // Golds leave the span of the posts except along their own post, which
    // keeps them out of the other posts' top ranks. Float rounding can still
    // shift a neighbour, so repeat until every gold sits at the target rank.
    if (dim <= n_posts) {
      std::cerr << "fcr_synth: the adversarial corpus needs dim > posts\n";
      return 1;
    }
    std::vector<std::vector<double>> basis;
    for (const auto& q : post_vecs) {
      std::vector<double> v(q.begin(), q.end());
      Generator::remove_span(v, basis);
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      for (auto& x : v) x /= norm;
      basis.push_back(std::move(v));
    }
    bool settled = false;
    for (int round = 0; round < 100 && !settled; ++round) {
      settled = true;
      for (std::size_t i = 0; i < n_posts; ++i) {
        const auto g = gold[i][0];
        if (rank_of(post_vecs[i], fc_vecs, g) == gold_rank) continue;
        settled = false;
        std::vector<float> sims;
        for (std::size_t j = 0; j < n_fact_checks; ++j) {
          if (j != g) sims.push_back(fcr::dot(post_vecs[i], fc_vecs[j]));
        }
        std::sort(sims.begin(), sims.end(), std::greater<>());
        const double t = 0.5 * (static_cast<double>(sims[gold_rank - 2]) + sims[gold_rank - 1]);
        fc_vecs[g] = gen.at_cosine(post_vecs[i], t, basis);
      }
    }
    if (!settled) {
      std::cerr << "fcr_synth: adversarial placement did not settle\n";
      return 2;
    }
  }

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  fcr::write_posts((dir / "posts.jsonl").string(), posts);
  fcr::write_fact_checks((dir / "fact_checks.jsonl").string(), fact_checks);
  fcr::write_pairs((dir / "pairs.jsonl").string(), pairs);
  std::vector<fcr::EmbeddingRecord> post_records, fc_records;
  for (std::size_t i = 0; i < n_posts; ++i) post_records.push_back({posts[i].id, post_vecs[i]});
  for (std::size_t j = 0; j < n_fact_checks; ++j) fc_records.push_back({fact_checks[j].id, fc_vecs[j]});
  fcr::write_embedding_records((dir / "post_embeddings.jsonl").string(), post_records);
  fcr::write_embedding_records((dir / "fact_check_embeddings.jsonl").string(), fc_records);
  std::cout << fmt::format("{}: {} posts, {} fact-checks, {} pairs, dim {}\n", kind, n_posts, n_fact_checks,
                           pairs.size(), dim);
  return 0;
}
