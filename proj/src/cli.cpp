#include "fcr/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fcr/config.hpp"
#include "fcr/dense_index.hpp"
#include "fcr/error.hpp"
#include "fcr/evaluation.hpp"
#include "fcr/fusion.hpp"
#include "fcr/llm/rerank.hpp"
#include "fcr/llm/translate.hpp"
#include "fcr/mining.hpp"
#include "fcr/multiclaim_csv.hpp"
#include "fcr/sparse_index.hpp"
#include "fcr/text_util.hpp"
#include "fcr/version.hpp"

namespace fcr::cli {

namespace fs = std::filesystem;

namespace {

// Thrown by subcommands that finished with fallbacks.
struct PartialFailure {
  std::size_t fallbacks;
};

struct TextOptions {
  std::string mode = "translated_with_fallback";
  bool no_title = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--text-mode", mode, "original | original_plus_ocr | translated_with_fallback")
        ->capture_default_str();
    cmd->add_flag("--no-title", no_title, "Embed fact-check claims without their titles");
  }
  TextSelector post() const { return TextSelector{parse_text_mode(mode), false}; }
  TextSelector doc() const { return TextSelector{parse_text_mode(mode), !no_title}; }
};

struct EndpointOptions {
  std::string config_path;
  std::string base_url;
  std::string model;
  std::string api_key_env;
  int max_retries = -1;
  int concurrency = 0;
  double timeout = 0.0;
  int backoff_ms = -1;
  std::string cache_dir;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Pipeline TOML supplying the endpoint section");
    cmd->add_option("--base-url", base_url, "Chat-completion base URL, e.g. http://localhost:8000/v1");
    cmd->add_option("--model", model, "Model name sent with each request");
    cmd->add_option("--api-key-env", api_key_env, "Environment variable holding the API key");
    cmd->add_option("--max-retries", max_retries);
    cmd->add_option("--concurrency", concurrency, "Maximum requests in flight");
    cmd->add_option("--timeout", timeout, "Request timeout in seconds");
    cmd->add_option("--retry-backoff-ms", backoff_ms);
    cmd->add_option("--cache-dir", cache_dir, "Response cache directory");
  }

  // Flags override the config file section.
  LlmStageConfig resolve(bool rerank_section) const {
    LlmStageConfig stage;
    if (!config_path.empty()) {
      const auto cfg = load_pipeline_config(config_path);
      stage = rerank_section ? cfg.rerank : cfg.translation;
    }
    if (!base_url.empty()) stage.endpoint.base_url = base_url;
    if (!model.empty()) stage.endpoint.model_name = model;
    if (!api_key_env.empty()) stage.endpoint.api_key_env_var = api_key_env;
    if (max_retries >= 0) stage.endpoint.max_retries = max_retries;
    if (concurrency > 0) stage.endpoint.max_concurrent_requests = concurrency;
    if (timeout > 0.0) stage.endpoint.timeout_seconds = timeout;
    if (backoff_ms >= 0) stage.retry_backoff_ms = backoff_ms;
    stage.endpoint.validate();
    return stage;
  }
};

class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}

  void write(std::string_view content) const {
    if (path_.empty() || path_ == "-") {
      fallback_ << content;
      return;
    }
    const auto parent = fs::path(path_).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_file_atomic(path_, content);
  }

 private:
  std::string path_;
  std::ostream& fallback_;
};

std::string run_to_string(const std::vector<Ranking>& rankings) {
  std::ostringstream ss;
  write_run(ss, rankings);
  return ss.str();
}

Corpus load_corpus_optional_pairs(const std::string& posts, const std::string& fact_checks,
                                  const std::string& pairs) {
  return Corpus(read_posts(posts), read_fact_checks(fact_checks),
                pairs.empty() ? std::vector<RelevancePair>{} : read_pairs(pairs));
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (auto part : split(text, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    try {
      out.push_back(static_cast<std::size_t>(std::stoull(std::string(part))));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("\"{}\" is not a count", part));
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    try {
      out.push_back(std::stod(std::string(part)));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("\"{}\" is not a number", part));
    }
  }
  return out;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const DuplicateIdError*>(&e)) return "duplicate_id";
  if (dynamic_cast<const DanglingReferenceError*>(&e)) return "dangling_reference";
  if (dynamic_cast<const DimensionMismatchError*>(&e)) return "dimension_mismatch";
  if (dynamic_cast<const ZeroNormError*>(&e)) return "zero_norm";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const TransportError*>(&e)) return "transport";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  return "runtime";
}

void report_error(std::ostream& err, bool json_errors, const std::string& type,
                  const std::string& message, int code) {
  if (json_errors) {
    err << nlohmann::json{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}}.dump()
        << '\n';
  } else {
    err << "fcr: error: " << message << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, const Services& services, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Fact-checked claim retrieval: dense/BM25 search, LLM reranking, RRF and success@k"};
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors, "Report errors as JSON on stderr");
  app.set_version_flag("--version", std::string("fcr ") + std::string(kVersion));

  const ChatClientFactory factory =
      services.client_factory ? services.client_factory : http_client_factory();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert MultiClaim CSVs to JSONL and validate a corpus");
  std::string posts_csv, fact_checks_csv, pairs_csv, ingest_out = ".";
  CorpusPaths ingest_jsonl;
  ingest->add_option("--posts-csv", posts_csv);
  ingest->add_option("--fact-checks-csv", fact_checks_csv);
  ingest->add_option("--pairs-csv", pairs_csv);
  ingest->add_option("--out-dir", ingest_out, "Directory for the converted JSONL files")->capture_default_str();
  ingest->add_option("--posts", ingest_jsonl.posts, "Existing posts JSONL to validate");
  ingest->add_option("--fact-checks", ingest_jsonl.fact_checks);
  ingest->add_option("--pairs", ingest_jsonl.pairs);

  // translate
  auto* translate = app.add_subcommand("translate", "Translate posts to English through the chat endpoint");
  std::string translate_in, translate_out;
  bool translate_overwrite = false;
  EndpointOptions translate_ep;
  translate->add_option("--posts", translate_in)->required();
  translate->add_option("--out", translate_out)->required();
  translate->add_flag("--overwrite", translate_overwrite, "Re-translate posts that already have a translation");
  translate_ep.add(translate);

  // index
  auto* index = app.add_subcommand("index", "Load and validate an embeddings file");
  std::string index_path, index_fact_checks;
  index->add_option("--embeddings", index_path)->required();
  index->add_option("--fact-checks", index_fact_checks, "Check that every id is a known fact-check");

  // search
  auto* search_cmd = app.add_subcommand("search", "Dense or BM25 retrieval into a run file");
  std::string search_mode = "dense", doc_emb, query_emb, search_posts, search_fcs, query_id, search_out;
  std::string search_pool = "full";
  std::size_t search_k = 50;
  Bm25Params bm25;
  TextOptions search_text;
  search_cmd->add_option("--mode", search_mode, "dense | sparse")->capture_default_str();
  search_cmd->add_option("--doc-embeddings", doc_emb);
  search_cmd->add_option("--query-embeddings", query_emb);
  search_cmd->add_option("--posts", search_posts);
  search_cmd->add_option("--fact-checks", search_fcs);
  search_cmd->add_option("--query-id", query_id, "Search a single query");
  search_cmd->add_option("--pool", search_pool, "full | same_language")->capture_default_str();
  search_cmd->add_option("--k", search_k)->capture_default_str();
  search_cmd->add_option("--k1", bm25.k1)->capture_default_str();
  search_cmd->add_option("--b", bm25.b)->capture_default_str();
  search_cmd->add_option("--out", search_out, "Run file (stdout when omitted)");
  search_text.add(search_cmd);

  // mine
  auto* mine = app.add_subcommand("mine", "Mine hard negatives and export training triplets");
  CorpusPaths mine_corpus;
  std::string mine_doc_emb, mine_query_emb, mine_out, mine_format = "jsonl_pair_with_negs", sweep, sweep_out;
  MiningConfig mining;
  double margin = -1.0;
  TextOptions mine_text;
  mine->add_option("--posts", mine_corpus.posts)->required();
  mine->add_option("--fact-checks", mine_corpus.fact_checks)->required();
  mine->add_option("--pairs", mine_corpus.pairs)->required();
  mine->add_option("--doc-embeddings", mine_doc_emb)->required();
  mine->add_option("--query-embeddings", mine_query_emb)->required();
  mine->add_option("--negatives", mining.negatives_per_query)->capture_default_str();
  mine->add_option("--depth", mining.candidate_depth)->capture_default_str();
  mine->add_option("--margin", margin, "Skip candidates within this margin of the positive score");
  mine->add_option("--seed", mining.seed)->capture_default_str();
  mine->add_option("--format", mine_format, "jsonl_triplet | jsonl_pair_with_negs")->capture_default_str();
  mine->add_option("--out", mine_out, "Triplet export path");
  mine->add_option("--sweep", sweep, "Comma-separated negatives-per-query values, e.g. 5,20,40,80");
  mine->add_option("--sweep-out", sweep_out, "Sweep report TSV (stdout when omitted)");
  mine_text.add(mine);

  // rerank
  auto* rerank_cmd = app.add_subcommand("rerank", "LLM-rerank the top candidates of a run file");
  std::string rerank_run, rerank_posts, rerank_fcs, rerank_out, rerank_log;
  std::size_t rerank_depth = llm::kMaxRerankCandidates;
  EndpointOptions rerank_ep;
  TextOptions rerank_text;
  rerank_cmd->add_option("--run", rerank_run)->required();
  rerank_cmd->add_option("--posts", rerank_posts)->required();
  rerank_cmd->add_option("--fact-checks", rerank_fcs)->required();
  rerank_cmd->add_option("--depth", rerank_depth, "Candidates sent per query (at most 50)")->capture_default_str();
  rerank_cmd->add_option("--out", rerank_out, "Reranked run file (stdout when omitted)");
  rerank_cmd->add_option("--log", rerank_log, "Per-query parse status JSONL");
  rerank_ep.add(rerank_cmd);
  rerank_text.add(rerank_cmd);

  // fuse
  auto* fuse = app.add_subcommand("fuse", "Reciprocal Rank Fusion of run files");
  std::vector<std::string> fuse_runs;
  double k_rrf = 60.0;
  std::string fuse_weights, fuse_out;
  std::size_t fuse_top = 0;
  fuse->add_option("runs", fuse_runs, "Run files to fuse")->required();
  fuse->add_option("--k-rrf", k_rrf)->capture_default_str();
  fuse->add_option("--weights", fuse_weights, "Comma-separated weights, one per run");
  fuse->add_option("--top", fuse_top, "Keep only the best N per query (0 keeps all)");
  fuse->add_option("--out", fuse_out, "Fused run file (stdout when omitted)");

  // eval
  auto* eval = app.add_subcommand("eval", "Score a run file with success@k per language");
  std::string eval_run, eval_pairs, eval_posts, eval_label, eval_json;
  std::size_t eval_k = 10;
  eval->add_option("--run", eval_run)->required();
  eval->add_option("--pairs", eval_pairs)->required();
  eval->add_option("--posts", eval_posts, "Posts JSONL supplying query languages");
  eval->add_option("--k", eval_k)->capture_default_str();
  eval->add_option("--label", eval_label, "Config label stored in the report");
  eval->add_option("--json", eval_json, "Write the report as JSON");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run the end-to-end retrieval pipeline");
  std::string pipeline_config, pipeline_out_dir;
  bool dry_run = false;
  pipeline->add_option("--config", pipeline_config)->required();
  pipeline->add_option("--output-dir", pipeline_out_dir, "Override output_dir from the config");
  pipeline->add_flag("--dry-run", dry_run, "Validate config and inputs only; no model calls");

  // report
  auto* report = app.add_subcommand("report", "Ablation table from evaluation report JSON files");
  std::vector<std::string> report_files;
  std::string report_out;
  report->add_option("reports", report_files)->required();
  report->add_option("--out", report_out, "TSV path (stdout when omitted)");

  std::vector<std::string> argv_storage{"fcr"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    if (json_errors) {
      report_error(err, true, "usage", e.what(), kValidation);
      return kValidation;
    }
    app.exit(e, out, err);
    return kValidation;
  }

  try {
    if (*ingest) {
      if (!posts_csv.empty() || !fact_checks_csv.empty() || !pairs_csv.empty()) {
        if (posts_csv.empty() || fact_checks_csv.empty() || pairs_csv.empty()) {
          throw ConfigError("--posts-csv, --fact-checks-csv and --pairs-csv go together");
        }
        const auto converted = multiclaim::convert(posts_csv, fact_checks_csv, pairs_csv);
        fs::create_directories(ingest_out);
        ingest_jsonl = CorpusPaths{(fs::path(ingest_out) / "posts.jsonl").string(),
                                   (fs::path(ingest_out) / "fact_checks.jsonl").string(),
                                   (fs::path(ingest_out) / "pairs.jsonl").string()};
        write_posts(ingest_jsonl.posts, converted.posts);
        write_fact_checks(ingest_jsonl.fact_checks, converted.fact_checks);
        write_pairs(ingest_jsonl.pairs, converted.pairs);
        err << fmt::format("converted {} posts, {} fact-checks, {} pairs; skipped {} rows\n",
                           converted.stats.posts, converted.stats.fact_checks, converted.stats.pairs,
                           converted.stats.skipped_rows);
      }
      if (ingest_jsonl.posts.empty() || ingest_jsonl.fact_checks.empty() || ingest_jsonl.pairs.empty()) {
        throw ConfigError("ingest needs either the three CSV files or --posts/--fact-checks/--pairs");
      }
      const auto corpus = load_corpus(ingest_jsonl);
      out << corpus.validation_report().to_json() << '\n';
      return kSuccess;
    }

    if (*translate) {
      const auto stage = translate_ep.resolve(false);
      auto client = factory(stage.endpoint);
      const auto posts = read_posts(translate_in);
      std::unique_ptr<llm::ResponseCache> cache;
      if (!translate_ep.cache_dir.empty()) {
        cache = std::make_unique<llm::ResponseCache>(translate_ep.cache_dir);
      }
      const llm::RetryPolicy retry{stage.endpoint.max_retries,
                                   std::chrono::milliseconds(stage.retry_backoff_ms)};
      const auto batch = llm::translate_posts(*client, posts, cache.get(), retry,
                                              stage.endpoint.max_concurrent_requests, translate_overwrite);
      write_posts(translate_out, llm::apply_translations(posts, batch));
      err << fmt::format("translated {} posts ({} from cache, {} fallbacks)\n", posts.size(),
                         batch.cache_hits, batch.fallbacks);
      if (batch.fallbacks > 0) throw PartialFailure{batch.fallbacks};
      return kSuccess;
    }

    if (*index) {
      const auto store = load_embeddings(index_path);
      if (!index_fact_checks.empty()) {
        const Corpus fcs({}, read_fact_checks(index_fact_checks), {});
        check_store_against_corpus(store, fcs);
      }
      out << nlohmann::json{{"count", store.size()}, {"dimension", store.dimension()}}.dump() << '\n';
      return kSuccess;
    }

    if (*search_cmd) {
      std::vector<Ranking> rankings;
      const auto pool = parse_pool_mode(search_pool);
      if (search_mode == "dense") {
        if (doc_emb.empty() || query_emb.empty()) {
          throw ConfigError("dense search needs --doc-embeddings and --query-embeddings");
        }
        const auto store = load_embeddings(doc_emb);
        std::vector<DenseQuery> queries;
        for (auto& r : read_embedding_records(query_emb)) {
          if (query_id.empty() || r.id == query_id) queries.push_back(DenseQuery{r.id, std::move(r.vector)});
        }
        if (!query_id.empty() && queries.empty()) throw ValidationError(fmt::format("no query \"{}\"", query_id));
        std::vector<std::vector<std::uint8_t>> storage;
        std::vector<RowFilter> filters;
        if (pool == PoolMode::same_language) {
          if (search_posts.empty() || search_fcs.empty()) {
            throw ConfigError("--pool same_language needs --posts and --fact-checks");
          }
          const auto corpus = load_corpus_optional_pairs(search_posts, search_fcs, "");
          for (const auto& q : queries) {
            const auto* post = corpus.find_post(q.id);
            if (!post) throw DanglingReferenceError("post", q.id);
            auto& f = storage.emplace_back(store.size());
            for (std::size_t row = 0; row < store.size(); ++row) {
              const auto* fc = corpus.find_fact_check(store.id(row));
              f[row] = fc && fc->language == post->language;
            }
          }
          for (const auto& f : storage) filters.emplace_back(f);
        }
        rankings = batch_search(store, queries, search_k, filters);
      } else if (search_mode == "sparse") {
        if (search_posts.empty() || search_fcs.empty()) {
          throw ConfigError("sparse search needs --posts and --fact-checks");
        }
        const auto corpus = load_corpus_optional_pairs(search_posts, search_fcs, "");
        std::vector<std::pair<std::string, std::string>> docs;
        for (const auto& fc : corpus.fact_checks()) docs.emplace_back(fc.id, select_text(fc, search_text.doc()));
        const auto inv = InvertedIndex::build(docs);
        std::vector<SparseQuery> queries;
        std::vector<std::vector<std::uint8_t>> storage;
        for (const auto& post : corpus.posts()) {
          if (!query_id.empty() && post.id != query_id) continue;
          queries.push_back(SparseQuery{post.id, select_text(post, search_text.post())});
          if (pool == PoolMode::same_language) {
            auto& f = storage.emplace_back();
            for (const auto& fc : corpus.fact_checks()) f.push_back(fc.language == post.language);
          }
        }
        if (!query_id.empty() && queries.empty()) throw ValidationError(fmt::format("no query \"{}\"", query_id));
        std::vector<RowFilter> filters(storage.begin(), storage.end());
        rankings = bm25_batch_search(inv, queries, search_k, bm25, filters);
      } else {
        throw ConfigError(fmt::format("unknown search mode \"{}\"", search_mode));
      }
      OutputTarget(search_out, out).write(run_to_string(rankings));
      return kSuccess;
    }

    if (*mine) {
      if (margin >= 0.0) mining.margin = margin;
      mining.query_text = mine_text.post();
      mining.doc_text = mine_text.doc();
      mining.validate();
      const auto corpus = load_corpus(mine_corpus);
      const auto store = load_embeddings(mine_doc_emb);
      check_store_against_corpus(store, corpus);
      const auto queries = post_queries(corpus, read_embedding_records(mine_query_emb));
      const auto retriever = dense_mining_retriever(store, queries);

      if (!sweep.empty()) {
        const auto n_values = parse_size_list(sweep);
        const auto rows = mining_sweep(retriever, corpus, mining, n_values);
        OutputTarget(sweep_out, out).write(format_sweep_report(rows));
      }
      if (!mine_out.empty()) {
        const auto result = mine_negatives(retriever, corpus, mining);
        export_triplets(result.triplets, mine_out, parse_triplet_format(mine_format));
        err << fmt::format("{} triplets, {} negatives, {} short, {} without negatives\n",
                           result.stats.triplets, result.stats.total_negatives,
                           result.stats.short_triplets, result.stats.empty_triplets);
        if (result.stats.empty_triplets > 0) {
          err << fmt::format("warning: {} pairs had no negatives available\n", result.stats.empty_triplets);
        }
      }
      if (sweep.empty() && mine_out.empty()) throw ConfigError("mine needs --out and/or --sweep");
      return kSuccess;
    }

    if (*rerank_cmd) {
      const auto stage = rerank_ep.resolve(true);
      auto client = factory(stage.endpoint);
      const auto corpus = load_corpus_optional_pairs(rerank_posts, rerank_fcs, "");
      const auto base = read_run_file(rerank_run);
      const auto requests =
          build_rerank_requests(corpus, base, rerank_text.post(), rerank_text.doc(), rerank_depth);
      std::unique_ptr<llm::ResponseCache> cache;
      if (!rerank_ep.cache_dir.empty()) cache = std::make_unique<llm::ResponseCache>(rerank_ep.cache_dir);
      const llm::RetryPolicy retry{stage.endpoint.max_retries,
                                   std::chrono::milliseconds(stage.retry_backoff_ms)};
      const auto batch = llm::rerank_batch(*client, requests, base, cache.get(), retry,
                                           stage.endpoint.max_concurrent_requests);
      std::vector<Ranking> reranked;
      std::string log;
      for (std::size_t i = 0; i < batch.outcomes.size(); ++i) {
        reranked.push_back(batch.outcomes[i].ranking);
        log += nlohmann::json{{"query_id", base[i].query_id},
                              {"status", llm::to_string(batch.outcomes[i].status)},
                              {"fallback", batch.outcomes[i].fallback}}
                   .dump();
        log += '\n';
      }
      OutputTarget(rerank_out, out).write(run_to_string(reranked));
      if (!rerank_log.empty()) OutputTarget(rerank_log, out).write(log);
      if (batch.fallbacks > 0) {
        err << fmt::format("{} of {} queries fell back to the base ranking\n", batch.fallbacks,
                           batch.outcomes.size());
        throw PartialFailure{batch.fallbacks};
      }
      return kSuccess;
    }

    if (*fuse) {
      std::vector<std::vector<Ranking>> runs;
      for (const auto& path : fuse_runs) runs.push_back(read_run_file(path));
      auto fused = rrf_fuse_runs(runs, RrfConfig{k_rrf, parse_double_list(fuse_weights)});
      if (fuse_top > 0) {
        for (auto& r : fused) r = r.truncated(fuse_top);
      }
      OutputTarget(fuse_out, out).write(run_to_string(fused));
      return kSuccess;
    }

    if (*eval) {
      const auto rankings = read_run_file(eval_run);
      const auto pairs = read_pairs(eval_pairs);
      const auto posts = eval_posts.empty() ? std::vector<Post>{} : read_posts(eval_posts);
      const auto gold = GoldStandard::from_pairs(pairs, posts);
      const auto rep = evaluate(rankings, gold, eval_k, eval_label.empty() ? eval_run : eval_label);
      out << format_report_table(rep);
      if (!eval_json.empty()) OutputTarget(eval_json, out).write(rep.to_json());
      return kSuccess;
    }

    if (*pipeline) {
      auto cfg = load_pipeline_config(pipeline_config);
      if (!pipeline_out_dir.empty()) cfg.output_dir = pipeline_out_dir;
      PipelineOptions opts{dry_run, factory};
      const auto result = run_pipeline(cfg, opts);
      if (result.dry_run) {
        out << "configuration and inputs are valid\n";
        return kSuccess;
      }
      out << format_report_table(result.report);
      if (result.fallbacks() > 0) {
        err << fmt::format("{} translation and {} rerank fallbacks\n", result.translation_fallbacks,
                           result.rerank_fallbacks);
        throw PartialFailure{result.fallbacks()};
      }
      return kSuccess;
    }

    if (*report) {
      std::vector<EvalReport> reports;
      for (const auto& path : report_files) reports.push_back(EvalReport::from_json(read_file(path)));
      OutputTarget(report_out, out).write(ablation_report(reports));
      return kSuccess;
    }
  } catch (const PartialFailure& p) {
    if (json_errors) {
      report_error(err, true, "partial_failure", fmt::format("{} fallbacks", p.fallbacks), kPartialFailure);
    }
    return kPartialFailure;
  } catch (const ValidationError& e) {
    report_error(err, json_errors, error_type(e), e.what(), kValidation);
    return kValidation;
  } catch (const std::exception& e) {
    report_error(err, json_errors, error_type(e), e.what(), kRuntime);
    return kRuntime;
  }
  return kSuccess;
}

}  // namespace fcr::cli
