#include "fcr/corpus.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <json.hpp>

#include "fcr/error.hpp"
#include "fcr/text_util.hpp"

namespace fcr {

using nlohmann::json;

std::string_view to_string(TextMode mode) {
  switch (mode) {
    case TextMode::original: return "original";
    case TextMode::original_plus_ocr: return "original_plus_ocr";
    case TextMode::translated_with_fallback: return "translated_with_fallback";
  }
  return "original";
}

TextMode parse_text_mode(std::string_view text) {
  if (text == "original") return TextMode::original;
  if (text == "original_plus_ocr") return TextMode::original_plus_ocr;
  if (text == "translated_with_fallback") return TextMode::translated_with_fallback;
  throw ConfigError(fmt::format("unknown text mode \"{}\"", text));
}

std::string_view to_string(PoolMode mode) {
  return mode == PoolMode::same_language ? "same_language" : "full";
}

PoolMode parse_pool_mode(std::string_view text) {
  if (text == "same_language") return PoolMode::same_language;
  if (text == "full") return PoolMode::full;
  throw ConfigError(fmt::format("unknown pool mode \"{}\"", text));
}

namespace {

bool has_text(const std::optional<std::string>& s) { return s.has_value() && !s->empty(); }

std::string original_plus_ocr(const Post& post) {
  if (post.original_text.empty()) return post.ocr_text.value_or("");
  if (!has_text(post.ocr_text)) return post.original_text;
  return post.original_text + "\n" + *post.ocr_text;
}

}  // namespace

std::string select_text(const Post& post, const TextSelector& selector) {
  std::string out;
  switch (selector.mode) {
    case TextMode::original:
      // OCR-only posts have nothing else to offer.
      out = post.original_text.empty() ? post.ocr_text.value_or("") : post.original_text;
      break;
    case TextMode::original_plus_ocr:
      out = original_plus_ocr(post);
      break;
    case TextMode::translated_with_fallback:
      out = has_text(post.translated_text) ? *post.translated_text : original_plus_ocr(post);
      break;
  }
  if (out.empty()) throw EmptyTextError(post.id);
  return out;
}

std::string select_text(const FactCheck& fact_check, const TextSelector& selector) {
  const bool translated =
      selector.mode == TextMode::translated_with_fallback && has_text(fact_check.translated_claim);
  const std::string& claim = translated ? *fact_check.translated_claim : fact_check.claim;
  std::string out;
  if (selector.include_title && has_text(fact_check.title)) {
    out = claim.empty() ? *fact_check.title : *fact_check.title + "\n" + claim;
  } else {
    out = claim;
  }
  if (out.empty()) throw EmptyTextError(fact_check.id);
  return out;
}

bool is_valid_language_code(std::string_view code) {
  return code.size() == 3 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

bool is_known_language(std::string_view code) {
  static constexpr std::array<std::string_view, 10> known{"eng", "fra", "deu", "por", "spa",
                                                         "tha", "msa", "ara", "tur", "pol"};
  return std::find(known.begin(), known.end(), code) != known.end();
}

Corpus::Corpus(std::vector<Post> posts, std::vector<FactCheck> fact_checks,
               std::vector<RelevancePair> pairs)
    : posts_(std::move(posts)), fact_checks_(std::move(fact_checks)), pairs_(std::move(pairs)) {
  post_index_.reserve(posts_.size());
  for (std::size_t i = 0; i < posts_.size(); ++i) {
    const auto& p = posts_[i];
    if (p.id.empty()) throw ValidationError(fmt::format("post #{} has an empty id", i + 1));
    if (p.original_text.empty() && !has_text(p.ocr_text)) {
      throw ValidationError(fmt::format("post \"{}\" has neither original nor OCR text", p.id));
    }
    if (!is_valid_language_code(p.language)) {
      throw ValidationError(
          fmt::format("post \"{}\" has invalid language code \"{}\"", p.id, p.language));
    }
    if (!post_index_.emplace(p.id, i).second) throw DuplicateIdError("post", p.id);
  }
  fact_check_index_.reserve(fact_checks_.size());
  for (std::size_t i = 0; i < fact_checks_.size(); ++i) {
    const auto& f = fact_checks_[i];
    if (f.id.empty()) throw ValidationError(fmt::format("fact-check #{} has an empty id", i + 1));
    if (f.claim.empty()) throw ValidationError(fmt::format("fact-check \"{}\" has an empty claim", f.id));
    if (!is_valid_language_code(f.language)) {
      throw ValidationError(
          fmt::format("fact-check \"{}\" has invalid language code \"{}\"", f.id, f.language));
    }
    if (!fact_check_index_.emplace(f.id, i).second) throw DuplicateIdError("fact-check", f.id);
  }
  for (const auto& pair : pairs_) {
    if (!post_index_.count(pair.post_id)) throw DanglingReferenceError("post", pair.post_id);
    if (!fact_check_index_.count(pair.fact_check_id)) {
      throw DanglingReferenceError("fact-check", pair.fact_check_id);
    }
    if (!gold_[pair.post_id].insert(pair.fact_check_id).second) {
      throw DuplicateIdError("pair", pair.post_id + "/" + pair.fact_check_id);
    }
  }
}

const Post* Corpus::find_post(std::string_view id) const {
  auto it = post_index_.find(std::string(id));
  return it == post_index_.end() ? nullptr : &posts_[it->second];
}

const FactCheck* Corpus::find_fact_check(std::string_view id) const {
  auto it = fact_check_index_.find(std::string(id));
  return it == fact_check_index_.end() ? nullptr : &fact_checks_[it->second];
}

std::size_t Corpus::post_index(std::string_view id) const {
  auto it = post_index_.find(std::string(id));
  if (it == post_index_.end()) throw DanglingReferenceError("post", std::string(id));
  return it->second;
}

std::size_t Corpus::fact_check_index(std::string_view id) const {
  auto it = fact_check_index_.find(std::string(id));
  if (it == fact_check_index_.end()) throw DanglingReferenceError("fact-check", std::string(id));
  return it->second;
}

const std::set<std::string>& Corpus::gold_for(std::string_view post_id) const {
  static const std::set<std::string> none;
  auto it = gold_.find(std::string(post_id));
  return it == gold_.end() ? none : it->second;
}

ValidationReport Corpus::validation_report() const {
  ValidationReport report;
  report.counts = counts();
  for (const auto& p : posts_) {
    if (!is_known_language(p.language)) ++report.unknown_languages[p.language];
    if (!gold_.count(p.id)) ++report.posts_without_pairs;
  }
  for (const auto& f : fact_checks_) {
    if (!is_known_language(f.language)) ++report.unknown_languages[f.language];
  }
  return report;
}

std::string ValidationReport::to_json() const {
  json j;
  j["posts"] = counts.posts;
  j["fact_checks"] = counts.fact_checks;
  j["pairs"] = counts.pairs;
  j["unknown_languages"] = unknown_languages;
  j["posts_without_pairs"] = posts_without_pairs;
  return j.dump(2);
}

namespace {

struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Fn>
void for_each_json_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path, line_no, e.what());
    }
    if (!record.is_object()) throw ParseError(path, line_no, "expected a JSON object");
    try {
      fn(record);
    } catch (const json::exception& e) {
      throw ParseError(path, line_no, e.what());
    } catch (const FieldError& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
}

std::string required_string(const json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end()) throw FieldError(fmt::format("missing field \"{}\"", key));
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  return normalize_whitespace(it->get<std::string>());
}

void put_optional(json& j, const char* key, const std::optional<std::string>& value) {
  if (value) j[key] = *value;
}

template <typename T, typename ToJson>
void write_jsonl(const std::string& path, const std::vector<T>& items, ToJson&& to_json) {
  std::string buf;
  for (const auto& item : items) {
    buf += to_json(item).dump();
    buf += '\n';
  }
  write_file_atomic(path, buf);
}

}  // namespace

std::vector<Post> read_posts(const std::string& path) {
  std::vector<Post> posts;
  for_each_json_line(path, [&](const json& r) {
    posts.push_back(Post{normalize_whitespace(required_string(r, "id")),
                         normalize_whitespace(required_string(r, "original_text")),
                         optional_string(r, "ocr_text"), optional_string(r, "translated_text"),
                         std::string(trim(required_string(r, "language")))});
  });
  return posts;
}

std::vector<FactCheck> read_fact_checks(const std::string& path) {
  std::vector<FactCheck> out;
  for_each_json_line(path, [&](const json& r) {
    out.push_back(FactCheck{normalize_whitespace(required_string(r, "id")),
                            normalize_whitespace(required_string(r, "claim")),
                            optional_string(r, "title"), optional_string(r, "translated_claim"),
                            std::string(trim(required_string(r, "language")))});
  });
  return out;
}

std::vector<RelevancePair> read_pairs(const std::string& path) {
  std::vector<RelevancePair> out;
  for_each_json_line(path, [&](const json& r) {
    out.push_back(RelevancePair{std::string(trim(required_string(r, "post_id"))),
                                std::string(trim(required_string(r, "fact_check_id")))});
  });
  return out;
}

Corpus load_corpus(const CorpusPaths& paths) {
  return Corpus(read_posts(paths.posts), read_fact_checks(paths.fact_checks), read_pairs(paths.pairs));
}

void write_posts(const std::string& path, const std::vector<Post>& posts) {
  write_jsonl(path, posts, [](const Post& p) {
    json j{{"id", p.id}, {"original_text", p.original_text}};
    put_optional(j, "ocr_text", p.ocr_text);
    put_optional(j, "translated_text", p.translated_text);
    j["language"] = p.language;
    return j;
  });
}

void write_fact_checks(const std::string& path, const std::vector<FactCheck>& fact_checks) {
  write_jsonl(path, fact_checks, [](const FactCheck& f) {
    json j{{"id", f.id}, {"claim", f.claim}};
    put_optional(j, "title", f.title);
    put_optional(j, "translated_claim", f.translated_claim);
    j["language"] = f.language;
    return j;
  });
}

void write_pairs(const std::string& path, const std::vector<RelevancePair>& pairs) {
  write_jsonl(path, pairs, [](const RelevancePair& p) {
    return json{{"post_id", p.post_id}, {"fact_check_id", p.fact_check_id}};
  });
}

void write_corpus(const Corpus& corpus, const CorpusPaths& paths) {
  write_posts(paths.posts, corpus.posts());
  write_fact_checks(paths.fact_checks, corpus.fact_checks());
  write_pairs(paths.pairs, corpus.pairs());
}

std::map<std::string, LanguageSlice> split_by_language(const Corpus& corpus, PoolMode pool) {
  std::map<std::string, LanguageSlice> slices;
  const auto& posts = corpus.posts();
  for (std::size_t i = 0; i < posts.size(); ++i) slices[posts[i].language].posts.push_back(i);

  const auto& fcs = corpus.fact_checks();
  for (auto& [language, slice] : slices) {
    for (std::size_t i = 0; i < fcs.size(); ++i) {
      if (pool == PoolMode::full || fcs[i].language == language) slice.fact_checks.push_back(i);
    }
  }
  const auto& pairs = corpus.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& language = posts[corpus.post_index(pairs[i].post_id)].language;
    slices[language].pairs.push_back(i);
  }
  return slices;
}

}  // namespace fcr
