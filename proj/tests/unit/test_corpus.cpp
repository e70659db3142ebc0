#include <doctest.h>

#include <filesystem>

#include "fcr/corpus.hpp"
#include "fcr/error.hpp"
#include "fcr/text_util.hpp"
#include "mocks.hpp"

using namespace fcr;
namespace fs = std::filesystem;

namespace {

Post post(std::string id, std::string text, std::optional<std::string> ocr = std::nullopt,
          std::optional<std::string> translated = std::nullopt, std::string lang = "eng") {
  return Post{std::move(id), std::move(text), std::move(ocr), std::move(translated), std::move(lang)};
}

FactCheck fc(std::string id, std::string claim, std::optional<std::string> title = std::nullopt,
             std::string lang = "eng") {
  return FactCheck{std::move(id), std::move(claim), std::move(title), std::nullopt, std::move(lang)};
}

}  // namespace

TEST_CASE("post text selection per mode") {
  const auto p = post("p", "hola", std::string("ocr words"), std::string("hello"));
  CHECK(select_text(p, {TextMode::original, false}) == "hola");
  CHECK(select_text(p, {TextMode::original_plus_ocr, false}) == "hola\nocr words");
  CHECK(select_text(p, {TextMode::translated_with_fallback, false}) == "hello");

  const auto untranslated = post("p", "hola", std::string("ocr"));
  CHECK(select_text(untranslated, {TextMode::translated_with_fallback, false}) == "hola\nocr");

  const auto ocr_only = post("p", "", std::string("only ocr"));
  CHECK(select_text(ocr_only, {TextMode::original, false}) == "only ocr");
  CHECK(select_text(ocr_only, {TextMode::original_plus_ocr, false}) == "only ocr");

  CHECK_THROWS_AS(select_text(post("p", ""), {TextMode::original, false}), EmptyTextError);
}

TEST_CASE("fact-check text selection") {
  auto f = fc("f", "the claim", std::string("Title"));
  CHECK(select_text(f, {TextMode::original, true}) == "Title\nthe claim");
  CHECK(select_text(f, {TextMode::original, false}) == "the claim");
  f.translated_claim = "la afirmación";
  CHECK(select_text(f, {TextMode::translated_with_fallback, true}) == "Title\nla afirmación");
  CHECK(select_text(f, {TextMode::original_plus_ocr, false}) == "the claim");
}

TEST_CASE("text and pool mode names") {
  for (auto m : {TextMode::original, TextMode::original_plus_ocr, TextMode::translated_with_fallback}) {
    CHECK(parse_text_mode(to_string(m)) == m);
  }
  CHECK(parse_pool_mode("same_language") == PoolMode::same_language);
  CHECK(parse_pool_mode("full") == PoolMode::full);
  CHECK_THROWS_AS(parse_text_mode("ocr"), ConfigError);
  CHECK_THROWS_AS(parse_pool_mode("half"), ConfigError);
}

TEST_CASE("language codes") {
  CHECK(is_valid_language_code("eng"));
  CHECK_FALSE(is_valid_language_code("en"));
  CHECK_FALSE(is_valid_language_code("ENG"));
  CHECK(is_known_language("tha"));
  CHECK_FALSE(is_known_language("xyz"));
}

TEST_CASE("corpus construction validates") {
  CHECK_NOTHROW(Corpus({post("p1", "a")}, {fc("f1", "c")}, {{"p1", "f1"}}));
  CHECK_THROWS_AS(Corpus({post("p1", "a"), post("p1", "b")}, {}, {}), DuplicateIdError);
  CHECK_THROWS_AS(Corpus({}, {fc("f1", "a"), fc("f1", "b")}, {}), DuplicateIdError);
  CHECK_THROWS_AS(Corpus({post("p1", "a")}, {fc("f1", "c")}, {{"p1", "f1"}, {"p1", "f1"}}), DuplicateIdError);
  CHECK_THROWS_AS(Corpus({post("p1", "a")}, {fc("f1", "c")}, {{"p2", "f1"}}), DanglingReferenceError);
  CHECK_THROWS_AS(Corpus({post("p1", "a")}, {fc("f1", "c")}, {{"p1", "f9"}}), DanglingReferenceError);
  CHECK_THROWS_AS(Corpus({post("p1", "")}, {}, {}), ValidationError);
  CHECK_THROWS_AS(Corpus({}, {fc("f1", "")}, {}), ValidationError);
  CHECK_THROWS_AS(Corpus({post("p1", "a", {}, {}, "English")}, {}, {}), ValidationError);
  CHECK_THROWS_AS(Corpus({post("", "a")}, {}, {}), ValidationError);
}

TEST_CASE("corpus lookups, gold sets and report") {
  const Corpus c({post("p1", "a"), post("p2", "b", {}, {}, "xyz")},
                 {fc("f1", "c"), fc("f2", "d", {}, "spa")}, {{"p1", "f1"}, {"p1", "f2"}});
  CHECK(c.find_post("p2")->original_text == "b");
  CHECK(c.find_post("nope") == nullptr);
  CHECK(c.fact_check_index("f2") == 1);
  CHECK(c.gold_for("p1") == std::set<std::string>{"f1", "f2"});
  CHECK(c.gold_for("p2").empty());
  const auto report = c.validation_report();
  CHECK(report.counts == CorpusCounts{2, 2, 2});
  CHECK(report.posts_without_pairs == 1);
  CHECK(report.unknown_languages.at("xyz") == 1);
  CHECK(report.to_json().find("\"posts_without_pairs\": 1") != std::string::npos);
}

TEST_CASE("JSONL round trip normalizes whitespace") {
  const auto dir = testing::temp_dir("corpus");
  const CorpusPaths paths{dir + "/p.jsonl", dir + "/f.jsonl", dir + "/pairs.jsonl"};
  const Corpus c({post("p1", "hola  mundo", std::string("ocr"), std::string("hello world"), "spa")},
                 {fc("f1", "claim", std::string("title"))}, {{"p1", "f1"}});
  write_corpus(c, paths);
  const auto back = load_corpus(paths);
  auto expected = c.posts()[0];
  expected.original_text = "hola mundo";
  CHECK(back.posts()[0] == expected);
  CHECK(back.fact_checks()[0] == c.fact_checks()[0]);
  CHECK(back.pairs() == c.pairs());

  write_file_atomic(paths.posts, "{\"id\":\"p\",\"original_text\":\"a \\t b\\n  c\",\"language\":\"eng\"}\n");
  CHECK(read_posts(paths.posts)[0].original_text == "a b\nc");
  fs::remove_all(dir);
}

TEST_CASE("JSONL errors carry line numbers") {
  const auto dir = testing::temp_dir("corpus-bad");
  const auto path = dir + "/p.jsonl";
  write_file_atomic(path, "{\"id\":\"p1\",\"original_text\":\"a\",\"language\":\"eng\"}\n\n{\"id\":\"p2\"}\n");
  try {
    read_posts(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  write_file_atomic(path, "{not json\n");
  CHECK_THROWS_AS(read_posts(path), ParseError);
  write_file_atomic(path, "[1,2]\n");
  CHECK_THROWS_AS(read_pairs(path), ParseError);
  write_file_atomic(path, "{\"id\":7,\"claim\":\"c\",\"language\":\"eng\"}\n");
  CHECK_THROWS_AS(read_fact_checks(path), ParseError);
  CHECK_THROWS_AS(read_posts(dir + "/absent.jsonl"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("split_by_language slices the pool") {
  const Corpus c({post("p1", "a"), post("p2", "b", {}, {}, "spa")},
                 {fc("f1", "c"), fc("f2", "d", {}, "spa"), fc("f3", "e", {}, "spa")},
                 {{"p1", "f1"}, {"p2", "f2"}});
  const auto same = split_by_language(c, PoolMode::same_language);
  CHECK(same.at("eng").fact_checks == std::vector<std::size_t>{0});
  CHECK(same.at("spa").fact_checks == std::vector<std::size_t>{1, 2});
  CHECK(same.at("spa").pairs == std::vector<std::size_t>{1});
  const auto full = split_by_language(c, PoolMode::full);
  CHECK(full.at("eng").fact_checks.size() == 3);
}
