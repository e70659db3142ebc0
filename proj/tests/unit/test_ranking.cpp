#include <doctest.h>

#include <sstream>

#include "fcr/error.hpp"
#include "fcr/ranking.hpp"

using namespace fcr;

TEST_CASE("stage names round-trip") {
  for (auto s : {Stage::dense, Stage::sparse, Stage::reranked, Stage::fused}) {
    CHECK(parse_stage(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_stage("bm42"), ValidationError);
}

TEST_CASE("sort_entries orders by score then id") {
  std::vector<RankedDoc> e{{"b", 0.5}, {"a", 0.5}, {"c", 0.9}, {"d", 0.1}};
  sort_entries(e);
  CHECK(e[0].doc_id == "c");
  CHECK(e[1].doc_id == "a");
  CHECK(e[2].doc_id == "b");
  CHECK(e[3].doc_id == "d");
}

TEST_CASE("check_ranking rejects unsorted and duplicate entries") {
  Ranking r{"q", {{"a", 0.2}, {"b", 0.5}}, Stage::dense};
  CHECK_THROWS_AS(check_ranking(r), ValidationError);
  r.entries = {{"a", 0.5}, {"a", 0.2}};
  CHECK_THROWS_AS(check_ranking(r), ValidationError);
  r.entries = {{"a", 0.5}, {"b", 0.2}};
  CHECK_NOTHROW(check_ranking(r));
}

TEST_CASE("truncated keeps the head") {
  Ranking r{"q", {{"a", 3}, {"b", 2}, {"c", 1}}, Stage::fused};
  CHECK(r.truncated(2).entries.size() == 2);
  CHECK(r.truncated(10).entries.size() == 3);
  CHECK(r.truncated(2).stage == Stage::fused);
}

TEST_CASE("run TSV round-trips scores exactly") {
  std::vector<Ranking> runs{
      {"q1", {{"d1", 0.1 + 0.2}, {"d2", 1.0 / 3.0}, {"d3", 1e-17}}, Stage::dense},
      {"q0", {{"x", 2.5}}, Stage::reranked},
  };
  sort_entries(runs[0].entries);
  std::ostringstream out;
  write_run(out, runs);
  std::istringstream in(out.str());
  const auto back = read_run(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == runs[0]);
  CHECK(back[1] == runs[1]);
  CHECK(out.str().find("q0\tx\t1\t2.5\treranked\n") != std::string::npos);
}

TEST_CASE("read_run sorts rows by rank and reports bad lines") {
  std::istringstream in("q\tb\t2\t0.5\tdense\nq\ta\t1\t0.9\tdense\n");
  const auto r = read_run(in);
  REQUIRE(r.size() == 1);
  CHECK(r[0].entries[0].doc_id == "a");

  std::istringstream bad("q\ta\t1\t0.9\tdense\nq\tb\tx\t0.5\tdense\n");
  try {
    read_run(bad, "bad.tsv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream short_row("q\ta\t1\n");
  CHECK_THROWS_AS(read_run(short_row), ParseError);
}

TEST_CASE("read_run_file reports a missing file") {
  CHECK_THROWS_AS(read_run_file("/nonexistent/run.tsv"), IoError);
}
