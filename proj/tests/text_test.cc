#include "doctest.h"
#include "fixtures.h"
#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

TEST_CASE("tokenizer drops punctuation and keeps case") {
  const auto tokens = Tokenize(fixture::kDirectorQuery);
  REQUIRE(tokens.size() == 13);
  CHECK(tokens.front().text == "Who");
  CHECK(tokens.back().text == "Netflix");
  CHECK(tokens[7].text == "House");
  CHECK(tokens[7].offset == std::string_view(fixture::kDirectorQuery).find("House"));
}

TEST_CASE("tokenizer removes characters rather than splitting on them") {
  CHECK(TokenTexts("don't (stop) \"now\": ok!") ==
        std::vector<std::string>{"dont", "stop", "now", "ok"});
  CHECK(TokenTexts("  \t\n ").empty());
  CHECK(TokenTexts("a.b,c") == std::vector<std::string>{"abc"});
}

TEST_CASE("lowercasing leaves multibyte text alone") {
  CHECK(ToLower("TV_Series") == "tv_series");
  CHECK(ToLower("ÜBER") == "Über");
  CHECK(ToLower("\xE2\x90\x80X") == "\xE2\x90\x80x");
}

TEST_CASE("list helpers") {
  CHECK(SplitList(" a, b ,,c ", ',') == std::vector<std::string>{"a", "b", "c"});
  CHECK(Join({"a", "b"}, ", ") == "a, b");
  CHECK(Trim("  x y \t") == "x y");
}

TEST_CASE("edit distance against hand-computed values") {
  CHECK(EditDistance("kitten", "sitting") == 3);
  CHECK(EditDistance("", "abc") == 3);
  CHECK(EditDistance("flaw", "lawn") == 2);
  // One substitution over eight characters.
  CHECK(LexicalSimilarity("director", "directer") == doctest::Approx(7.0 / 8.0));
  CHECK(LexicalSimilarity("Director", "director") == 1.0);
  CHECK(LexicalSimilarity("", "") == 1.0);
  CHECK(LexicalSimilarity("series", "tv_series") == doctest::Approx(1.0 - 3.0 / 9.0));
}

TEST_CASE("reading a missing file raises an io error") {
  try {
    ReadFile("/nonexistent/file");
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.stage() == "io");
  }
}

}  // namespace nlidb
