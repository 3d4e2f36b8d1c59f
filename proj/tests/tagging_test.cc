#include <array>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.h"
#include "nlidb/error.h"
#include "nlidb/mappers.h"
#include "nlidb/text.h"
#include "nlidb/value_index.h"

namespace nlidb {

namespace {

const Schema &TvSchema() { return fixture::TvBundle()->schema; }

std::string Tsv(const std::vector<std::array<std::string, 3>> &rows) {
  std::string out = "table\tcolumn\tvalue\n";
  for (const auto &r : rows) out += r[0] + "\t" + r[1] + "\t" + r[2] + "\n";
  return out;
}

}  // namespace

TEST_CASE("value index postings and document frequency") {
  const ValueIndex index = BuildValueIndex(Tsv({{"tv_series", "title", "House of Cards"},
                                                {"tv_series", "title", "The House"},
                                                {"company", "name", "House Films"}}));
  CHECK(index.row_count() == 3);
  const auto *house = index.Lookup("house");
  REQUIRE(house != nullptr);
  REQUIRE(house->size() == 2);
  CHECK(house->front().Tag() == "tv_series.title");
  CHECK(house->front().tf == 2);
  CHECK(house->back().tf == 1);
  CHECK(index.DocumentFrequency("house") == 2);
  REQUIRE(index.Lookup("house of cards") != nullptr);
  CHECK(index.Lookup("house of cards")->front().Tag() == "tv_series.title");
  CHECK(index.Lookup("Cards") == nullptr);  // lookups take normalized n-grams
  CHECK(index.Lookup("cards") != nullptr);
  CHECK(index.values().at("tv_series.title") ==
        std::vector<std::string>{"House of Cards", "The House"});
}

TEST_CASE("a value repeated inside one row counts once") {
  const ValueIndex index = BuildValueIndex(Tsv({{"tv_series", "title", "Bad Bad Bad"}}));
  CHECK(index.Lookup("bad")->front().tf == 1);
  CHECK(index.Lookup("bad bad")->front().tf == 1);
}

TEST_CASE("value file errors carry the line number") {
  try {
    BuildValueIndex("table\tcolumn\tvalue\ntv_series\ttitle\tOk\n\ntv_series\ttitle\n");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(BuildValueIndex("t\tc\n"), ParseError);
  const ValueIndex stray = BuildValueIndex(Tsv({{"tv_series", "msid", "1"}}));
  CHECK_THROWS_AS(ValidateIndexAgainstSchema(stray, TvSchema()), Error);
}

TEST_CASE("tf-idf mapper prefers the column with the larger tf") {
  // "Crown" appears in five title rows and two company rows.
  std::vector<std::array<std::string, 3>> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({"tv_series", "title", "Crown " + std::to_string(i)});
  for (int i = 0; i < 2; ++i) rows.push_back({"company", "name", "Crown Ltd " + std::to_string(i)});
  const ValueIndex index = BuildValueIndex(Tsv(rows));
  const TaggedQuery q = MapValuesTfidf(index, {"the", "Crown", "series"}, DefaultStopwords());
  CHECK(q.type_tags[1] == TypeTag::kValue);
  CHECK(q.schema_tags[1] == "tv_series.title");
  CHECK(q.distributions[1].at("tv_series.title") == doctest::Approx(5.0 / 7.0));
  CHECK(q.distributions[1].at("company.name") == doctest::Approx(2.0 / 7.0));
  CHECK(q.type_tags[0] == TypeTag::kOther);
  CHECK(q.type_tags[2] == TypeTag::kOther);
  ValidateTaggedQuery(q, "test");
}

TEST_CASE("trigram hit suppresses its constituent grams") {
  const ValueIndex index = BuildValueIndex(Tsv({{"tv_series", "title", "House of Cards"},
                                                {"company", "name", "Cards Inc"},
                                                {"company", "name", "Cards Co"},
                                                {"director", "nationality", "House"}}));
  const auto tokens = TokenTexts("series House of Cards now");
  const TaggedQuery q = MapValuesTfidf(index, tokens, DefaultStopwords());
  for (size_t i = 1; i <= 3; ++i) {
    CHECK(q.schema_tags[i] == "tv_series.title");
    CHECK(q.distributions[i].size() == 1);
  }
  CHECK(q.type_tags[4] == TypeTag::kOther);
  // Without the middle word the unigrams resolve on their own.
  const TaggedQuery split = MapValuesTfidf(index, {"House", "Cards"}, DefaultStopwords());
  CHECK(split.schema_tags[0] == "director.nationality");
  CHECK(split.schema_tags[1] == "company.name");
}

TEST_CASE("stopword-only spans are never looked up") {
  const ValueIndex index = BuildValueIndex(Tsv({{"tv_series", "title", "Of The"},
                                                {"tv_series", "title", "The Crown"}}));
  const TaggedQuery q = MapValuesTfidf(index, {"of", "the", "x"}, DefaultStopwords());
  CHECK(q.type_tags[0] == TypeTag::kOther);
  CHECK(q.type_tags[1] == TypeTag::kOther);
  const TaggedQuery crown = MapValuesTfidf(index, {"the", "Crown"}, DefaultStopwords());
  CHECK(crown.schema_tags[0] == "tv_series.title");
  CHECK(crown.schema_tags[1] == "tv_series.title");
}

TEST_CASE("masked tokens never match") {
  const ValueIndex index = BuildValueIndex(Tsv({{"tv_series", "title", "House of Cards"}}));
  const std::vector<std::string> tokens{"House", std::string(kMaskToken), "Cards"};
  const TaggedQuery q = MapValuesTfidf(index, tokens, DefaultStopwords());
  CHECK(q.type_tags[1] == TypeTag::kOther);
  CHECK(q.schema_tags[0] == "tv_series.title");
  const TaggedQuery lex = MapRelationsLexical(TvSchema(), {std::string(kMaskToken)}, 0.0);
  CHECK(lex.type_tags[0] == TypeTag::kOther);
}

TEST_CASE("lexical mapper matches table and column names") {
  const TaggedQuery q = MapRelationsLexical(TvSchema(), {"director", "titles", "nationalty", "Who"}, 0.8);
  CHECK(q.type_tags[0] == TypeTag::kTable);
  CHECK(q.schema_tags[0] == "director");
  CHECK(q.distributions[0].at("director") == doctest::Approx(1.0));
  CHECK(q.type_tags[1] == TypeTag::kAttr);
  CHECK(q.schema_tags[1] == "tv_series.title");
  CHECK(q.schema_tags[2] == "director.nationality");
  CHECK(q.type_tags[3] == TypeTag::kOther);
  // Key columns are never candidates.
  CHECK(MapRelationsLexical(TvSchema(), {"msid"}, 0.5).schema_tags[0] != "tv_series.msid");
  CHECK_THROWS_AS(MapRelationsLexical(TvSchema(), {"x"}, 1.5), Error);
}

TEST_CASE("synonyms take precedence over edit distance") {
  SynonymTable syn{{"series", {TypeTag::kTable, "tv_series"}},
                   {"produced", {TypeTag::kTableRef, "copyright"}}};
  const TaggedQuery q = MapRelationsLexical(TvSchema(), {"Series", "produced"}, 0.8, syn);
  CHECK(q.type_tags[0] == TypeTag::kTable);
  CHECK(q.schema_tags[0] == "tv_series");
  CHECK(q.type_tags[1] == TypeTag::kTableRef);
  CHECK(q.schema_tags[1] == "copyright");
  CHECK(MapRelationsLexical(TvSchema(), {"series"}, 0.8).type_tags[0] == TypeTag::kOther);
}

TEST_CASE("cosine on a four-dimensional store") {
  const EmbeddingStore store = LoadEmbeddings(
      "3 4\n"
      "show 1 0 1 0\n"
      "series 1 0 0.8 0.2\n"
      "firm 0 1 0 0\n");
  const Vector &a = *store.Find("show");
  const Vector &b = *store.Find("series");
  // (1 + 0.8) / (sqrt(2) * sqrt(1 + 0.64 + 0.04))
  const double expected = 1.8 / (std::sqrt(2.0) * std::sqrt(1.68));
  CHECK(Cosine(a, b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(Cosine(a, *store.Find("firm")) == doctest::Approx(0.0));
  CHECK(Cosine(Vector{0, 0, 0, 0}, a) == 0.0);
  CHECK_THROWS_AS(Cosine(Vector{1, 2}, a), Error);
  CHECK(store.Find("SHOW") == store.Find("show"));
  const std::vector<std::string> words{"show", "firm", "unknown"};
  const auto mean = store.Phrase(words);
  REQUIRE(mean);
  CHECK((*mean)[0] == doctest::Approx(0.5));
  CHECK((*mean)[1] == doctest::Approx(0.5));
}

TEST_CASE("embedding file errors") {
  CHECK_THROWS_AS(LoadEmbeddings("2 3\na 1 2 3\n"), ParseError);
  CHECK_THROWS_AS(LoadEmbeddings("1 3\na 1 2\n"), ParseError);
  CHECK_THROWS_AS(LoadEmbeddings("1 2\na 1 x\n"), ParseError);
  CHECK_THROWS_AS(LoadEmbeddings(""), ParseError);
}

TEST_CASE("embedding mapper uses the best target above threshold") {
  const EmbeddingStore store = LoadEmbeddings(
      "6 4\n"
      "show 1 0 1 0\n"
      "tv 1 0 0.9 0\n"
      "series 1 0 1 0.1\n"
      "filmmaker 0 1 0 1\n"
      "director 0 1 0 0.9\n"
      "banana 0 0 0 1\n");
  const ValueIndex index;
  const TaggedQuery q = MapWithEmbeddings(store, TvSchema(), index, {"show", "filmmaker", "banana", "zzz"}, 0.9);
  CHECK(q.type_tags[0] == TypeTag::kTable);
  CHECK(q.schema_tags[0] == "tv_series");
  CHECK(q.schema_tags[1] == "director");
  CHECK(q.type_tags[2] == TypeTag::kOther);
  CHECK(q.type_tags[3] == TypeTag::kOther);
  ValidateTaggedQuery(q, "test");
  CHECK_THROWS_AS(MapWithEmbeddings(store, TvSchema(), index, {"show"}, 0.0), Error);
}

TEST_CASE("composition takes the first tagged layer and then cond words") {
  const std::vector<std::string> tokens{"budget", "greater", "than", "House"};
  TaggedQuery values = TaggedQuery::AllOther(tokens);
  values.Set(3, TypeTag::kValue, "tv_series.title", PointMass("tv_series.title"));
  TaggedQuery lexical = TaggedQuery::AllOther(tokens);
  lexical.Set(0, TypeTag::kAttr, "movie.budget", PointMass("movie.budget"));
  lexical.Set(3, TypeTag::kTable, "house", PointMass("house"));
  const TaggedQuery out = ComposeTagSequence({values, lexical}, DefaultCondLexicon());
  CHECK(out.schema_tags[0] == "movie.budget");
  CHECK(out.type_tags[1] == TypeTag::kCond);
  CHECK(out.schema_tags[2] == "COND");
  CHECK(out.type_tags[3] == TypeTag::kValue);
  TaggedQuery other = TaggedQuery::AllOther({"x"});
  CHECK_THROWS_AS(ComposeTagSequence({values, other}, {}), Error);
}

TEST_CASE("gold loader round-trips the director query bit for bit") {
  const std::string text = std::string("# sql: ") + fixture::kDirectorSql + "\n" + fixture::kDirectorBlock;
  const auto queries = LoadGoldTags(text);
  REQUIRE(queries.size() == 1);
  const TaggedQuery &q = queries[0].tags;
  REQUIRE(q.size() == 13);
  CHECK(q.type_tags[3] == TypeTag::kTable);
  CHECK(q.schema_tags[6] == "tv_series");
  CHECK(q.schema_tags[8] == "tv_series.title");
  CHECK(q.type_tags[10] == TypeTag::kTableRef);
  CHECK(q.schema_tags[12] == "company.name");
  CHECK(queries[0].sql == std::string(fixture::kDirectorSql));
  CHECK(queries[0].line == 2);  // first token line
  CHECK(FormatGoldTags(queries) == text);
  ValidateTaggedQuery(q, "test");
  ValidateAgainstSchema(q, TvSchema(), "test");
}

TEST_CASE("gold loader rejects malformed blocks") {
  auto line_of = [](const std::string &text) -> size_t {
    try {
      LoadGoldTags(text);
    } catch (const ParseError &e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("a\tO\tO\nb\tO\n") == 2);
  CHECK(line_of("a\tNOUN\tO\n") == 1);
  CHECK(line_of("a\tVALUE\tcompany\n") == 1);
  CHECK(line_of("a\tTABLE\tcompany.name\n") == 1);
  CHECK(line_of("a\tO\tcompany\n") == 1);
  CHECK(line_of("a\tO\tO\n# note\n") == 2);
  CHECK(LoadGoldTags("\n\n").empty());
  TaggedQuery bad = LoadGoldTags("x\tTABLE\tnope\n")[0].tags;
  CHECK_THROWS_AS(ValidateAgainstSchema(bad, TvSchema(), "test"), Error);
}

TEST_CASE("auto tagger reproduces the gold tags of the director query") {
  const auto bundle = fixture::TvBundle();
  const auto gold = LoadGoldTags(fixture::kDirectorBlock)[0].tags;
  const TaggedQuery q = bundle->tagger->Tag(TokenTexts(fixture::kDirectorQuery));
  CHECK(q.type_tags == gold.type_tags);
  CHECK(q.schema_tags == gold.schema_tags);
  ValidateTaggedQuery(q, "test");
}

TEST_CASE("context reweighting resolves a title shared by two tables") {
  const auto bundle = fixture::MovieBundle();
  const TaggedQuery q = bundle->tagger->Tag(TokenTexts(fixture::kDirectorQuery));
  CHECK(q.schema_tags[7] == "tv_series.title");
  CHECK(q.distributions[7].at("tv_series.title") == doctest::Approx(2.0 / 3.0));
  CHECK(q.distributions[7].at("movie.movie_title") == doctest::Approx(1.0 / 3.0));
  // Without the word "series" the tie breaks on the tag name.
  auto tokens = TokenTexts(fixture::kDirectorQuery);
  tokens[6] = std::string(kMaskToken);
  const TaggedQuery masked = bundle->tagger->Tag(tokens);
  CHECK(masked.distributions[7].at("tv_series.title") == doctest::Approx(0.5));
  CHECK(masked.schema_tags[7] == "movie.movie_title");
}

TEST_CASE("auto tagger distributions are proper") {
  const auto bundle = fixture::MovieBundle();
  for (const auto &gold : bundle->corpus) {
    const TaggedQuery q = bundle->tagger->Tag(gold.tags.tokens);
    ValidateTaggedQuery(q, "test");
    ValidateAgainstSchema(q, bundle->schema, "test");
    for (const auto &d : q.distributions) {
      double total = 0.0;
      for (const auto &[tag, p] : d) total += p;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("tag pair consistency") {
  CHECK_FALSE(CheckTagPair(TypeTag::kValue, "company.name"));
  CHECK(CheckTagPair(TypeTag::kValue, "company"));
  CHECK_FALSE(CheckTagPair(TypeTag::kTableRef, "copyright"));
  CHECK(CheckTagPair(TypeTag::kCond, "O"));
  CHECK_FALSE(CheckTagPair(TypeTag::kCond, "COND"));
  CHECK_FALSE(CheckTagPair(TypeTag::kOther, "O"));
  CHECK(std::size(kAllTypeTags) == 7);
  for (TypeTag t : kAllTypeTags) CHECK(ParseTypeTag(TypeTagName(t)) == t);
  CHECK(TableOfTag("company.name") == "company");
  CHECK(TableOfTag("company") == "company");
  CHECK(TableOfTag("O").empty());
  CHECK(ArgMax({{"b", 0.5}, {"a", 0.5}}) == "a");
}

}  // namespace nlidb
