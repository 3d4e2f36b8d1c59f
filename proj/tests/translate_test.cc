#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.h"
#include "nlidb/error.h"
#include "nlidb/mappers.h"
#include "nlidb/sql_text.h"
#include "nlidb/text.h"
#include "nlidb/translate.h"
#include "oracles.h"

namespace nlidb {

namespace {

TaggedQuery DirectorTags() { return LoadGoldTags(fixture::kDirectorBlock)[0].tags; }

// Builds a query from "token/TYPE/tag" words; bare words are O.
TaggedQuery Tagged(const std::string &spec) {
  TaggedQuery q;
  for (const auto &word : SplitList(spec, ' ')) {
    const auto first = word.find('/');
    if (first == std::string::npos) {
      q.tokens.push_back(word);
      q.type_tags.push_back(TypeTag::kOther);
      q.schema_tags.push_back("O");
      continue;
    }
    const auto second = word.find('/', first + 1);
    q.tokens.push_back(word.substr(0, first));
    q.type_tags.push_back(*ParseTypeTag(word.substr(first + 1, second - first - 1)));
    q.schema_tags.push_back(second == std::string::npos ? "COND" : word.substr(second + 1));
  }
  for (const auto &t : q.schema_tags) q.distributions.push_back(PointMass(t));
  return q;
}

std::vector<std::string> Rendered(const std::vector<JoinCondition> &conditions) {
  std::vector<std::string> out;
  for (const auto &c : conditions) out.push_back(c.Left() + "=" + c.Right());
  return out;
}

}  // namespace

TEST_CASE("table set of the director query") {
  const auto bundle = fixture::TvBundle();
  CHECK(CollectTableSet(DirectorTags(), bundle->schema) ==
        std::vector<std::string>{"director", "tv_series", "copyright", "company"});
}

TEST_CASE("empty table set fails loudly") {
  const auto bundle = fixture::TvBundle();
  try {
    CollectTableSet(TaggedQuery::AllOther({"hello", "there"}), bundle->schema);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.stage() == "collect_table_set");
  }
  CHECK_THROWS_AS(CollectTableSet(Tagged("x/TABLE/nope"), bundle->schema), Error);
}

TEST_CASE("join relation for the director query") {
  const auto bundle = fixture::TvBundle();
  const auto &g = bundle->graph;
  const auto paths = ExtractJoinRelation(g, {"director", "tv_series", "copyright", "company"});
  REQUIRE(paths.size() == 2);
  CHECK(PathLabels(g, paths[0]) ==
        std::vector<std::string>{"tv_series", "msid", "copyright", "cid", "company"});
  CHECK(PathLabels(g, paths[1]) ==
        std::vector<std::string>{"tv_series", "msid", "directed_by", "did", "director"});
  CHECK(Rendered(DeriveJoinConditions(g, paths)) ==
        std::vector<std::string>{"tv_series.msid=copyright.msid", "copyright.cid=company.cid",
                                 "tv_series.msid=directed_by.msid",
                                 "directed_by.did=director.did"});
  const JoinPlan plan = PlanJoins(g, {"director", "tv_series", "copyright", "company"});
  CHECK(plan.intermediate_tables == std::vector<std::string>{"directed_by"});
}

TEST_CASE("single covering path is returned alone") {
  const auto bundle = fixture::TvBundle();
  const auto &g = bundle->graph;
  const auto paths = ExtractJoinRelation(g, {"director", "tv_series"});
  REQUIRE(paths.size() == 1);
  CHECK(PathLabels(g, paths[0]) ==
        std::vector<std::string>{"director", "did", "directed_by", "msid", "tv_series"});
  const auto one = ExtractJoinRelation(g, {"company"});
  REQUIRE(one.size() == 1);
  CHECK(one[0].length() == 0);
  CHECK(DeriveJoinConditions(g, one).empty());
}

TEST_CASE("join relation errors") {
  const Schema s("split", {{"a", {{"x", DataType::kText, false}}}, {"b", {{"y", DataType::kText, false}}},
                           {"c", {{"x", DataType::kText, false}}}},
                 {});
  const SchemaGraph g = ExtractGraph(s);
  try {
    ExtractJoinRelation(g, {"a", "b"});
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.stage() == "extract_join_relation");
    CHECK(std::string(e.what()).find("\"b\"") == std::string::npos);
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }
  CHECK_THROWS_AS(ExtractJoinRelation(g, {"a", "zzz"}), Error);
  CHECK_THROWS_AS(ExtractJoinRelation(g, {}), Error);
  CHECK(ExtractJoinRelation(g, {"a", "c"}).size() == 1);
}

TEST_CASE("join conditions reject malformed paths") {
  const auto bundle = fixture::TvBundle();
  const auto &g = bundle->graph;
  const NodeIndex director = *g.FindTable("director");
  const NodeIndex did = *g.FindAttr("did");
  const NodeIndex msid = *g.FindAttr("msid");
  CHECK_THROWS_AS(DeriveJoinConditions(g, {GraphPath{{director, did}}}), Error);
  CHECK_THROWS_AS(DeriveJoinConditions(g, {GraphPath{{director, msid, director}}}), Error);
  CHECK_THROWS_AS(DeriveJoinConditions(g, {GraphPath{{did}}}), Error);
}

TEST_CASE("shared join steps are emitted once") {
  const auto bundle = fixture::TvBundle();
  const auto &g = bundle->graph;
  auto a = FindShortestPaths(g, "director", "tv_series");
  auto b = FindShortestPaths(g, "tv_series", "director");
  CHECK(DeriveJoinConditions(g, {a[0], b[0]}).size() == 2);
}

TEST_CASE("where conditions merge value runs") {
  const auto w = ExtractWhereConditions(DirectorTags());
  REQUIRE(w.size() == 2);
  CHECK(w[0].column == "tv_series.title");
  CHECK(w[0].literal == "House of Cards");
  CHECK(w[0].op == CompareOp::kEq);
  CHECK(w[0].first_token == 7);
  CHECK(w[0].last_token == 9);
  CHECK(w[1].column == "company.name");
  CHECK(w[1].literal == "Netflix");
}

TEST_CASE("adjacent values of different columns stay apart") {
  const auto w = ExtractWhereConditions(Tagged("Comedy/VALUE/genre.genre_name 1994/VALUE/movie.release_year"));
  REQUIRE(w.size() == 2);
  CHECK(w[0].literal == "Comedy");
  CHECK(w[1].literal == "1994");
}

TEST_CASE("merging is idempotent for where extraction") {
  const TaggedQuery q = DirectorTags();
  const TaggedQuery merged = MergeConsecutiveMappings(q);
  CHECK(merged.size() == 11);
  CHECK(merged.tokens[7] == "House of Cards");
  CHECK(MergeConsecutiveMappings(merged).tokens == merged.tokens);
  auto key = [](const std::vector<WhereCondition> &ws) {
    std::vector<std::string> out;
    for (const auto &w : ws) out.push_back(w.column + std::string(CompareOpText(w.op)) + w.literal);
    return out;
  };
  CHECK(key(ExtractWhereConditions(merged)) == key(ExtractWhereConditions(q)));
}

TEST_CASE("comparison words only change operators when enabled") {
  const TaggedQuery q =
      Tagged("movies/TABLE/movie released/ATTR/movie.release_year after/COND 2000/VALUE/movie.release_year");
  CHECK(ExtractWhereConditions(q)[0].op == CompareOp::kEq);
  WhereOptions on;
  on.cond_operators = true;
  CHECK(ExtractWhereConditions(q, on)[0].op == CompareOp::kGt);
  CHECK(ExtractWhereConditions(Tagged("at/COND least/COND 5/VALUE/tv_series.num_of_seasons"), on)[0].op ==
        CompareOp::kGe);
  CHECK(ExtractWhereConditions(Tagged("fewer/COND than/COND 5/VALUE/tv_series.num_of_seasons"), on)[0].op ==
        CompareOp::kLt);
  CHECK(ExtractWhereConditions(Tagged("most/COND x 5/VALUE/tv_series.num_of_seasons"), on)[0].op ==
        CompareOp::kEq);
}

TEST_CASE("aggregate windowing for every lexicon") {
  const AggregateLexicons lex;
  const std::pair<std::string, AggregateFunc> cases[] = {
      {"count", AggregateFunc::kCount}, {"many", AggregateFunc::kCount},
      {"number", AggregateFunc::kCount}, {"total", AggregateFunc::kSum},
      {"sum", AggregateFunc::kSum},      {"average", AggregateFunc::kAvg},
      {"avg", AggregateFunc::kAvg},      {"mean", AggregateFunc::kAvg}};
  for (const auto &[keyword, func] : cases) {
    for (size_t window = 1; window <= 4; ++window) {
      for (size_t distance = 1; distance <= window + 1; ++distance) {
        std::string spec = keyword;
        for (size_t k = 1; k < distance; ++k) spec += " x";
        spec += " movies/TABLE/movie";
        const auto clause = ExtractAggregateClause(Tagged(spec), window, lex);
        if (distance <= window) {
          REQUIRE(clause);
          CHECK(clause->func == func);
          CHECK(clause->anchor_index == distance);
          CHECK(clause->keyword_index == 0);
        } else {
          CHECK_FALSE(clause);
        }
      }
    }
  }
  CHECK_THROWS_AS(ExtractAggregateClause(Tagged("many movies/TABLE/movie"), 0, lex), Error);
}

TEST_CASE("aggregate keyword after the anchor or on a value does not count") {
  CHECK_FALSE(ExtractAggregateClause(Tagged("movies/TABLE/movie total"), 3));
  CHECK_FALSE(ExtractAggregateClause(Tagged("total Inception/VALUE/movie.movie_title"), 3));
  const auto c = ExtractAggregateClause(Tagged("What is the total budget/ATTR/movie.budget"), 3);
  REQUIRE(c);
  CHECK(c->func == AggregateFunc::kSum);
  CHECK(c->anchor_schema == "movie.budget");
  // The leftmost keyword in the window decides.
  const auto mixed = ExtractAggregateClause(Tagged("average number movies/TABLE/movie"), 3);
  REQUIRE(mixed);
  CHECK(mixed->func == AggregateFunc::kAvg);
}

TEST_CASE("director query translates to the expected SQL") {
  const auto bundle = fixture::TvBundle();
  const Translation t = Translate(DirectorTags(), bundle->schema, bundle->graph);
  CHECK(t.sql == fixture::kDirectorSql);
  std::vector<std::string> from;
  for (const auto &f : t.query.from) from.push_back(f.table);
  CHECK(from == std::vector<std::string>{"tv_series", "copyright", "company", "directed_by", "director"});
  CHECK(t.query.where.size() == 6);
  CHECK(t.query.select == "*");
  CHECK(CanonicalizeSql(t.sql).text == CanonicalizeSql(fixture::kDirectorSql).text);
}

TEST_CASE("every SQL part carries one reason") {
  const auto bundle = fixture::TvBundle();
  const Translation t = Translate(DirectorTags(), bundle->schema, bundle->graph);
  const auto reasons = ExplainSql(t.query);
  CHECK(reasons.size() == t.query.from.size() + t.query.where.size());
  auto reason_of = [&](const std::string &part) {
    for (const auto &r : reasons) {
      if (r.part == part) return r.reason;
    }
    return std::string("<missing>");
  };
  CHECK(reason_of("FROM directed_by") ==
        "required table to connect 'tv_series' and 'director' through join");
  CHECK(reason_of("FROM tv_series") == "mapped from token 'series' tagged TABLE");
  CHECK(reason_of("FROM copyright") == "mapped from token 'produced' tagged TABLEREF");
  CHECK(reason_of("FROM company") == "table of column 'company.name' mapped from token 'Netflix'");
  CHECK(reason_of("WHERE tv_series.title = \"House of Cards\"") ==
        "value 'House of Cards' detected in tokens 8-10 for column 'tv_series.title'");
  CHECK(reason_of("WHERE tv_series.msid = copyright.msid") ==
        "join condition connecting 'tv_series' and 'copyright' through attribute 'msid'");

  SqlQuery broken = t.query;
  broken.from[0].reason.reset();
  CHECK_THROWS_AS(ExplainSql(broken), Error);
}

TEST_CASE("single table without values") {
  const auto bundle = fixture::TvBundle();
  const Translation t = Translate(Tagged("director/TABLE/director"), bundle->schema, bundle->graph);
  CHECK(t.sql == "SELECT * FROM director");
}

TEST_CASE("count anchored on a table") {
  const auto bundle = fixture::MovieBundle();
  const Translation t =
      Translate(Tagged("How many movies/TABLE/movie did Christopher/VALUE/director.director_name "
                       "Nolan/VALUE/director.director_name direct/TABLEREF/directs"),
                bundle->schema, bundle->graph);
  CHECK(t.query.select == "COUNT(*)");
  CHECK(t.sql.rfind("SELECT COUNT(*) FROM ", 0) == 0);
  CHECK(t.query.from.size() == 3);
  const auto reasons = ExplainSql(t.query);
  CHECK(reasons.front().part == "SELECT COUNT(*)");
  CHECK(reasons.front().reason ==
        "aggregate keyword 'many' found within 3 tokens before 'movies', selecting COUNT(*)");
}

TEST_CASE("column aggregates and table-anchored sums") {
  const auto bundle = fixture::MovieBundle();
  const Translation avg = Translate(Tagged("average budget/ATTR/movie.budget"), bundle->schema, bundle->graph);
  CHECK(avg.sql == "SELECT AVG(movie.budget) FROM movie");
  const Translation sum = Translate(Tagged("total movies/TABLE/movie"), bundle->schema, bundle->graph);
  CHECK(sum.sql == "SELECT COUNT(*) FROM movie");
}

TEST_CASE("assembly rejects inconsistent inputs") {
  const auto bundle = fixture::TvBundle();
  const TaggedQuery q = DirectorTags();
  const auto tables = CollectTableSet(q, bundle->schema);
  const JoinPlan plan = PlanJoins(bundle->graph, tables);
  auto wheres = ExtractWhereConditions(q);
  wheres.push_back({"movie.movie_title", CompareOp::kEq, "x", 0, 0});
  try {
    AssembleSql(q, tables, plan, wheres, std::nullopt);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.stage() == "assemble_sql");
  }
  JoinPlan partial = plan;
  partial.path_tables.pop_back();
  CHECK_THROWS_AS(AssembleSql(q, tables, partial, ExtractWhereConditions(q), std::nullopt), Error);
  CHECK_THROWS_AS(AssembleSql(q, {}, plan, {}, std::nullopt), Error);
}

TEST_CASE("literals with quotes are escaped and survive canonicalization") {
  CHECK(QuoteLiteral("say \"hi\"") == "\"say \\\"hi\\\"\"");
  CHECK(QuoteLiteral("back\\slash") == "\"back\\\\slash\"");
  const auto bundle = fixture::TvBundle();
  TaggedQuery q = Tagged("x/VALUE/tv_series.title");
  q.tokens[0] = "The \"Best\" Show";
  const Translation t = Translate(q, bundle->schema, bundle->graph);
  CHECK(t.sql == "SELECT * FROM tv_series WHERE (tv_series.title = \"The \\\"Best\\\" Show\")");
  const auto canonical = CanonicalizeSql(t.sql);
  REQUIRE(canonical.canonical);
  CHECK(CanonicalizeSql(canonical.text).text == canonical.text);
  CHECK(canonical.text.find("\\\"Best\\\"") != std::string::npos);
}

TEST_CASE("translation json shape") {
  const auto bundle = fixture::TvBundle();
  const Translation t = Translate(DirectorTags(), bundle->schema, bundle->graph);
  const auto j = TranslationToJson(t, bundle->graph);
  CHECK(j["sql"] == fixture::kDirectorSql);
  CHECK(j["select"] == "*");
  CHECK(j["from"].size() == 5);
  CHECK(j["aggregate"].is_null());
  REQUIRE(j["where"].size() == 6);
  CHECK(j["where"][0]["kind"] == "join");
  CHECK(j["where"][0]["left"] == "tv_series.msid");
  CHECK(j["where"][0]["right"] == "copyright.msid");
  CHECK(j["where"][0]["literal"].is_null());
  CHECK(j["where"][4]["kind"] == "value");
  CHECK(j["where"][4]["column"] == "tv_series.title");
  CHECK(j["where"][4]["op"] == "=");
  CHECK(j["where"][4]["literal"] == "House of Cards");
  CHECK(j["where"][4]["left"].is_null());
  CHECK(j["explanations"].size() == 11);
  CHECK(j["join_path_nodes"] ==
        nlohmann::json({"table:tv_series", "attr:msid", "table:copyright", "attr:cid", "table:company",
                        "table:directed_by", "attr:did", "table:director"}));
  CHECK(j["join_paths"].size() == 2);
}

TEST_CASE("coverage and connectivity on random schemas") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 80; ++i) {
    const Schema s = oracle::RandomSchema(rng);
    const SchemaGraph g = ExtractGraph(s);
    std::vector<std::string> names;
    for (const auto &t : s.tables()) names.push_back(t.name);
    std::shuffle(names.begin(), names.end(), rng);
    names.resize(std::min<size_t>(names.size(), 1 + rng() % 4));

    TaggedQuery q;
    for (const auto &n : names) {
      q.tokens.push_back(n);
      q.type_tags.push_back(TypeTag::kTable);
      q.schema_tags.push_back(n);
    }
    const Translation t = Translate(q, s, g);
    std::set<std::string> from;
    for (const auto &f : t.query.from) from.insert(f.table);
    for (const auto &n : names) CHECK(from.count(n) == 1);

    // Union-find over the join conditions.
    std::map<std::string, std::string> parent;
    for (const auto &f : from) parent[f] = f;
    std::function<std::string(const std::string &)> root = [&](const std::string &x) {
      return parent[x] == x ? x : parent[x] = root(parent[x]);
    };
    for (const auto &c : t.plan.conditions) parent[root(c.left_table)] = root(c.right_table);
    std::set<std::string> roots;
    for (const auto &f : from) roots.insert(root(f));
    CHECK(roots.size() == 1);
    CHECK(ExplainSql(t.query).size() == t.query.from.size() + t.query.where.size());
  }
}

}  // namespace nlidb
