#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlidb/error.h"
#include "nlidb/explain.h"
#include "nlidb/sql_text.h"
#include "nlidb/workspace.h"

namespace nlidb {

enum class TaggerMode { kGold, kAuto };

// "gold" or "auto"; throws nlidb::Error (stage "request") otherwise.
TaggerMode ParseTaggerMode(std::string_view name);
std::string_view TaggerModeName(TaggerMode mode);

// Gold mode returns the corpus entry with the same token list (from `gold`
// when given, else the bundle corpus); auto mode runs the bundle's tagger.
// Throws nlidb::Error (stage "tag").
TaggedQuery TagTokens(const WorkspaceBundle &bundle, const std::vector<std::string> &tokens,
                      TaggerMode mode, const std::vector<GoldQuery> *gold = nullptr);

// The auto tagger's per-token distributions, used as the LIME black box
// whatever tagger produced the explained tags.
BlackBox TaggerBlackBox(const WorkspaceBundle &bundle);

struct TranslateRequest {
  std::string query;
  TaggerMode tagger = TaggerMode::kAuto;
  bool explain = false;
};

// Tokenize, tag, optionally explain every non-O token, translate. The
// response carries the translation fields at top level plus "db", "query",
// "tagger", "tags", "graph" (export with the join paths highlighted) and,
// when requested, "token_explanations". Throws nlidb::Error with the stage
// that failed.
nlohmann::json HandleTranslate(const WorkspaceBundle &bundle, const TranslateRequest &request,
                               const std::vector<GoldQuery> *gold = nullptr);

// Explanation for one token; the seed is lime.seed ^ token_index, the same
// as in HandleTranslate.
nlohmann::json HandleExplain(const WorkspaceBundle &bundle, const std::string &query,
                             size_t token_index, TaggerMode tagger,
                             const std::vector<GoldQuery> *gold = nullptr);

nlohmann::json GraphJson(const WorkspaceBundle &bundle, const GraphHighlight &highlight = {});

// {"error": message, "stage": stage}
nlohmann::json ErrorJson(const Error &error);

struct QueryVerdict {
  size_t line = 0;
  std::string query;
  std::optional<Category> category;  // empty without gold SQL
  std::string category_error;
  bool attempted = false;
  bool correct = false;
  bool canonical = false;  // both sides canonicalized
  std::string predicted_sql;
  std::string gold_sql;
  std::string error;
};

struct CategoryCount {
  size_t total = 0;
  size_t correct = 0;
};

struct EvalReport {
  std::string db;
  std::string tagger;
  size_t queries = 0;
  size_t relation_total = 0;
  size_t relation_correct = 0;
  size_t non_relation_total = 0;
  size_t non_relation_correct = 0;
  size_t translation_total = 0;  // queries with gold SQL
  size_t translation_correct = 0;
  size_t uncategorized = 0;      // no gold SQL or unparseable gold SQL
  std::map<Category, CategoryCount> categories;
  std::vector<QueryVerdict> verdicts;

  nlohmann::json ToJson() const;
  std::string ToText() const;
};

// Token accuracy (both tags must match gold) over relation tokens (gold
// TABLE/TABLEREF/ATTR/ATTRREF) and VALUE tokens; translation verdicts by
// SqlMatches against gold SQL. Nested gold queries are not attempted but
// stay in the denominators.
EvalReport RunEval(const WorkspaceBundle &bundle, const std::vector<GoldQuery> &corpus,
                   TaggerMode mode);

struct BenchRow {
  std::string query;
  double tag_ms = 0.0;        // median auto tagging time
  double translate_ms = 0.0;  // median translation time from gold tags
  std::string error;
};

// Median over `runs` timings per query.
std::vector<BenchRow> RunBench(const WorkspaceBundle &bundle,
                               const std::vector<GoldQuery> &corpus, size_t runs = 100);

}  // namespace nlidb
