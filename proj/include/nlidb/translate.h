#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlidb/mappers.h"
#include "nlidb/schema.h"
#include "nlidb/schema_graph.h"
#include "nlidb/tags.h"

namespace nlidb {

// Tables referenced by the query: TABLE/TABLEREF schema tags plus the table
// part of ATTR/ATTRREF/VALUE tags, in first-occurrence order. Throws
// nlidb::Error (stage "collect_table_set") when nothing maps to a table.
std::vector<std::string> CollectTableSet(const TaggedQuery &query, const Schema &schema);

// Join-path inference over the schema graph. Returns a single path when one
// shortest path between two tables of `tables` covers them all; otherwise the
// candidate with the fewest missing tables (shorter path on ties) plus one
// patch path per still-missing table, each starting at the candidate's first
// table. Throws nlidb::Error (stage "extract_join_relation") when some table
// is absent or unreachable.
std::vector<GraphPath> ExtractJoinRelation(const SchemaGraph &graph,
                                           const std::vector<std::string> &tables);

struct JoinCondition {
  std::string left_table;
  std::string left_column;
  std::string right_table;
  std::string right_column;
  std::string attribute;  // attribute node the join goes through

  std::string Left() const { return left_table + "." + left_column; }
  std::string Right() const { return right_table + "." + right_column; }
};

// One equality per (table, attribute, table) step, deduplicated across paths.
std::vector<JoinCondition> DeriveJoinConditions(const SchemaGraph &graph,
                                                const std::vector<GraphPath> &paths);

struct JoinPlan {
  std::vector<GraphPath> paths;
  std::vector<std::vector<std::string>> path_tables;  // table labels per path
  std::vector<JoinCondition> conditions;
  std::vector<std::string> intermediate_tables;  // on paths but not requested
};

JoinPlan PlanJoins(const SchemaGraph &graph, const std::vector<std::string> &tables);

enum class CompareOp { kEq, kGt, kLt, kGe, kLe };
std::string_view CompareOpText(CompareOp op);

struct WhereCondition {
  std::string column;  // "table.column"
  CompareOp op = CompareOp::kEq;
  std::string literal;
  size_t first_token = 0;  // span of the merged VALUE tokens
  size_t last_token = 0;
};

struct WhereOptions {
  // Upgrade '=' using COND tokens directly before a value span.
  bool cond_operators = false;
  std::map<std::string, CompareOp, std::less<>> operator_lexicon = DefaultOperatorLexicon();

  static std::map<std::string, CompareOp, std::less<>> DefaultOperatorLexicon();
};

// Collapses runs of tokens sharing (VALUE, schema tag) into one entry whose
// token is the space-joined run.
TaggedQuery MergeConsecutiveMappings(const TaggedQuery &query);

std::vector<WhereCondition> ExtractWhereConditions(const TaggedQuery &query,
                                                   const WhereOptions &options = {});

enum class AggregateFunc { kSum, kCount, kAvg };
std::string_view AggregateFuncName(AggregateFunc func);

struct AggregateLexicons {
  Lexicon sum{"total", "sum"};
  Lexicon count{"many", "count", "number"};
  Lexicon avg{"average", "avg", "mean"};
};

struct AggregateClause {
  AggregateFunc func = AggregateFunc::kCount;
  size_t anchor_index = 0;
  std::string anchor_token;
  TypeTag anchor_type = TypeTag::kTable;
  std::string anchor_schema;
  size_t keyword_index = 0;
  std::string keyword;
  size_t window = 0;
};

// First TABLE/TABLEREF/ATTR/ATTRREF token with an aggregate keyword among the
// `prev_window` tokens before it. Window positions are scanned left to right
// and each is checked against SUM, COUNT, then AVG keywords.
std::optional<AggregateClause> ExtractAggregateClause(const TaggedQuery &query,
                                                      size_t prev_window,
                                                      const AggregateLexicons &lexicons = {});

enum class ReasonKind {
  kMappedFromToken,
  kTableOfMappedAttribute,
  kRequiredIntermediate,
  kJoinCondition,
  kValueDetected,
  kKeywordDetected,
};

struct Reason {
  ReasonKind kind = ReasonKind::kMappedFromToken;
  std::string token;         // token or merged span text
  size_t first_token = 0;
  size_t last_token = 0;
  std::string tag;           // type tag, column or function involved
  std::string left_table;    // connected tables for joins and intermediates
  std::string right_table;
  std::string attribute;
  size_t window = 0;

  std::string Text() const;
};

struct FromEntry {
  std::string table;
  std::optional<Reason> reason;
};

struct WherePredicate {
  bool is_join = false;
  JoinCondition join;
  WhereCondition value;
  std::optional<Reason> reason;

  std::string Render() const;
};

struct SqlQuery {
  std::optional<AggregateClause> aggregate;
  std::string select = "*";
  std::optional<Reason> select_reason;
  std::vector<FromEntry> from;
  std::vector<WherePredicate> where;
  std::vector<GraphPath> join_paths;
};

// Builds the query: FROM lists the tables in join-path order, WHERE holds
// the join conditions followed by value predicates. Every part carries a
// reason. Throws nlidb::Error (stage "assemble_sql") on inconsistent input.
SqlQuery AssembleSql(const TaggedQuery &query, const std::vector<std::string> &tables,
                     const JoinPlan &plan, const std::vector<WhereCondition> &wheres,
                     const std::optional<AggregateClause> &aggregate);

// Uppercase keywords, comma-separated FROM, parenthesized WHERE conjuncts
// joined by AND, double-quoted literals with backslash escapes.
std::string RenderSql(const SqlQuery &query);
std::string QuoteLiteral(std::string_view literal);

struct PartReason {
  std::string part;
  std::string reason;
};

// Throws nlidb::Error (stage "explain_sql") if any part lacks a reason.
std::vector<PartReason> ExplainSql(const SqlQuery &query);

struct TranslateOptions {
  size_t prev_window = 3;
  AggregateLexicons lexicons;
  WhereOptions where;
};

struct Translation {
  std::vector<std::string> tables;
  JoinPlan plan;
  SqlQuery query;
  std::string sql;
};

// Runs table collection, join inference, WHERE and aggregate extraction and
// assembly. Errors keep the stage of the step that failed.
Translation Translate(const TaggedQuery &query, const Schema &schema,
                      const SchemaGraph &graph, const TranslateOptions &options = {});

nlohmann::json TranslationToJson(const Translation &translation, const SchemaGraph &graph);

}  // namespace nlidb
