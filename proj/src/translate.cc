#include "nlidb/translate.h"

#include <algorithm>
#include <deque>
#include <set>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

using json = nlohmann::json;

std::vector<std::string> CollectTableSet(const TaggedQuery &query, const Schema &schema) {
  std::vector<std::string> tables;
  for (size_t i = 0; i < query.size(); ++i) {
    const TypeTag type = query.type_tags[i];
    if (type == TypeTag::kOther || type == TypeTag::kCond) continue;
    std::string table = TableOfTag(query.schema_tags[i]);
    if (schema.FindTable(table) == nullptr) {
      throw Error("collect_table_set", "token \"" + query.tokens[i] +
                                           "\" maps to unknown table \"" + table + "\"");
    }
    if (std::find(tables.begin(), tables.end(), table) == tables.end()) {
      tables.push_back(std::move(table));
    }
  }
  if (tables.empty()) {
    throw Error("collect_table_set", "no token maps to a table or column; query is untranslatable");
  }
  return tables;
}

namespace {

constexpr char kJoinStage[] = "extract_join_relation";

std::vector<std::string> TablesOn(const SchemaGraph &graph, const GraphPath &path) {
  std::vector<std::string> out;
  for (NodeIndex n : path.nodes) {
    if (graph.node(n).kind == NodeKind::kTable) out.push_back(graph.node(n).label);
  }
  return out;
}

bool Contains(const std::vector<std::string> &list, const std::string &item) {
  return std::find(list.begin(), list.end(), item) != list.end();
}

}  // namespace

std::vector<GraphPath> ExtractJoinRelation(const SchemaGraph &graph,
                                           const std::vector<std::string> &tables) {
  if (tables.empty()) throw Error(kJoinStage, "empty table set");
  std::vector<NodeIndex> nodes;
  for (const auto &t : tables) {
    auto n = graph.FindTable(t);
    if (!n) throw Error(kJoinStage, "table \"" + t + "\" is not in the schema graph");
    nodes.push_back(*n);
  }
  if (tables.size() == 1) return {GraphPath{{nodes.front()}}};

  // Reachability first so the error can name every stranded table.
  std::vector<bool> seen(graph.nodes().size(), false);
  std::deque<NodeIndex> queue{nodes.front()};
  seen[nodes.front()] = true;
  while (!queue.empty()) {
    NodeIndex u = queue.front();
    queue.pop_front();
    for (NodeIndex v : graph.Neighbors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
    }
  }
  std::vector<std::string> unreachable;
  for (size_t i = 1; i < tables.size(); ++i) {
    if (!seen[nodes[i]]) unreachable.push_back(tables[i]);
  }
  if (!unreachable.empty()) {
    throw Error(kJoinStage, "no join path from \"" + tables.front() + "\" to " +
                                Join(unreachable, ", "));
  }

  struct Candidate {
    GraphPath path;
    std::vector<std::string> missing;
  };
  std::optional<Candidate> candidate;
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (size_t j = 0; j < nodes.size(); ++j) {
      if (i == j) continue;
      for (auto &path : FindShortestPaths(graph, nodes[i], nodes[j])) {
        const auto on_path = TablesOn(graph, path);
        std::vector<std::string> missing;
        for (const auto &t : tables) {
          if (!Contains(on_path, t)) missing.push_back(t);
        }
        if (missing.empty()) return {path};
        const bool better =
            !candidate || missing.size() < candidate->missing.size() ||
            (missing.size() == candidate->missing.size() &&
             path.length() < candidate->path.length());
        if (better) candidate = Candidate{path, std::move(missing)};
      }
    }
  }

  std::vector<GraphPath> out{candidate->path};
  const NodeIndex root = candidate->path.nodes.front();
  std::vector<std::string> missing = candidate->missing;
  const std::vector<std::string> pending = missing;
  for (const auto &t : pending) {
    if (!Contains(missing, t)) continue;
    auto paths = FindShortestPaths(graph, root, *graph.FindTable(t));
    // Among equally short patches, take the one that also picks up the most
    // other missing tables; ties keep label order.
    const GraphPath *chosen = nullptr;
    size_t chosen_cover = 0;
    for (const auto &path : paths) {
      const auto on_path = TablesOn(graph, path);
      size_t cover = 0;
      for (const auto &m : missing) cover += Contains(on_path, m) ? 1 : 0;
      if (chosen == nullptr || cover > chosen_cover) {
        chosen = &path;
        chosen_cover = cover;
      }
    }
    const auto on_path = TablesOn(graph, *chosen);
    missing.erase(std::remove_if(missing.begin(), missing.end(),
                                 [&](const std::string &m) { return Contains(on_path, m); }),
                  missing.end());
    if (std::find(out.begin(), out.end(), *chosen) == out.end()) out.push_back(*chosen);
  }
  return out;
}

std::vector<JoinCondition> DeriveJoinConditions(const SchemaGraph &graph,
                                                const std::vector<GraphPath> &paths) {
  std::vector<JoinCondition> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto &path : paths) {
    const auto &nodes = path.nodes;
    if (nodes.empty() || nodes.size() % 2 == 0) {
      throw Error("derive_join_conditions", "path must alternate table and attribute nodes");
    }
    for (size_t k = 0; k < nodes.size(); ++k) {
      const NodeKind expected = k % 2 == 0 ? NodeKind::kTable : NodeKind::kAttr;
      if (nodes[k] >= graph.nodes().size() || graph.node(nodes[k]).kind != expected) {
        throw Error("derive_join_conditions", "path must alternate table and attribute nodes");
      }
      if (k > 0 && !graph.HasEdge(nodes[k - 1], nodes[k])) {
        throw Error("derive_join_conditions", "path uses a missing edge");
      }
    }
    for (size_t k = 0; k + 2 < nodes.size(); k += 2) {
      JoinCondition c;
      c.left_table = graph.node(nodes[k]).label;
      c.left_column = graph.JoinColumn(nodes[k], nodes[k + 1]);
      c.right_table = graph.node(nodes[k + 2]).label;
      c.right_column = graph.JoinColumn(nodes[k + 2], nodes[k + 1]);
      c.attribute = graph.node(nodes[k + 1]).label;
      auto key = std::minmax(c.Left(), c.Right());
      if (!seen.insert({key.first, key.second}).second) continue;
      out.push_back(std::move(c));
    }
  }
  return out;
}

JoinPlan PlanJoins(const SchemaGraph &graph, const std::vector<std::string> &tables) {
  JoinPlan plan;
  plan.paths = ExtractJoinRelation(graph, tables);
  plan.conditions = DeriveJoinConditions(graph, plan.paths);
  for (const auto &path : plan.paths) plan.path_tables.push_back(TablesOn(graph, path));
  for (const auto &on_path : plan.path_tables) {
    for (const auto &t : on_path) {
      if (!Contains(tables, t) && !Contains(plan.intermediate_tables, t)) {
        plan.intermediate_tables.push_back(t);
      }
    }
  }
  return plan;
}

std::string_view CompareOpText(CompareOp op) {
  switch (op) {
    case CompareOp::kEq:
      return "=";
    case CompareOp::kGt:
      return ">";
    case CompareOp::kLt:
      return "<";
    case CompareOp::kGe:
      return ">=";
    case CompareOp::kLe:
      return "<=";
  }
  return "=";
}

std::map<std::string, CompareOp, std::less<>> WhereOptions::DefaultOperatorLexicon() {
  return {{"more", CompareOp::kGt},  {"greater", CompareOp::kGt}, {"after", CompareOp::kGt},
          {"less", CompareOp::kLt},  {"fewer", CompareOp::kLt},   {"before", CompareOp::kLt},
          {"least", CompareOp::kGe}, {"most", CompareOp::kLe}};
}

TaggedQuery MergeConsecutiveMappings(const TaggedQuery &query) {
  TaggedQuery out;
  for (size_t i = 0; i < query.size(); ++i) {
    const bool extends = i > 0 && query.type_tags[i] == TypeTag::kValue &&
                         query.type_tags[i - 1] == TypeTag::kValue &&
                         query.schema_tags[i] == query.schema_tags[i - 1];
    if (extends) {
      out.tokens.back() += " " + query.tokens[i];
      continue;
    }
    out.tokens.push_back(query.tokens[i]);
    out.type_tags.push_back(query.type_tags[i]);
    out.schema_tags.push_back(query.schema_tags[i]);
    if (query.distributions.size() == query.size()) {
      out.distributions.push_back(query.distributions[i]);
    }
  }
  return out;
}

std::vector<WhereCondition> ExtractWhereConditions(const TaggedQuery &query,
                                                   const WhereOptions &options) {
  std::vector<WhereCondition> out;
  size_t i = 0;
  while (i < query.size()) {
    if (query.type_tags[i] != TypeTag::kValue) {
      ++i;
      continue;
    }
    size_t end = i;
    while (end + 1 < query.size() && query.type_tags[end + 1] == TypeTag::kValue &&
           query.schema_tags[end + 1] == query.schema_tags[i]) {
      ++end;
    }
    WhereCondition c;
    c.column = query.schema_tags[i];
    c.first_token = i;
    c.last_token = end;
    std::vector<std::string> words(query.tokens.begin() + i, query.tokens.begin() + end + 1);
    c.literal = Join(words, " ");
    if (options.cond_operators) {
      size_t k = i;
      std::vector<size_t> run;
      while (k > 0 && query.type_tags[k - 1] == TypeTag::kCond) run.insert(run.begin(), --k);
      for (size_t idx : run) {
        auto it = options.operator_lexicon.find(ToLower(query.tokens[idx]));
        if (it != options.operator_lexicon.end()) {
          c.op = it->second;
          break;
        }
      }
    }
    out.push_back(std::move(c));
    i = end + 1;
  }
  return out;
}

std::string_view AggregateFuncName(AggregateFunc func) {
  switch (func) {
    case AggregateFunc::kSum:
      return "SUM";
    case AggregateFunc::kCount:
      return "COUNT";
    case AggregateFunc::kAvg:
      return "AVG";
  }
  return "COUNT";
}

std::optional<AggregateClause> ExtractAggregateClause(const TaggedQuery &query,
                                                      size_t prev_window,
                                                      const AggregateLexicons &lexicons) {
  if (prev_window == 0) throw Error("extract_aggregate_clause", "prevWindow must be at least 1");
  const std::pair<const Lexicon *, AggregateFunc> ordered[] = {
      {&lexicons.sum, AggregateFunc::kSum},
      {&lexicons.count, AggregateFunc::kCount},
      {&lexicons.avg, AggregateFunc::kAvg}};
  for (size_t i = 0; i < query.size(); ++i) {
    if (!IsRelationTag(query.type_tags[i])) continue;
    const size_t begin = i >= prev_window ? i - prev_window : 0;
    for (size_t j = begin; j < i; ++j) {
      const std::string word = ToLower(query.tokens[j]);
      for (const auto &[lexicon, func] : ordered) {
        if (lexicon->count(word) == 0) continue;
        AggregateClause clause;
        clause.func = func;
        clause.anchor_index = i;
        clause.anchor_token = query.tokens[i];
        clause.anchor_type = query.type_tags[i];
        clause.anchor_schema = query.schema_tags[i];
        clause.keyword_index = j;
        clause.keyword = query.tokens[j];
        clause.window = prev_window;
        return clause;
      }
    }
  }
  return std::nullopt;
}

std::string Reason::Text() const {
  auto span = [this]() {
    if (first_token == last_token) return "token " + std::to_string(first_token + 1);
    return "tokens " + std::to_string(first_token + 1) + "-" + std::to_string(last_token + 1);
  };
  switch (kind) {
    case ReasonKind::kMappedFromToken:
      return "mapped from token '" + token + "' tagged " + tag;
    case ReasonKind::kTableOfMappedAttribute:
      return "table of column '" + tag + "' mapped from token '" + token + "'";
    case ReasonKind::kRequiredIntermediate:
      return "required table to connect '" + left_table + "' and '" + right_table +
             "' through join";
    case ReasonKind::kJoinCondition:
      return "join condition connecting '" + left_table + "' and '" + right_table +
             "' through attribute '" + attribute + "'";
    case ReasonKind::kValueDetected:
      return "value '" + token + "' detected in " + span() + " for column '" + tag + "'";
    case ReasonKind::kKeywordDetected:
      return "aggregate keyword '" + token + "' found within " + std::to_string(window) +
             " tokens before '" + attribute + "', selecting " + tag;
  }
  return {};
}

std::string QuoteLiteral(std::string_view literal) {
  std::string out = "\"";
  for (char c : literal) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string WherePredicate::Render() const {
  if (is_join) return join.Left() + " = " + join.Right();
  return value.column + " " + std::string(CompareOpText(value.op)) + " " +
         QuoteLiteral(value.literal);
}

SqlQuery AssembleSql(const TaggedQuery &query, const std::vector<std::string> &tables,
                     const JoinPlan &plan, const std::vector<WhereCondition> &wheres,
                     const std::optional<AggregateClause> &aggregate) {
  constexpr char kStage[] = "assemble_sql";
  if (tables.empty()) throw Error(kStage, "empty table set");
  SqlQuery out;
  out.join_paths = plan.paths;

  std::vector<std::string> from;
  for (const auto &on_path : plan.path_tables) {
    for (const auto &t : on_path) {
      if (!Contains(from, t)) from.push_back(t);
    }
  }
  for (const auto &t : tables) {
    if (!Contains(from, t)) {
      if (!plan.path_tables.empty()) {
        throw Error(kStage, "join plan does not cover table \"" + t + "\"");
      }
      from.push_back(t);
    }
  }

  for (const auto &table : from) {
    FromEntry entry{table, std::nullopt};
    if (Contains(tables, table)) {
      // A direct table mention beats a column mention.
      for (int pass = 0; pass < 2 && !entry.reason; ++pass) {
        for (size_t i = 0; i < query.size(); ++i) {
          const TypeTag type = query.type_tags[i];
          const bool direct = type == TypeTag::kTable || type == TypeTag::kTableRef;
          const bool column = type == TypeTag::kAttr || type == TypeTag::kAttrRef ||
                              type == TypeTag::kValue;
          if ((pass == 0 && !direct) || (pass == 1 && !column)) continue;
          if (TableOfTag(query.schema_tags[i]) != table) continue;
          Reason r;
          r.kind = direct ? ReasonKind::kMappedFromToken : ReasonKind::kTableOfMappedAttribute;
          r.token = query.tokens[i];
          r.first_token = r.last_token = i;
          r.tag = direct ? std::string(TypeTagName(type)) : query.schema_tags[i];
          entry.reason = r;
          break;
        }
      }
    } else {
      for (const auto &on_path : plan.path_tables) {
        auto it = std::find(on_path.begin(), on_path.end(), table);
        if (it == on_path.end() || it == on_path.begin() || it + 1 == on_path.end()) continue;
        Reason r;
        r.kind = ReasonKind::kRequiredIntermediate;
        r.left_table = *(it - 1);
        r.right_table = *(it + 1);
        entry.reason = r;
        break;
      }
    }
    out.from.push_back(std::move(entry));
  }

  for (const auto &c : plan.conditions) {
    if (!Contains(from, c.left_table) || !Contains(from, c.right_table)) {
      throw Error(kStage, "join condition " + c.Left() + " = " + c.Right() +
                              " names a table outside FROM");
    }
    WherePredicate p;
    p.is_join = true;
    p.join = c;
    Reason r;
    r.kind = ReasonKind::kJoinCondition;
    r.left_table = c.left_table;
    r.right_table = c.right_table;
    r.attribute = c.attribute;
    p.reason = r;
    out.where.push_back(std::move(p));
  }
  for (const auto &w : wheres) {
    if (!Contains(from, TableOfTag(w.column))) {
      throw Error(kStage, "value predicate on " + w.column + " names a table outside FROM");
    }
    if (w.literal.empty()) throw Error(kStage, "empty literal for " + w.column);
    WherePredicate p;
    p.value = w;
    Reason r;
    r.kind = ReasonKind::kValueDetected;
    r.token = w.literal;
    r.first_token = w.first_token;
    r.last_token = w.last_token;
    r.tag = w.column;
    p.reason = r;
    out.where.push_back(std::move(p));
  }

  if (aggregate) {
    const bool table_anchor = aggregate->anchor_type == TypeTag::kTable ||
                              aggregate->anchor_type == TypeTag::kTableRef;
    if (table_anchor) {
      out.select = "COUNT(*)";
    } else {
      out.select = std::string(AggregateFuncName(aggregate->func)) + "(" +
                   aggregate->anchor_schema + ")";
    }
    if (!Contains(from, TableOfTag(aggregate->anchor_schema))) {
      throw Error(kStage, "aggregate anchor " + aggregate->anchor_schema + " is outside FROM");
    }
    out.aggregate = aggregate;
    Reason r;
    r.kind = ReasonKind::kKeywordDetected;
    r.token = aggregate->keyword;
    r.first_token = r.last_token = aggregate->keyword_index;
    r.window = aggregate->window;
    r.attribute = aggregate->anchor_token;
    r.tag = out.select;
    out.select_reason = r;
  }
  return out;
}

std::string RenderSql(const SqlQuery &query) {
  std::string sql = "SELECT " + query.select + " FROM ";
  for (size_t i = 0; i < query.from.size(); ++i) {
    if (i > 0) sql += ", ";
    sql += query.from[i].table;
  }
  for (size_t i = 0; i < query.where.size(); ++i) {
    sql += i == 0 ? " WHERE " : " AND ";
    sql += "(" + query.where[i].Render() + ")";
  }
  return sql;
}

std::vector<PartReason> ExplainSql(const SqlQuery &query) {
  constexpr char kStage[] = "explain_sql";
  std::vector<PartReason> out;
  if (query.aggregate) {
    if (!query.select_reason) throw Error(kStage, "SELECT " + query.select + " has no reason");
    out.push_back({"SELECT " + query.select, query.select_reason->Text()});
  }
  for (const auto &entry : query.from) {
    if (!entry.reason) throw Error(kStage, "FROM " + entry.table + " has no reason");
    out.push_back({"FROM " + entry.table, entry.reason->Text()});
  }
  for (const auto &p : query.where) {
    if (!p.reason) throw Error(kStage, "WHERE " + p.Render() + " has no reason");
    out.push_back({"WHERE " + p.Render(), p.reason->Text()});
  }
  return out;
}

Translation Translate(const TaggedQuery &query, const Schema &schema, const SchemaGraph &graph,
                      const TranslateOptions &options) {
  Translation out;
  out.tables = CollectTableSet(query, schema);
  out.plan = PlanJoins(graph, out.tables);
  auto wheres = ExtractWhereConditions(query, options.where);
  auto aggregate = ExtractAggregateClause(query, options.prev_window, options.lexicons);
  out.query = AssembleSql(query, out.tables, out.plan, wheres, aggregate);
  out.sql = RenderSql(out.query);
  return out;
}

json TranslationToJson(const Translation &translation, const SchemaGraph &graph) {
  const SqlQuery &q = translation.query;
  json from = json::array();
  for (const auto &entry : q.from) from.push_back(entry.table);

  json where = json::array();
  for (const auto &p : q.where) {
    if (p.is_join) {
      where.push_back({{"kind", "join"},
                       {"column", p.join.attribute},
                       {"op", "="},
                       {"literal", nullptr},
                       {"left", p.join.Left()},
                       {"right", p.join.Right()}});
    } else {
      where.push_back({{"kind", "value"},
                       {"column", p.value.column},
                       {"op", std::string(CompareOpText(p.value.op))},
                       {"literal", p.value.literal},
                       {"left", nullptr},
                       {"right", nullptr}});
    }
  }

  json aggregate = nullptr;
  if (q.aggregate) {
    const auto &a = *q.aggregate;
    aggregate = {{"func", std::string(AggregateFuncName(a.func))},
                 {"anchor_index", a.anchor_index},
                 {"anchor_token", a.anchor_token},
                 {"anchor_type", std::string(TypeTagName(a.anchor_type))},
                 {"anchor_schema", a.anchor_schema},
                 {"keyword", a.keyword},
                 {"keyword_index", a.keyword_index},
                 {"window", a.window}};
  }

  json explanations = json::array();
  for (const auto &r : ExplainSql(q)) {
    explanations.push_back({{"part", r.part}, {"reason", r.reason}});
  }

  json nodes = json::array();
  json paths = json::array();
  std::set<NodeIndex> seen;
  for (const auto &path : q.join_paths) {
    json ids = json::array();
    for (NodeIndex n : path.nodes) {
      ids.push_back(graph.node(n).id);
      if (seen.insert(n).second) nodes.push_back(graph.node(n).id);
    }
    paths.push_back(std::move(ids));
  }

  return {{"sql", translation.sql},
          {"select", q.select},
          {"from", from},
          {"where", where},
          {"aggregate", aggregate},
          {"explanations", explanations},
          {"join_path_nodes", nodes},
          {"join_paths", paths}};
}

}  // namespace nlidb
