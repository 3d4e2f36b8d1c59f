#include "nlidb/service.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "nlidb/text.h"
#include "nlidb/translate.h"

namespace nlidb {

using json = nlohmann::json;

TaggerMode ParseTaggerMode(std::string_view name) {
  if (name == "gold") return TaggerMode::kGold;
  if (name == "auto") return TaggerMode::kAuto;
  throw Error("request", "tagger must be \"gold\" or \"auto\", got \"" + std::string(name) + "\"");
}

std::string_view TaggerModeName(TaggerMode mode) {
  return mode == TaggerMode::kGold ? "gold" : "auto";
}

TaggedQuery TagTokens(const WorkspaceBundle &bundle, const std::vector<std::string> &tokens,
                      TaggerMode mode, const std::vector<GoldQuery> *gold) {
  if (mode == TaggerMode::kAuto) {
    TaggedQuery q = bundle.tagger->Tag(tokens);
    ValidateTaggedQuery(q, "tag");
    return q;
  }
  const auto &corpus = gold != nullptr ? *gold : bundle.corpus;
  for (const auto &entry : corpus) {
    if (entry.tags.tokens == tokens) return entry.tags;
  }
  throw Error("tag", "query not found in the gold corpus of \"" + bundle.name + "\"");
}

BlackBox TaggerBlackBox(const WorkspaceBundle &bundle) {
  const AutoTagger *tagger = bundle.tagger.get();
  return [tagger](const std::vector<std::string> &tokens) { return tagger->Distributions(tokens); };
}

namespace {

std::vector<std::string> TokenizeQuery(const std::string &query) {
  auto tokens = TokenTexts(query);
  if (tokens.empty()) throw Error("tokenize", "query has no tokens");
  return tokens;
}

json TagsJson(const TaggedQuery &q) {
  json out = json::array();
  for (size_t i = 0; i < q.size(); ++i) {
    out.push_back({{"index", i},
                   {"token", q.tokens[i]},
                   {"type_tag", std::string(TypeTagName(q.type_tags[i]))},
                   {"schema_tag", q.schema_tags[i]}});
  }
  return out;
}

}  // namespace

json GraphJson(const WorkspaceBundle &bundle, const GraphHighlight &highlight) {
  return json::parse(ExportGraph(bundle.graph, highlight, GraphFormat::kJson));
}

json HandleTranslate(const WorkspaceBundle &bundle, const TranslateRequest &request,
                     const std::vector<GoldQuery> *gold) {
  const auto tokens = TokenizeQuery(request.query);
  const TaggedQuery tagged = TagTokens(bundle, tokens, request.tagger, gold);

  json explanations;
  if (request.explain) {
    explanations = json::array();
    for (const auto &e : ExplainQuery(TaggerBlackBox(bundle), tagged, bundle.config.lime)) {
      explanations.push_back({{"token_index", e.token_index},
                              {"explanation", e.explanation ? e.explanation->ToJson() : json()},
                              {"error", e.explanation ? json() : json(e.error)}});
    }
  }

  const Translation t = Translate(tagged, bundle.schema, bundle.graph, bundle.config.translate);
  json out = TranslationToJson(t, bundle.graph);
  out["db"] = bundle.name;
  out["query"] = request.query;
  out["tagger"] = std::string(TaggerModeName(request.tagger));
  out["tags"] = TagsJson(tagged);
  out["graph"] = GraphJson(bundle, HighlightPaths(bundle.graph, t.query.join_paths));
  if (request.explain) out["token_explanations"] = std::move(explanations);
  return out;
}

json HandleExplain(const WorkspaceBundle &bundle, const std::string &query, size_t token_index,
                   TaggerMode tagger, const std::vector<GoldQuery> *gold) {
  const auto tokens = TokenizeQuery(query);
  const TaggedQuery tagged = TagTokens(bundle, tokens, tagger, gold);
  LimeConfig config = bundle.config.lime;
  config.seed ^= static_cast<uint64_t>(token_index);
  json out = ExplainToken(TaggerBlackBox(bundle), tagged, token_index, config).ToJson();
  out["db"] = bundle.name;
  out["query"] = query;
  return out;
}

json ErrorJson(const Error &error) { return {{"error", error.what()}, {"stage", error.stage()}}; }

namespace {

json Ratio(size_t correct, size_t total) {
  if (total == 0) return nullptr;
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::string RatioText(size_t correct, size_t total) {
  if (total == 0) return "n/a (0/0)";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f (%zu/%zu)",
                static_cast<double>(correct) / static_cast<double>(total), correct, total);
  return buf;
}

constexpr char kScoringNote[] =
    "translation verdict: exact match of canonical SQL forms (sorted FROM tables and WHERE "
    "conjuncts); strict proxy for semantic equivalence, so false negatives are possible and "
    "false positives are not";

constexpr Category kCategories[] = {Category::kSingleTable, Category::kMultiTable,
                                    Category::kAggregate, Category::kNested};

}  // namespace

EvalReport RunEval(const WorkspaceBundle &bundle, const std::vector<GoldQuery> &corpus,
                   TaggerMode mode) {
  EvalReport report;
  report.db = bundle.name;
  report.tagger = std::string(TaggerModeName(mode));
  report.queries = corpus.size();
  for (Category c : kCategories) report.categories[c] = {};

  for (const auto &gold : corpus) {
    ValidateAgainstSchema(gold.tags, bundle.schema, "eval");
    QueryVerdict v;
    v.line = gold.line;
    v.query = Join(gold.tags.tokens, " ");

    TaggedQuery predicted;
    try {
      predicted = mode == TaggerMode::kGold ? gold.tags : bundle.tagger->Tag(gold.tags.tokens);
    } catch (const Error &e) {
      predicted = TaggedQuery::AllOther(gold.tags.tokens);
      v.error = std::string(e.stage()) + ": " + e.what();
    }
    for (size_t i = 0; i < gold.tags.size(); ++i) {
      const TypeTag type = gold.tags.type_tags[i];
      const bool hit = predicted.type_tags[i] == type &&
                       predicted.schema_tags[i] == gold.tags.schema_tags[i];
      if (IsRelationTag(type)) {
        ++report.relation_total;
        report.relation_correct += hit ? 1 : 0;
      } else if (type == TypeTag::kValue) {
        ++report.non_relation_total;
        report.non_relation_correct += hit ? 1 : 0;
      }
    }

    if (!gold.sql) {
      ++report.uncategorized;
      report.verdicts.push_back(std::move(v));
      continue;
    }
    v.gold_sql = *gold.sql;
    ++report.translation_total;
    try {
      v.category = CategorizeGoldSql(*gold.sql);
    } catch (const Error &e) {
      v.category_error = e.what();
      ++report.uncategorized;
    }
    if (v.category) ++report.categories[*v.category].total;

    if (v.category != Category::kNested && v.error.empty()) {
      v.attempted = true;
      try {
        v.predicted_sql =
            Translate(predicted, bundle.schema, bundle.graph, bundle.config.translate).sql;
        v.correct = SqlMatches(v.predicted_sql, *gold.sql);
        v.canonical = CanonicalizeSql(v.predicted_sql).canonical &&
                      CanonicalizeSql(*gold.sql).canonical;
      } catch (const Error &e) {
        v.error = e.stage() + ": " + e.what();
      }
    }
    if (v.correct) {
      ++report.translation_correct;
      if (v.category) ++report.categories[*v.category].correct;
    }
    report.verdicts.push_back(std::move(v));
  }
  return report;
}

json EvalReport::ToJson() const {
  json cats = json::object();
  for (const auto &[c, count] : categories) {
    cats[std::string(CategoryName(c))] = {{"total", count.total},
                                          {"correct", count.correct},
                                          {"accuracy", Ratio(count.correct, count.total)},
                                          {"attempted", c != Category::kNested}};
  }
  json list = json::array();
  for (const auto &v : verdicts) {
    list.push_back({{"line", v.line},
                    {"query", v.query},
                    {"category", v.category ? json(std::string(CategoryName(*v.category))) : json()},
                    {"category_error", v.category_error.empty() ? json() : json(v.category_error)},
                    {"attempted", v.attempted},
                    {"correct", v.correct},
                    {"canonical", v.canonical},
                    {"predicted_sql", v.predicted_sql.empty() ? json() : json(v.predicted_sql)},
                    {"gold_sql", v.gold_sql.empty() ? json() : json(v.gold_sql)},
                    {"error", v.error.empty() ? json() : json(v.error)}});
  }
  return {{"db", db},
          {"tagger", tagger},
          {"queries", queries},
          {"relation_accuracy", Ratio(relation_correct, relation_total)},
          {"relation_tokens", relation_total},
          {"non_relation_accuracy", Ratio(non_relation_correct, non_relation_total)},
          {"non_relation_tokens", non_relation_total},
          {"translation_accuracy", Ratio(translation_correct, translation_total)},
          {"translation_correct", translation_correct},
          {"translation_total", translation_total},
          {"uncategorized", uncategorized},
          {"categories", cats},
          {"scoring", kScoringNote},
          {"verdicts", list}};
}

std::string EvalReport::ToText() const {
  std::ostringstream out;
  out << "db " << db << ", tagger " << tagger << ", " << queries << " queries\n";
  out << "relation token accuracy:     " << RatioText(relation_correct, relation_total) << "\n";
  out << "non-relation token accuracy: " << RatioText(non_relation_correct, non_relation_total)
      << "\n";
  out << "translation accuracy:        " << RatioText(translation_correct, translation_total)
      << "\n\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-14s %6s %8s  %s\n", "category", "total", "correct",
                "accuracy");
  out << buf;
  for (const auto &[c, count] : categories) {
    std::string acc = RatioText(count.correct, count.total);
    if (c == Category::kNested) acc += "  not attempted";
    std::snprintf(buf, sizeof(buf), "%-14s %6zu %8zu  ", std::string(CategoryName(c)).c_str(),
                  count.total, count.correct);
    out << buf << acc << "\n";
  }
  if (uncategorized > 0) out << "uncategorized: " << uncategorized << "\n";
  out << "\n" << kScoringNote << "\n\n";
  for (const auto &v : verdicts) {
    const char *mark = !v.attempted ? "skip" : v.correct ? "ok" : "FAIL";
    out << "[" << mark << "] line " << v.line << ": " << v.query << "\n";
    if (v.attempted && !v.correct) {
      if (!v.error.empty()) out << "       error: " << v.error << "\n";
      if (!v.predicted_sql.empty()) out << "       predicted: " << v.predicted_sql << "\n";
      out << "       gold:      " << v.gold_sql << "\n";
    }
  }
  return out.str();
}

namespace {

template <typename F>
double MedianMs(size_t runs, F &&f) {
  std::vector<double> times;
  times.reserve(runs);
  for (size_t r = 0; r < runs; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const size_t mid = times.size() / 2;
  return times.size() % 2 == 1 ? times[mid] : (times[mid - 1] + times[mid]) / 2.0;
}

}  // namespace

std::vector<BenchRow> RunBench(const WorkspaceBundle &bundle,
                               const std::vector<GoldQuery> &corpus, size_t runs) {
  if (runs == 0) throw Error("bench", "run count must be at least 1");
  std::vector<BenchRow> rows;
  for (const auto &gold : corpus) {
    BenchRow row;
    row.query = Join(gold.tags.tokens, " ");
    row.tag_ms = MedianMs(runs, [&] { (void)bundle.tagger->Tag(gold.tags.tokens); });
    try {
      (void)Translate(gold.tags, bundle.schema, bundle.graph, bundle.config.translate);
      row.translate_ms = MedianMs(runs, [&] {
        (void)Translate(gold.tags, bundle.schema, bundle.graph, bundle.config.translate);
      });
    } catch (const Error &e) {
      row.error = e.stage() + ": " + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace nlidb
