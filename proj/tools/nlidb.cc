// nlidb: command-line front end for the translation service.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlidb/error.h"
#include "nlidb/server.h"
#include "nlidb/service.h"
#include "nlidb/text.h"
#include "nlidb/translate.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::shared_ptr<const nlidb::WorkspaceBundle> OpenDb(const std::string &workspace,
                                                      const std::string &db) {
  const std::string root = nlidb::ResolveWorkspaceRoot(workspace);
  return nlidb::LoadBundle((fs::path(root) / db).string(), db);
}

void PrintTranslation(const json &r) {
  std::printf("%s\n\n", r["sql"].get<std::string>().c_str());
  for (const auto &t : r["tags"]) {
    std::printf("  %-12s %-9s %s\n", t["token"].get<std::string>().c_str(),
                t["type_tag"].get<std::string>().c_str(),
                t["schema_tag"].get<std::string>().c_str());
  }
  std::printf("\n");
  for (const auto &e : r["explanations"]) {
    std::printf("  %s\n      %s\n", e["part"].get<std::string>().c_str(),
                e["reason"].get<std::string>().c_str());
  }
  if (!r.contains("token_explanations")) return;
  std::printf("\n");
  for (const auto &te : r["token_explanations"]) {
    const size_t i = te["token_index"].get<size_t>();
    if (te["explanation"].is_null()) {
      std::printf("  token %zu: %s\n", i + 1, te["error"].get<std::string>().c_str());
      continue;
    }
    const auto &ex = te["explanation"];
    std::printf("  token %zu '%s' -> %s (%s)\n", i + 1, r["tags"][i]["token"].get<std::string>().c_str(),
                ex["target_tag"].get<std::string>().c_str(), ex["status"].get<std::string>().c_str());
    for (const auto &c : ex["contributions"]) {
      std::printf("      %+.4f  %s\n", c["score"].get<double>(), c["token"].get<std::string>().c_str());
    }
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Explainable natural-language-to-SQL translation"};
  app.require_subcommand(1);
  std::string workspace = "data/workspace";
  app.add_option("--workspace", workspace, "Workspace root (NLIDB_WORKSPACE overrides)");

  auto *serve = app.add_subcommand("serve", "Serve the JSON API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

  auto *translate = app.add_subcommand("translate", "Translate one query");
  std::string db, query, tags_path, tagger_name;
  bool explain = false, as_json = false;
  translate->add_option("--db", db, "Database name")->required();
  translate->add_option("--query", query, "Natural-language query")->required();
  translate->add_option("--tags", tags_path, "Gold tag file to take the query's tags from")
      ->check(CLI::ExistingFile);
  translate->add_option("--tagger", tagger_name, "gold or auto (default: gold with --tags, else auto)");
  translate->add_flag("--explain", explain, "Explain every tagged token");
  translate->add_flag("--json", as_json, "Print the full JSON response");

  auto *graph = app.add_subcommand("graph", "Schema graph tools");
  graph->require_subcommand(1);
  auto *graph_export = graph->add_subcommand("export", "Export the schema graph");
  std::string format = "dot", highlight_query;
  graph_export->add_option("--db", db, "Database name")->required();
  graph_export->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  graph_export->add_option("--highlight-from-query", highlight_query,
                           "Highlight the join paths of this query");
  graph_export->add_option("--tagger", tagger_name, "gold or auto (default auto)");

  auto *index = app.add_subcommand("index", "Value index tools");
  index->require_subcommand(1);
  auto *index_build = index->add_subcommand("build", "Validate a value file and install it");
  std::string values_path;
  index_build->add_option("--db", db, "Database name")->required();
  index_build->add_option("--values", values_path, "table<TAB>column<TAB>value file")
      ->required()
      ->check(CLI::ExistingFile);

  auto *eval = app.add_subcommand("eval", "Score a gold corpus");
  std::string corpus_path;
  eval->add_option("--db", db, "Database name")->required();
  eval->add_option("--corpus", corpus_path, "Gold tag file")->required()->check(CLI::ExistingFile);
  eval->add_option("--tagger", tagger_name, "gold or auto (default gold)");
  eval->add_flag("--json", as_json, "Print the JSON report");

  auto *bench = app.add_subcommand("bench", "Time tagging and translation");
  size_t runs = 100;
  bench->add_option("--db", db, "Database name")->required();
  bench->add_option("--corpus", corpus_path, "Gold tag file")->required()->check(CLI::ExistingFile);
  bench->add_option("--runs", runs, "Timed runs per query")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      nlidb::Workspace ws(nlidb::ResolveWorkspaceRoot(workspace));
      ws.Reload();
      std::fprintf(stderr, "serving %zu database(s) from %s on http://%s:%d\n", ws.Names().size(),
                   ws.root().c_str(), host.c_str(), port);
      nlidb::Serve(ws, host, port);
    } else if (*translate) {
      auto bundle = OpenDb(workspace, db);
      std::vector<nlidb::GoldQuery> gold;
      if (!tags_path.empty()) gold = nlidb::LoadGoldTagsFile(tags_path);
      nlidb::TranslateRequest request;
      request.query = query;
      request.explain = explain;
      request.tagger = tagger_name.empty()
                           ? (tags_path.empty() ? nlidb::TaggerMode::kAuto : nlidb::TaggerMode::kGold)
                           : nlidb::ParseTaggerMode(tagger_name);
      const json r = nlidb::HandleTranslate(*bundle, request, tags_path.empty() ? nullptr : &gold);
      if (as_json) {
        std::printf("%s\n", r.dump(2).c_str());
      } else {
        PrintTranslation(r);
      }
    } else if (*graph_export) {
      auto bundle = OpenDb(workspace, db);
      nlidb::GraphHighlight highlight;
      if (!highlight_query.empty()) {
        const auto mode = nlidb::ParseTaggerMode(tagger_name.empty() ? "auto" : tagger_name);
        const auto tagged = nlidb::TagTokens(*bundle, nlidb::TokenTexts(highlight_query), mode);
        const auto t = nlidb::Translate(tagged, bundle->schema, bundle->graph,
                                        bundle->config.translate);
        highlight = nlidb::HighlightPaths(bundle->graph, t.query.join_paths);
      }
      const auto fmt = format == "json" ? nlidb::GraphFormat::kJson : nlidb::GraphFormat::kDot;
      std::printf("%s\n", nlidb::ExportGraph(bundle->graph, highlight, fmt).c_str());
    } else if (*index_build) {
      const fs::path dir = fs::path(nlidb::ResolveWorkspaceRoot(workspace)) / db;
      const auto schema = nlidb::LoadSchemaFile((dir / "schema.json").string());
      const auto built = nlidb::BuildValueIndexFile(values_path);
      nlidb::ValidateIndexAgainstSchema(built, schema);
      const fs::path target = dir / "values.tsv";
      if (fs::absolute(values_path) != fs::absolute(target)) {
        fs::copy_file(values_path, target, fs::copy_options::overwrite_existing);
      }
      std::printf("indexed %zu rows, %zu distinct n-grams, %zu columns -> %s\n", built.row_count(),
                  built.ngram_count(), built.values().size(), target.string().c_str());
    } else if (*eval) {
      auto bundle = OpenDb(workspace, db);
      const auto corpus = nlidb::LoadGoldTagsFile(corpus_path);
      const auto mode = nlidb::ParseTaggerMode(tagger_name.empty() ? "gold" : tagger_name);
      const auto report = nlidb::RunEval(*bundle, corpus, mode);
      if (as_json) {
        std::printf("%s\n", report.ToJson().dump(2).c_str());
      } else {
        std::printf("%s", report.ToText().c_str());
      }
    } else if (*bench) {
      auto bundle = OpenDb(workspace, db);
      const auto corpus = nlidb::LoadGoldTagsFile(corpus_path);
      const auto rows = nlidb::RunBench(*bundle, corpus, runs);
      std::printf("median over %zu runs (ms)\n%10s %10s  query\n", runs, "tag", "translate");
      for (const auto &r : rows) {
        std::printf("%10.4f %10.4f  %s%s\n", r.tag_ms, r.translate_ms, r.query.c_str(),
                    r.error.empty() ? "" : ("  [" + r.error + "]").c_str());
      }
    }
  } catch (const nlidb::Error &e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.stage().c_str(), e.what());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
