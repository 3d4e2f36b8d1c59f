#include "nlidb/workspace.h"

#include <cstdlib>
#include <filesystem>
#include <mutex>

#include "nlidb/error.h"
#include "nlidb/text.h"

namespace nlidb {

namespace fs = std::filesystem;

namespace {

constexpr char kStage[] = "load_workspace";

void CheckSynonyms(const ServiceConfig &config, const Schema &schema) {
  for (const auto &[word, syn] : config.tagger.synonyms) {
    const bool is_table = syn.type == TypeTag::kTable || syn.type == TypeTag::kTableRef;
    const bool known = is_table ? schema.FindTable(syn.schema_tag) != nullptr
                                : schema.IsTaggableColumn(syn.schema_tag);
    if (!known) {
      throw Error(kStage, "synonym \"" + word + "\" maps to unknown schema element \"" +
                              syn.schema_tag + "\"");
    }
  }
}

}  // namespace

std::shared_ptr<const WorkspaceBundle> LoadBundle(const std::string &directory,
                                                  const std::string &name) {
  const fs::path dir(directory);
  if (!fs::is_directory(dir)) throw Error(kStage, "no database directory " + directory);

  auto bundle = std::make_shared<WorkspaceBundle>();
  bundle->name = name;
  bundle->directory = directory;
  bundle->schema = LoadSchemaFile((dir / "schema.json").string());
  bundle->graph = ExtractGraph(bundle->schema);

  const fs::path values = dir / "values.tsv";
  if (fs::exists(values)) {
    bundle->index = BuildValueIndexFile(values.string());
    ValidateIndexAgainstSchema(bundle->index, bundle->schema);
  }
  const fs::path embeddings = dir / "embeddings.txt";
  if (fs::exists(embeddings)) bundle->embeddings = LoadEmbeddingsFile(embeddings.string());

  const fs::path config = dir / "config.toml";
  if (fs::exists(config)) bundle->config = ParseConfig(ReadFile(config.string()));
  CheckSynonyms(bundle->config, bundle->schema);

  const fs::path corpus = dir / "corpus.tags";
  if (fs::exists(corpus)) {
    bundle->corpus = LoadGoldTagsFile(corpus.string());
    for (const auto &q : bundle->corpus) ValidateAgainstSchema(q.tags, bundle->schema, "load_gold_tags");
  }

  bundle->tagger = std::make_unique<AutoTagger>(
      bundle->schema, bundle->index,
      bundle->embeddings ? &*bundle->embeddings : nullptr, bundle->config.tagger);
  return bundle;
}

Workspace::Workspace(std::string root) : root_(std::move(root)) {}

void Workspace::Reload() {
  if (!fs::is_directory(root_)) throw Error(kStage, "workspace root " + root_ + " is not a directory");
  std::map<std::string, std::shared_ptr<const WorkspaceBundle>> fresh;
  for (const auto &entry : fs::directory_iterator(root_)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "schema.json")) continue;
    const std::string name = entry.path().filename().string();
    try {
      fresh[name] = LoadBundle(entry.path().string(), name);
    } catch (const Error &e) {
      throw Error(e.stage(), name + ": " + e.what());
    }
  }
  std::unique_lock lock(mu_);
  bundles_ = std::move(fresh);
}

std::shared_ptr<const WorkspaceBundle> Workspace::Find(const std::string &name) const {
  std::shared_lock lock(mu_);
  auto it = bundles_.find(name);
  return it == bundles_.end() ? nullptr : it->second;
}

std::vector<std::string> Workspace::Names() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto &[name, bundle] : bundles_) out.push_back(name);
  return out;
}

std::string ResolveWorkspaceRoot(const std::string &flag_value) {
  if (const char *env = std::getenv("NLIDB_WORKSPACE"); env != nullptr && *env != '\0') return env;
  return flag_value;
}

}  // namespace nlidb
