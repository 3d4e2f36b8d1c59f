#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "nlidb/config.h"
#include "nlidb/embedding_store.h"
#include "nlidb/mappers.h"
#include "nlidb/schema.h"
#include "nlidb/schema_graph.h"
#include "nlidb/value_index.h"

namespace nlidb {

// Everything loaded for one database. Immutable once built; the tagger
// points into the bundle, so bundles are only handed out by shared_ptr.
struct WorkspaceBundle {
  std::string name;
  std::string directory;
  Schema schema;
  SchemaGraph graph;
  ValueIndex index;
  std::optional<EmbeddingStore> embeddings;
  std::vector<GoldQuery> corpus;
  ServiceConfig config;
  std::unique_ptr<AutoTagger> tagger;
};

// Loads <directory>/schema.json, values.tsv and the optional
// embeddings.txt, corpus.tags and config.toml. Every artifact is checked
// against the schema. Throws nlidb::Error (stage "load_workspace" or the
// stage of the failing loader).
std::shared_ptr<const WorkspaceBundle> LoadBundle(const std::string &directory,
                                                  const std::string &name);

// Databases under a workspace root, one subdirectory each. Lookups share a
// lock; Reload swaps the whole map under an exclusive lock, and requests
// keep their snapshot alive through the returned shared_ptr.
class Workspace {
 public:
  explicit Workspace(std::string root);

  // Reloads every subdirectory holding a schema.json. A database that fails
  // to load aborts the reload and leaves the previous map in place.
  void Reload();

  std::shared_ptr<const WorkspaceBundle> Find(const std::string &name) const;
  std::vector<std::string> Names() const;
  const std::string &root() const { return root_; }

 private:
  std::string root_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<const WorkspaceBundle>> bundles_;
};

// The workspace root: NLIDB_WORKSPACE when set, else `flag_value`.
std::string ResolveWorkspaceRoot(const std::string &flag_value);

}  // namespace nlidb
