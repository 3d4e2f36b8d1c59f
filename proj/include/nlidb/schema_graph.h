#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlidb/schema.h"

namespace nlidb {

enum class NodeKind { kTable, kAttr };

using NodeIndex = size_t;

struct GraphNode {
  std::string id;  // "table:<name>" or "attr:<name>"
  NodeKind kind = NodeKind::kTable;
  std::string label;
};

std::string TableNodeId(std::string_view table);
std::string AttrNodeId(std::string_view attr);

// Alternating table/attribute node sequence. Both ends are table nodes.
struct GraphPath {
  std::vector<NodeIndex> nodes;

  size_t length() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  bool operator==(const GraphPath &other) const = default;
};

// Undirected bipartite table/attribute graph. Attribute nodes are keyed by
// column name, so same-named columns in different tables share one node.
class SchemaGraph {
 public:
  NodeIndex AddNode(NodeKind kind, const std::string &label);
  // Links a table node to an attribute node. `column` is the table's own
  // column realising the link; it differs from the attribute label only for
  // edges added from differently named foreign keys.
  void AddEdge(NodeIndex table, NodeIndex attr, const std::string &column);

  const std::vector<GraphNode> &nodes() const { return nodes_; }
  const GraphNode &node(NodeIndex index) const { return nodes_[index]; }
  size_t edge_count() const { return join_columns_.size(); }

  // Neighbors ordered by label.
  const std::vector<NodeIndex> &Neighbors(NodeIndex index) const {
    return adjacency_[index];
  }
  bool HasEdge(NodeIndex a, NodeIndex b) const;

  // Edges as (table node, attribute node), ordered by (table id, attr id).
  std::vector<std::pair<NodeIndex, NodeIndex>> Edges() const;

  std::optional<NodeIndex> FindNode(std::string_view id) const;
  std::optional<NodeIndex> FindTable(std::string_view table) const;
  std::optional<NodeIndex> FindAttr(std::string_view attr) const;

  // Column of `table` used when joining through `attr`.
  const std::string &JoinColumn(NodeIndex table, NodeIndex attr) const;

  // Every edge joins a table node to an attribute node.
  bool IsBipartite() const;

 private:
  std::vector<GraphNode> nodes_;
  std::vector<std::vector<NodeIndex>> adjacency_;
  std::map<std::string, NodeIndex> by_id_;
  std::map<std::pair<NodeIndex, NodeIndex>, std::string> join_columns_;
};

SchemaGraph ExtractGraph(const Schema &schema);

// All minimum-length paths between two table nodes, ordered by their label
// sequences. Empty when the nodes are disconnected; {[from]} when from == to.
// Throws nlidb::Error for unknown or non-table endpoints.
std::vector<GraphPath> FindShortestPaths(const SchemaGraph &graph,
                                         NodeIndex from, NodeIndex to);
std::vector<GraphPath> FindShortestPaths(const SchemaGraph &graph,
                                         std::string_view from_table,
                                         std::string_view to_table);

std::vector<std::string> PathLabels(const SchemaGraph &graph,
                                    const GraphPath &path);

struct GraphHighlight {
  std::set<std::string> nodes;                           // node ids
  std::set<std::pair<std::string, std::string>> edges;   // unordered, stored sorted

  void AddEdge(const std::string &a, const std::string &b);
  bool HasEdge(const std::string &a, const std::string &b) const;
};

GraphHighlight HighlightPaths(const SchemaGraph &graph,
                              const std::vector<GraphPath> &paths);

enum class GraphFormat { kDot, kJson };

// Throws nlidb::Error when the highlight names an element not in the graph.
std::string ExportGraph(const SchemaGraph &graph,
                        const GraphHighlight &highlight, GraphFormat format);

// Reads the JSON export back. Join columns default to the attribute label.
SchemaGraph ParseGraphJson(std::string_view text);

}  // namespace nlidb
