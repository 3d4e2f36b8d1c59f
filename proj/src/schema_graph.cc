#include "nlidb/schema_graph.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "nlidb/error.h"

namespace nlidb {

using json = nlohmann::json;

std::string TableNodeId(std::string_view table) {
  return "table:" + std::string(table);
}

std::string AttrNodeId(std::string_view attr) {
  return "attr:" + std::string(attr);
}

NodeIndex SchemaGraph::AddNode(NodeKind kind, const std::string &label) {
  std::string id = kind == NodeKind::kTable ? TableNodeId(label) : AttrNodeId(label);
  if (auto it = by_id_.find(id); it != by_id_.end()) return it->second;
  NodeIndex index = nodes_.size();
  nodes_.push_back(GraphNode{id, kind, label});
  adjacency_.emplace_back();
  by_id_.emplace(std::move(id), index);
  return index;
}

void SchemaGraph::AddEdge(NodeIndex table, NodeIndex attr,
                          const std::string &column) {
  if (table >= nodes_.size() || attr >= nodes_.size()) {
    throw Error("extract_graph", "edge endpoint out of range");
  }
  if (nodes_[table].kind != NodeKind::kTable ||
      nodes_[attr].kind != NodeKind::kAttr) {
    throw Error("extract_graph", "edge must join a table node and an attribute node: " +
                                     nodes_[table].id + " -- " + nodes_[attr].id);
  }
  auto key = std::make_pair(table, attr);
  if (join_columns_.count(key) != 0) return;
  join_columns_.emplace(key, column);
  auto insert_sorted = [this](std::vector<NodeIndex> &list, NodeIndex n) {
    auto pos = std::lower_bound(list.begin(), list.end(), n,
                                [this](NodeIndex a, NodeIndex b) {
                                  return nodes_[a].id < nodes_[b].id;
                                });
    list.insert(pos, n);
  };
  insert_sorted(adjacency_[table], attr);
  insert_sorted(adjacency_[attr], table);
}

bool SchemaGraph::HasEdge(NodeIndex a, NodeIndex b) const {
  if (a >= nodes_.size() || b >= nodes_.size()) return false;
  if (nodes_[a].kind == NodeKind::kAttr) std::swap(a, b);
  return join_columns_.count({a, b}) != 0;
}

std::vector<std::pair<NodeIndex, NodeIndex>> SchemaGraph::Edges() const {
  std::vector<std::pair<NodeIndex, NodeIndex>> out;
  out.reserve(join_columns_.size());
  for (const auto &[key, column] : join_columns_) out.push_back(key);
  std::sort(out.begin(), out.end(), [this](const auto &x, const auto &y) {
    return std::tie(nodes_[x.first].id, nodes_[x.second].id) <
           std::tie(nodes_[y.first].id, nodes_[y.second].id);
  });
  return out;
}

std::optional<NodeIndex> SchemaGraph::FindNode(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeIndex> SchemaGraph::FindTable(std::string_view table) const {
  return FindNode(TableNodeId(table));
}

std::optional<NodeIndex> SchemaGraph::FindAttr(std::string_view attr) const {
  return FindNode(AttrNodeId(attr));
}

const std::string &SchemaGraph::JoinColumn(NodeIndex table,
                                           NodeIndex attr) const {
  auto it = join_columns_.find({table, attr});
  if (it == join_columns_.end()) {
    throw Error("derive_join_conditions",
                "no edge between " + nodes_.at(table).id + " and " +
                    nodes_.at(attr).id);
  }
  return it->second;
}

bool SchemaGraph::IsBipartite() const {
  for (NodeIndex a = 0; a < nodes_.size(); ++a) {
    for (NodeIndex b : adjacency_[a]) {
      if (nodes_[a].kind == nodes_[b].kind) return false;
    }
  }
  return true;
}

SchemaGraph ExtractGraph(const Schema &schema) {
  SchemaGraph graph;
  for (const auto &table : schema.tables()) {
    NodeIndex t = graph.AddNode(NodeKind::kTable, table.name);
    for (const auto &column : table.columns) {
      NodeIndex c = graph.AddNode(NodeKind::kAttr, column.name);
      graph.AddEdge(t, c, column.name);
    }
  }
  // Differently named key pairs: link the referencing table to the
  // referenced attribute so the pair becomes joinable.
  for (const auto &fk : schema.foreign_keys()) {
    if (fk.column == fk.ref_column) continue;
    NodeIndex t = *graph.FindTable(fk.table);
    NodeIndex c = *graph.FindAttr(fk.ref_column);
    graph.AddEdge(t, c, fk.column);
  }
  return graph;
}

namespace {

void CheckTableNode(const SchemaGraph &graph, NodeIndex index) {
  if (index >= graph.nodes().size()) {
    throw Error("find_shortest_paths", "unknown node index " + std::to_string(index));
  }
  if (graph.node(index).kind != NodeKind::kTable) {
    throw Error("find_shortest_paths", graph.node(index).id + " is not a table node");
  }
}

}  // namespace

std::vector<GraphPath> FindShortestPaths(const SchemaGraph &graph,
                                         NodeIndex from, NodeIndex to) {
  CheckTableNode(graph, from);
  CheckTableNode(graph, to);
  if (from == to) return {GraphPath{{from}}};

  // Uniform edge weights: BFS layering gives Dijkstra's distances, and the
  // predecessor DAG holds every shortest path.
  const size_t n = graph.nodes().size();
  constexpr size_t kUnseen = static_cast<size_t>(-1);
  std::vector<size_t> dist(n, kUnseen);
  std::vector<std::vector<NodeIndex>> preds(n);
  std::deque<NodeIndex> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    NodeIndex u = queue.front();
    queue.pop_front();
    if (u == to) continue;
    if (dist[to] != kUnseen && dist[u] >= dist[to]) continue;
    for (NodeIndex v : graph.Neighbors(u)) {
      if (dist[v] == kUnseen) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
      if (dist[v] == dist[u] + 1) preds[v].push_back(u);
    }
  }
  if (dist[to] == kUnseen) return {};

  std::vector<GraphPath> paths;
  std::vector<NodeIndex> stack{to};
  std::function<void(NodeIndex)> unwind = [&](NodeIndex node) {
    if (node == from) {
      paths.push_back(GraphPath{{stack.rbegin(), stack.rend()}});
      return;
    }
    for (NodeIndex p : preds[node]) {
      stack.push_back(p);
      unwind(p);
      stack.pop_back();
    }
  };
  unwind(to);

  std::sort(paths.begin(), paths.end(), [&](const GraphPath &a, const GraphPath &b) {
    return PathLabels(graph, a) < PathLabels(graph, b);
  });
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  return paths;
}

std::vector<GraphPath> FindShortestPaths(const SchemaGraph &graph,
                                         std::string_view from_table,
                                         std::string_view to_table) {
  auto from = graph.FindTable(from_table);
  auto to = graph.FindTable(to_table);
  if (!from) throw Error("find_shortest_paths", "unknown table \"" + std::string(from_table) + "\"");
  if (!to) throw Error("find_shortest_paths", "unknown table \"" + std::string(to_table) + "\"");
  return FindShortestPaths(graph, *from, *to);
}

std::vector<std::string> PathLabels(const SchemaGraph &graph,
                                    const GraphPath &path) {
  std::vector<std::string> labels;
  labels.reserve(path.nodes.size());
  for (NodeIndex n : path.nodes) labels.push_back(graph.node(n).label);
  return labels;
}

void GraphHighlight::AddEdge(const std::string &a, const std::string &b) {
  edges.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
}

bool GraphHighlight::HasEdge(const std::string &a, const std::string &b) const {
  return edges.count(a < b ? std::make_pair(a, b) : std::make_pair(b, a)) != 0;
}

GraphHighlight HighlightPaths(const SchemaGraph &graph,
                              const std::vector<GraphPath> &paths) {
  GraphHighlight highlight;
  for (const auto &path : paths) {
    for (size_t i = 0; i < path.nodes.size(); ++i) {
      highlight.nodes.insert(graph.node(path.nodes[i]).id);
      if (i > 0) {
        highlight.AddEdge(graph.node(path.nodes[i - 1]).id,
                          graph.node(path.nodes[i]).id);
      }
    }
  }
  return highlight;
}

namespace {

std::string DotQuote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void CheckHighlight(const SchemaGraph &graph, const GraphHighlight &highlight) {
  for (const auto &id : highlight.nodes) {
    if (!graph.FindNode(id)) {
      throw Error("export_graph", "highlight names unknown node \"" + id + "\"");
    }
  }
  for (const auto &[a, b] : highlight.edges) {
    auto na = graph.FindNode(a);
    auto nb = graph.FindNode(b);
    if (!na || !nb || !graph.HasEdge(*na, *nb)) {
      throw Error("export_graph", "highlight names unknown edge " + a + " -- " + b);
    }
  }
}

}  // namespace

std::string ExportGraph(const SchemaGraph &graph,
                        const GraphHighlight &highlight, GraphFormat format) {
  CheckHighlight(graph, highlight);
  const auto edges = graph.Edges();
  if (format == GraphFormat::kJson) {
    json nodes = json::array();
    for (const auto &node : graph.nodes()) {
      nodes.push_back({{"id", node.id},
                       {"kind", node.kind == NodeKind::kTable ? "table" : "attr"},
                       {"label", node.label},
                       {"highlight", highlight.nodes.count(node.id) != 0}});
    }
    json edge_list = json::array();
    for (const auto &[t, a] : edges) {
      const auto &ta = graph.node(t).id;
      const auto &aa = graph.node(a).id;
      edge_list.push_back({{"a", ta}, {"b", aa}, {"highlight", highlight.HasEdge(ta, aa)}});
    }
    return json{{"nodes", nodes}, {"edges", edge_list}}.dump(2);
  }

  std::ostringstream out;
  out << "graph schema {\n";
  for (const auto &node : graph.nodes()) {
    out << "  " << DotQuote(node.id) << " [label=" << DotQuote(node.label)
        << ", shape=" << (node.kind == NodeKind::kTable ? "box" : "ellipse");
    if (highlight.nodes.count(node.id) != 0) out << ", color=\"blue\"";
    out << "];\n";
  }
  for (const auto &[t, a] : edges) {
    const auto &ta = graph.node(t).id;
    const auto &aa = graph.node(a).id;
    out << "  " << DotQuote(ta) << " -- " << DotQuote(aa);
    if (highlight.HasEdge(ta, aa)) out << " [color=\"blue\"]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

SchemaGraph ParseGraphJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError("parse_graph", e.what(), 0);
  }
  SchemaGraph graph;
  for (const auto &node : doc.at("nodes")) {
    std::string kind = node.at("kind").get<std::string>();
    if (kind != "table" && kind != "attr") {
      throw Error("parse_graph", "unknown node kind \"" + kind + "\"");
    }
    NodeIndex index = graph.AddNode(kind == "table" ? NodeKind::kTable : NodeKind::kAttr,
                                    node.at("label").get<std::string>());
    if (graph.node(index).id != node.at("id").get<std::string>()) {
      throw Error("parse_graph", "node id does not match its kind and label: " +
                                     node.at("id").get<std::string>());
    }
  }
  for (const auto &edge : doc.at("edges")) {
    auto a = graph.FindNode(edge.at("a").get<std::string>());
    auto b = graph.FindNode(edge.at("b").get<std::string>());
    if (!a || !b) throw Error("parse_graph", "edge references unknown node");
    NodeIndex t = *a;
    NodeIndex c = *b;
    if (graph.node(t).kind == NodeKind::kAttr) std::swap(t, c);
    graph.AddEdge(t, c, graph.node(c).label);
  }
  return graph;
}

}  // namespace nlidb
