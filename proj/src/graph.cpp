#include "nasgnn/graph.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace nasgnn {

const char* to_string(ValidationIssue issue) {
  switch (issue) {
    case ValidationIssue::NodeLimitExceeded: return "NodeLimitExceeded";
    case ValidationIssue::EdgeLimitExceeded: return "EdgeLimitExceeded";
    case ValidationIssue::CycleDetected: return "CycleDetected";
    case ValidationIssue::BadEndpoints: return "BadEndpoints";
    case ValidationIssue::DisconnectedNode: return "DisconnectedNode";
    case ValidationIssue::UnknownNodeType: return "UnknownNodeType";
    case ValidationIssue::MalformedEdge: return "MalformedEdge";
  }
  return "UnknownIssue";
}

std::string_view node_type_name(NodeType t) {
  switch (t) {
    case NodeType::Input: return "input";
    case NodeType::Output: return "output";
    case NodeType::Conv3x3: return "conv3x3";
    case NodeType::Conv1x1: return "conv1x1";
    case NodeType::MaxPool3x3: return "maxpool3x3";
  }
  return "?";
}

std::optional<NodeType> node_type_from_name(std::string_view name) {
  if (name == "input") return NodeType::Input;
  if (name == "output") return NodeType::Output;
  if (name == "conv3x3") return NodeType::Conv3x3;
  if (name == "conv1x1") return NodeType::Conv1x1;
  if (name == "maxpool3x3") return NodeType::MaxPool3x3;
  return std::nullopt;
}

CellGraph CellGraph::unchecked(std::vector<NodeType> nodes,
                               std::vector<Edge> edges,
                               std::optional<MetricRecord> label) {
  CellGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  g.label_ = std::move(label);
  return g;
}

std::vector<int> topological_order(const std::vector<NodeType>& nodes,
                                   const std::vector<Edge>& edges) {
  const int n = static_cast<int>(nodes.size());
  std::vector<int> in_degree(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (const auto& [a, b] : edges) {
    succ[a].push_back(b);
    ++in_degree[b];
  }

  // Smallest ready index first keeps the order canonical.
  std::set<int> ready;
  for (int v = 0; v < n; ++v) {
    if (in_degree[v] == 0) ready.insert(v);
  }

  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int w : succ[v]) {
      if (--in_degree[w] == 0) ready.insert(w);
    }
  }

  if (static_cast<int>(order.size()) != n) {
    throw ValidationError(ValidationIssue::CycleDetected,
                          "topological sort visited " +
                              std::to_string(order.size()) + " of " +
                              std::to_string(n) + " nodes");
  }
  return order;
}

namespace {

// Reachable set from `start` over the given adjacency (n <= 7, bitmask BFS).
std::uint8_t reachable_mask(int n, int start,
                            const std::array<std::uint8_t, 8>& adj) {
  std::uint8_t seen = static_cast<std::uint8_t>(1u << start);
  std::uint8_t frontier = seen;
  while (frontier != 0) {
    std::uint8_t next = 0;
    for (int v = 0; v < n; ++v) {
      if (frontier & (1u << v)) next |= adj[v];
    }
    frontier = next & static_cast<std::uint8_t>(~seen);
    seen |= next;
  }
  return seen;
}

}  // namespace

CellGraph validate_graph(const std::vector<NodeType>& nodes,
                         const std::vector<Edge>& edges,
                         std::optional<MetricRecord> label) {
  const int n = static_cast<int>(nodes.size());
  if (n > kMaxNodes) {
    throw ValidationError(ValidationIssue::NodeLimitExceeded,
                          std::to_string(n) + " nodes (limit " +
                              std::to_string(kMaxNodes) + ")");
  }
  if (static_cast<int>(edges.size()) > kMaxEdges) {
    throw ValidationError(ValidationIssue::EdgeLimitExceeded,
                          std::to_string(edges.size()) + " edges (limit " +
                              std::to_string(kMaxEdges) + ")");
  }

  std::set<Edge> seen_edges;
  for (const auto& e : edges) {
    if (e.first < 0 || e.first >= n || e.second < 0 || e.second >= n) {
      throw ValidationError(ValidationIssue::MalformedEdge,
                            "edge (" + std::to_string(e.first) + "," +
                                std::to_string(e.second) +
                                ") has an out-of-range endpoint");
    }
    if (!seen_edges.insert(e).second) {
      throw ValidationError(ValidationIssue::MalformedEdge,
                            "duplicate edge (" + std::to_string(e.first) +
                                "," + std::to_string(e.second) + ")");
    }
  }

  int input_idx = -1;
  int output_idx = -1;
  int inputs = 0;
  int outputs = 0;
  for (int v = 0; v < n; ++v) {
    if (nodes[v] == NodeType::Input) {
      ++inputs;
      input_idx = v;
    } else if (nodes[v] == NodeType::Output) {
      ++outputs;
      output_idx = v;
    }
  }
  if (inputs != 1 || outputs != 1) {
    throw ValidationError(ValidationIssue::BadEndpoints,
                          "expected exactly one input and one output, got " +
                              std::to_string(inputs) + " and " +
                              std::to_string(outputs));
  }

  // Detects every cycle, self-loops included.
  topological_order(nodes, edges);

  std::array<std::uint8_t, 8> succ{};
  std::array<std::uint8_t, 8> pred{};
  for (const auto& [a, b] : edges) {
    succ[a] |= static_cast<std::uint8_t>(1u << b);
    pred[b] |= static_cast<std::uint8_t>(1u << a);
  }
  const std::uint8_t from_input = reachable_mask(n, input_idx, succ);
  const std::uint8_t to_output = reachable_mask(n, output_idx, pred);
  for (int v = 0; v < n; ++v) {
    const std::uint8_t bit = static_cast<std::uint8_t>(1u << v);
    if (!(from_input & bit) || !(to_output & bit)) {
      throw ValidationError(ValidationIssue::DisconnectedNode,
                            "node " + std::to_string(v) +
                                " lies on no input->output path");
    }
  }

  CellGraph g;
  g.nodes_ = nodes;
  g.edges_ = edges;
  g.label_ = std::move(label);
  return g;
}

CellGraph validate_graph(const std::vector<std::string>& node_names,
                         const std::vector<Edge>& edges,
                         std::optional<MetricRecord> label) {
  std::vector<NodeType> nodes;
  nodes.reserve(node_names.size());
  for (const auto& name : node_names) {
    const auto t = node_type_from_name(name);
    if (!t) {
      throw ValidationError(ValidationIssue::UnknownNodeType,
                            "\"" + name + "\"");
    }
    nodes.push_back(*t);
  }
  return validate_graph(nodes, edges, std::move(label));
}

Neighborhoods neighborhoods(const CellGraph& g) {
  Neighborhoods nb;
  nb.incoming.resize(g.num_nodes());
  nb.outgoing.resize(g.num_nodes());
  for (const auto& [a, b] : g.edges()) {
    nb.incoming[b].push_back(a);
    nb.outgoing[a].push_back(b);
  }
  for (auto& v : nb.incoming) std::sort(v.begin(), v.end());
  for (auto& v : nb.outgoing) std::sort(v.begin(), v.end());
  return nb;
}

FeatureVector depth_width_features(const CellGraph& g) {
  const int n = g.num_nodes();
  int input_idx = 0;
  for (int v = 0; v < n; ++v) {
    if (g.nodes()[v] == NodeType::Input) input_idx = v;
  }

  // level[v] = longest-path distance from Input, well-defined because every
  // node is reachable from Input in a valid cell.
  const auto order = topological_order(g.nodes(), g.edges());
  std::vector<int> level(n, 0);
  std::vector<std::vector<int>> pred(n);
  for (const auto& [a, b] : g.edges()) pred[b].push_back(a);
  for (int v : order) {
    if (v == input_idx) continue;
    int lv = 0;
    for (int u : pred[v]) lv = std::max(lv, level[u] + 1);
    level[v] = lv;
  }

  int depth = 0;
  std::vector<int> per_level(n, 0);
  for (int v = 0; v < n; ++v) {
    depth = std::max(depth, level[v]);
    ++per_level[level[v]];
  }
  const int width = *std::max_element(per_level.begin(), per_level.end());

  int c3 = 0, c1 = 0, mp = 0;
  for (NodeType t : g.nodes()) {
    if (t == NodeType::Conv3x3) ++c3;
    if (t == NodeType::Conv1x1) ++c1;
    if (t == NodeType::MaxPool3x3) ++mp;
  }

  FeatureVector f(kDepthWidthFeatureDim);
  f << n, g.num_edges(), depth, width, c3, c1, mp;
  return f;
}

FeatureVector one_hot_encode(const CellGraph& g) {
  FeatureVector f = FeatureVector::Zero(kOneHotFeatureDim);
  for (int v = 0; v < g.num_nodes(); ++v) {
    f(v * kNumNodeTypes + type_id(g.nodes()[v])) = 1.0;
  }
  const int adj_base = kMaxNodes * kNumNodeTypes;
  for (const auto& [a, b] : g.edges()) {
    f(adj_base + a * kMaxNodes + b) = 1.0;
  }
  return f;
}

std::uint64_t canonical_hash_u64(const CellGraph& g) {
  const auto order = topological_order(g.nodes(), g.edges());
  std::vector<int> rank(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = static_cast<int>(i);
  }

  std::vector<Edge> canon_edges;
  canon_edges.reserve(g.edges().size());
  for (const auto& [a, b] : g.edges()) {
    canon_edges.emplace_back(rank[a], rank[b]);
  }
  std::sort(canon_edges.begin(), canon_edges.end());

  // FNV-1a over the canonical byte sequence.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  mix(static_cast<std::uint8_t>(g.num_nodes()));
  for (int v : order) mix(static_cast<std::uint8_t>(type_id(g.nodes()[v])));
  mix(0xff);
  for (const auto& [a, b] : canon_edges) {
    mix(static_cast<std::uint8_t>(a));
    mix(static_cast<std::uint8_t>(b));
  }
  return h;
}

std::string canonical_hash(const CellGraph& g) {
  const std::uint64_t h = canonical_hash_u64(g);
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 0; i < 16; ++i) {
    s[15 - i] = digits[(h >> (4 * i)) & 0xf];
  }
  return s;
}

}  // namespace nasgnn
