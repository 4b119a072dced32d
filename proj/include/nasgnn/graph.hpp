#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nasgnn/errors.hpp"

namespace nasgnn {

/// Node operations of an architecture cell. The integer values are stable:
/// they index the embedding table and the one-hot encoding.
enum class NodeType : int {
  Input = 0,
  Output = 1,
  Conv3x3 = 2,
  Conv1x1 = 3,
  MaxPool3x3 = 4,
};

inline constexpr int kNumNodeTypes = 5;
inline constexpr int kMaxNodes = 7;
inline constexpr int kMaxEdges = 9;

inline int type_id(NodeType t) { return static_cast<int>(t); }

std::string_view node_type_name(NodeType t);
std::optional<NodeType> node_type_from_name(std::string_view name);

using Edge = std::pair<int, int>;

/// Validation-accuracy label of a cell, with an optional test accuracy.
struct MetricRecord {
  double val_acc = 0.0;
  std::optional<double> test_acc;
};

/// A validated architecture cell: a small labeled DAG with a unique Input
/// and Output node in which every node lies on some Input->Output path.
/// Immutable once constructed; safe to share across threads.
class CellGraph {
 public:
  const std::vector<NodeType>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::optional<MetricRecord>& label() const { return label_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Copy with the label replaced; structure is shared unchanged.
  CellGraph with_label(MetricRecord m) const {
    CellGraph g = *this;
    g.label_ = std::move(m);
    return g;
  }

  /// Constructs without any validation. Intended for tests that need
  /// structurally out-of-contract inputs (e.g. a single isolated node or a
  /// fully edge-reversed cell); everything else goes through validate_graph.
  static CellGraph unchecked(std::vector<NodeType> nodes,
                             std::vector<Edge> edges,
                             std::optional<MetricRecord> label = {});

 private:
  CellGraph() = default;
  friend CellGraph validate_graph(const std::vector<NodeType>&,
                                  const std::vector<Edge>&,
                                  std::optional<MetricRecord>);

  std::vector<NodeType> nodes_;
  std::vector<Edge> edges_;
  std::optional<MetricRecord> label_;
};

/// Per-node directed adjacency, both directions, each list sorted ascending.
struct Neighborhoods {
  std::vector<std::vector<int>> incoming;
  std::vector<std::vector<int>> outgoing;
};

/// Checks every structural invariant and returns the immutable cell.
/// Throws ValidationError naming the first violated rule.
CellGraph validate_graph(const std::vector<NodeType>& nodes,
                         const std::vector<Edge>& edges,
                         std::optional<MetricRecord> label = {});

/// Name-based overload for raw ingestion ("input", "conv3x3", ...).
CellGraph validate_graph(const std::vector<std::string>& node_names,
                         const std::vector<Edge>& edges,
                         std::optional<MetricRecord> label = {});

Neighborhoods neighborhoods(const CellGraph& g);

/// Topological order, smallest index first among ready nodes. For any valid
/// cell this succeeds and visits every node.
std::vector<int> topological_order(const std::vector<NodeType>& nodes,
                                   const std::vector<Edge>& edges);

using FeatureVector = Eigen::VectorXd;

/// [|V|, |E|, depth, width, #conv3x3, #conv1x1, #maxpool3x3] where depth is
/// the edge count of the longest Input->Output path and width the largest
/// number of nodes sharing a topological level (longest-path distance from
/// Input).
FeatureVector depth_width_features(const CellGraph& g);

inline constexpr int kDepthWidthFeatureDim = 7;

/// Fixed 84-entry encoding: 7x5 zero-padded node one-hots followed by the
/// flattened 7x7 zero-padded adjacency matrix. Order-sensitive by design.
FeatureVector one_hot_encode(const CellGraph& g);

inline constexpr int kOneHotFeatureDim =
    kMaxNodes * kNumNodeTypes + kMaxNodes * kMaxNodes;

/// Deterministic fingerprint of (canonical topological order, node types,
/// edges). Equal for identical serialized graphs across runs; not an
/// isomorphism invariant.
std::uint64_t canonical_hash_u64(const CellGraph& g);
std::string canonical_hash(const CellGraph& g);

}  // namespace nasgnn
