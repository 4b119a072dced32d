#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nasgnn/graph.hpp"

namespace nasgnn {

inline constexpr int kSyntheticOracleVersion = 1;

struct Provenance {
  enum class Source { Imported, Synthetic };
  Source source = Source::Imported;
  std::optional<std::uint64_t> seed;
  std::optional<int> oracle_version;
};

/// A labeled, validated, duplicate-free collection of cells. Immutable by
/// convention once built; freely shareable across threads.
struct Dataset {
  std::vector<CellGraph> graphs;
  Provenance provenance;

  std::size_t size() const { return graphs.size(); }
};

struct LoadResult {
  Dataset dataset;
  std::size_t duplicates_dropped = 0;
};

/// Reads one JSON object per line:
///   {"nodes":["input","conv3x3","output"],"edges":[[0,1],[1,2]],
///    "val_acc":0.94,"test_acc":0.93}
/// `val_acc`/`test_acc` are optional on read; lines starting with "#!meta "
/// carry provenance. With dedup, later canonical-hash duplicates are
/// dropped and counted; without it they raise DuplicateGraphError.
LoadResult load_jsonl(const std::string& path, bool dedup);

/// Writes the dataset back in the same format, one graph per line, with a
/// leading "#!meta " provenance line. Atomic (temp file + rename).
void save_jsonl(const std::string& path, const Dataset& dataset);

/// Streams every valid cell with 2..max_nodes node slots (slot 0 = input,
/// last slot = output, interior slots each one of the 3 ops) and edge sets
/// drawn from the slot-ordered pairs, at most max_edges edges, skipping
/// canonical-hash duplicates. Deterministic emission order.
void enumerate_cells(int max_nodes, int max_edges,
                     const std::function<void(const CellGraph&)>& emit);

std::size_t count_cells(int max_nodes, int max_edges);

/// Deterministic stand-in for a real validation accuracy, linear in
/// structural features:
///   0.70 + 0.030*#conv3x3 + 0.015*#conv1x1 - 0.020*#maxpool3x3
///        + 0.020*depth/(|V|-1) + 0.010*min(width, 3), clamped to [0, 1].
double synthetic_oracle(const CellGraph& g);

/// Samples n distinct valid cells (node count drawn uniformly from `sizes`,
/// then rejection sampling over slot-ordered edge sets), each labeled by
/// the synthetic oracle. Deterministic given seed. Throws
/// ExhaustedSpaceError when the requested sizes cannot yield n distinct
/// cells.
Dataset gen_synthetic(std::size_t n, std::uint64_t seed,
                      const std::vector<int>& sizes = {2, 3, 4, 5, 6, 7});

/// Label histogram over the evaluator's 9 bins, node-count histogram and
/// operation totals.
struct StatsReport {
  std::size_t n = 0;
  std::array<std::size_t, 9> label_bins{};
  std::map<int, std::size_t> node_count_hist;
  std::size_t conv3x3_total = 0;
  std::size_t conv1x1_total = 0;
  std::size_t maxpool_total = 0;
  double label_min = 0.0;
  double label_max = 0.0;
};

StatsReport dataset_stats(const Dataset& dataset);

std::string stats_to_json(const StatsReport& s);
std::string stats_to_csv(const StatsReport& s);

/// Bin index of a ground-truth accuracy: 9 equal-width bins over [0, 1],
/// bin k covering [k/9, (k+1)/9) with the last bin closed at 1.
int accuracy_bin(double acc);

}  // namespace nasgnn
