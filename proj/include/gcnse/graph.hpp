#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcnse/sparse.hpp"
#include "gcnse/tensor.hpp"

namespace gcnse {

/// Undirected edge stored canonically with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

/// Symmetrically normalized adjacency with implicit self-loops,
/// D^{-1/2} (A + I) D^{-1/2}. Symmetric, every row holds its self-loop entry,
/// all values in (0, 1].
using NormalizedAdjacency = CsrMatrix;

/// Ordered sequence of graph snapshots over a fixed node set. Labels are
/// per-timestep class indices; attributes, when present, are one N x F dense
/// matrix per timestep with a shared F.
struct DynamicGraph {
  int num_nodes = 0;
  int num_classes = 0;
  std::vector<EdgeList> snapshots;
  std::vector<Tensor> attributes;           // empty, or one per timestep
  std::vector<std::vector<int>> labels;     // one length-N vector per timestep

  int num_timesteps() const { return static_cast<int>(snapshots.size()); }
  bool has_attributes() const { return !attributes.empty(); }
  int feature_dim() const { return attributes.empty() ? 0 : attributes.front().cols(); }

  /// Throws std::invalid_argument when any structural invariant is broken.
  void validate() const;
};

/// Disjoint train/validation/test node index sets covering all nodes.
struct NodeSplit {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  std::uint64_t seed = 0;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorts, deduplicates and canonicalizes (u < v); rejects self-loops and
/// out-of-range endpoints.
EdgeList canonical_edges(EdgeList edges, int num_nodes);

/// D^{-1/2} (A + I) D^{-1/2} with degrees taken after the self-loop is added.
/// Isolated nodes keep degree 1, so no division by zero occurs.
NormalizedAdjacency normalize(const EdgeList& edges, int num_nodes);

/// Same construction over weighted edges (weights > 0, canonical u < v pairs).
NormalizedAdjacency normalize_weighted(const std::vector<Edge>& edges,
                                       const std::vector<double>& weights, int num_nodes);

/// Sums all snapshot adjacencies (edge multiplicity becomes weight), then
/// normalizes with a unit self-loop and weighted degrees.
NormalizedAdjacency accumulate(const DynamicGraph& graph);

/// Identity matrix; rows are one-hot node encodings.
Tensor one_hot_features(int num_nodes);

/// Uniform random permutation cut at floor(train*n) and floor(val*n); the
/// remainder is the test set. Ratios must be positive and sum to 1 (1e-9).
NodeSplit split_nodes(int num_nodes, double train_ratio, double val_ratio, double test_ratio,
                      std::uint64_t seed);

DynamicGraph load_graph(const std::string& path);
DynamicGraph parse_graph(std::istream& in, const std::string& origin);
void save_graph(const DynamicGraph& graph, const std::string& path);
void write_graph(const DynamicGraph& graph, std::ostream& out);

}  // namespace gcnse
