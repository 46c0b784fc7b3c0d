#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "gcnse/graph.hpp"

namespace gcnse {

/// Dynamic stochastic block model: class-conditioned edge probabilities with
/// per-timestep label transition probabilities. Edges are drawn fresh at every
/// timestep; nothing persists between snapshots.
struct GenParams {
  int num_nodes = 200;
  int num_classes = 4;
  int num_timesteps = 10;
  double p_intra = 0.10;
  double p_inter = 0.005;
  // Probability that a node switches to a different class when entering step
  // t. Empty means 0.05 everywhere; entry 0 is ignored.
  std::vector<double> transition_prob;
  std::uint64_t seed = 1;

  void validate() const;
  std::vector<double> effective_transition() const;
};

/// Which pairs get the boosted inter-class probability in densify().
enum class DensifyPairRule {
  AnyBoostedEndpoint,   // any mixed pair touching a boosted class
  ExactlyOneBoosted,    // only pairs with exactly one endpoint in a boosted class
};

DynamicGraph generate(const GenParams& params);

/// Removes a uniformly random floor(fraction * |E_t|) edge subset at each
/// listed timestep; other snapshots are untouched.
DynamicGraph delete_edges(const DynamicGraph& graph, const std::set<int>& timesteps, double fraction,
                          std::uint64_t seed);

/// Regenerates the listed snapshots with boosted probabilities: same-class
/// pairs of a listed class draw with p_intra_hi, mixed pairs touching a listed
/// class draw with p_inter_hi (per `rule`), all other pairs keep the base
/// probabilities.
DynamicGraph densify(const DynamicGraph& graph, const GenParams& base, const std::set<int>& timesteps,
                     const std::set<int>& classes, double p_intra_hi, double p_inter_hi,
                     std::uint64_t seed, DensifyPairRule rule = DensifyPairRule::AnyBoostedEndpoint);

/// Replaces labels at the listed timesteps with uniform random classes and
/// regenerates those snapshots' edges from the new labels with the base
/// probabilities. The final timestep is the prediction target and must not be
/// listed. Later timesteps keep the original label sequence.
DynamicGraph randomize_labels(const DynamicGraph& graph, const GenParams& base,
                              const std::set<int>& timesteps, std::uint64_t seed);

/// Concatenates the block `repeats` times; every potential edge slot of every
/// output snapshot flips (present <-> absent) independently with flip_prob.
/// Labels (and attributes, if present) are copied unchanged.
DynamicGraph make_periodic(const DynamicGraph& base_block, int repeats, double flip_prob,
                           std::uint64_t seed);

}  // namespace gcnse
