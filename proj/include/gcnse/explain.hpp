#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gcnse/graph.hpp"
#include "gcnse/model.hpp"

namespace gcnse::explain {

/// Attention vector with one timestep's weight forced to zero.
struct MaskedWeights {
  std::vector<double> base;
  int masked_index = -1;

  MaskedWeights(std::vector<double> base_weights, int index);
  std::vector<double> values() const;
};

/// Per-timestep accuracy drops under masking: importance[k] = reference - masked[k].
struct ImportanceVector {
  std::vector<double> importance;
  double reference_accuracy = 0.0;
  std::vector<double> masked_accuracy;
  int runs_per_mask = 0;
};

struct AttentionBatch {
  std::vector<std::vector<double>> runs;  // one attention vector per run
  std::vector<double> mean;
};

/// Trains num_runs models on fresh seed-derived splits and collects the final
/// attention vector of each run (topology-stream weights for the dual
/// variant).
AttentionBatch collect_attention(const DynamicGraph& graph, const TrainConfig& config,
                                 const WeightingScheme& scheme, int num_runs, std::uint64_t seed,
                                 int workers = 0);

std::vector<double> average_attention(const DynamicGraph& graph, const TrainConfig& config,
                                      const WeightingScheme& scheme, int num_runs,
                                      std::uint64_t seed, int workers = 0);

/// Masking protocol: trains the frozen-weight baseline (the same conv stack
/// with the SE block removed) runs_per_mask times for the reference accuracy,
/// then once per masked timestep over the identical seed set, and reports the
/// paired accuracy drops. Accuracy is measured on the test split unless
/// use_validation is set.
ImportanceVector importance(const DynamicGraph& graph, const std::vector<double>& frozen_weights,
                            const TrainConfig& config, int runs_per_mask, std::uint64_t seed,
                            int workers = 0, bool use_validation = false);

/// Pearson correlation between attention weights and importance entries.
double attention_importance_correlation(std::span<const double> weights,
                                        const ImportanceVector& importance);

/// Mean-centered autocorrelation at the given lag, window-normalized so an
/// exactly periodic series scores 1 at its period. Throws on constant input.
double autocorrelation(std::span<const double> weights, int lag);

/// The lag in [2, T/2] with the strongest autocorrelation peak. Only local
/// maxima count, so monotone series report nothing; near-ties (within 10%)
/// resolve to the smallest lag so a fundamental period beats its harmonics.
std::optional<int> detect_period(std::span<const double> weights, double threshold = 0.0);

/// Steps with w_t < mean(w) - k_sigma * std(w).
std::vector<int> detect_anomalies(std::span<const double> weights, double k_sigma);

/// Steps t >= 1 with w_t - w_{t-1} > jump_threshold * std(w).
std::vector<int> detect_transitions(std::span<const double> weights, double jump_threshold);

}  // namespace gcnse::explain
