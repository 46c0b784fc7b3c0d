#include "gcnse/explain.hpp"

#include <cmath>
#include <stdexcept>

#include "gcnse/metrics.hpp"
#include "gcnse/parallel.hpp"
#include "gcnse/rng.hpp"

namespace gcnse::explain {

namespace {

constexpr std::uint64_t kRunStream = 50000;

struct RunResult {
  std::vector<double> attention;
  double accuracy = 0.0;
};

NodeSplit run_split(const DynamicGraph& graph, const TrainConfig& config, std::uint64_t run_seed) {
  return split_nodes(graph.num_nodes, config.train_ratio, config.val_ratio, config.test_ratio,
                     run_seed);
}

RunResult single_run(const DynamicGraph& graph, const TrainConfig& config,
                     const WeightingScheme& scheme, std::uint64_t run_seed, bool use_validation) {
  const NodeSplit split = run_split(graph, config, run_seed);
  const TrainResult trained = train(graph, config, scheme, split, run_seed);
  RunResult result;
  result.attention = trained.attention;
  const std::vector<int> pred = predict(trained.params, graph, scheme, config);
  const std::vector<int>& eval_mask = use_validation ? split.val : split.test;
  result.accuracy = metrics::accuracy(pred, graph.labels.back(), eval_mask);
  return result;
}

double sample_mean(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

bool all_equal(std::span<const double> x) {
  for (double v : x) {
    if (v != x[0]) return false;
  }
  return true;
}

double population_std(std::span<const double> x) {
  const double mean = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

}  // namespace

MaskedWeights::MaskedWeights(std::vector<double> base_weights, int index)
    : base(std::move(base_weights)), masked_index(index) {
  if (index < 0 || index >= static_cast<int>(base.size())) {
    throw std::invalid_argument("MaskedWeights: index out of range");
  }
}

std::vector<double> MaskedWeights::values() const {
  std::vector<double> w = base;
  w[masked_index] = 0.0;
  return w;
}

AttentionBatch collect_attention(const DynamicGraph& graph, const TrainConfig& config,
                                 const WeightingScheme& scheme, int num_runs, std::uint64_t seed,
                                 int workers) {
  if (num_runs < 1) throw std::invalid_argument("collect_attention: num_runs must be >= 1");
  AttentionBatch batch;
  batch.runs.resize(num_runs);
  parallel_for(num_runs, workers, [&](int i) {
    const std::uint64_t run_seed = mix_seed(seed, kRunStream + static_cast<std::uint64_t>(i));
    batch.runs[i] = single_run(graph, config, scheme, run_seed, false).attention;
  });
  const int t_count = graph.num_timesteps();
  batch.mean.assign(t_count, 0.0);
  for (const std::vector<double>& run : batch.runs) {
    for (int t = 0; t < t_count; ++t) batch.mean[t] += run[t];
  }
  for (double& v : batch.mean) v /= static_cast<double>(num_runs);
  return batch;
}

std::vector<double> average_attention(const DynamicGraph& graph, const TrainConfig& config,
                                      const WeightingScheme& scheme, int num_runs,
                                      std::uint64_t seed, int workers) {
  return collect_attention(graph, config, scheme, num_runs, seed, workers).mean;
}

ImportanceVector importance(const DynamicGraph& graph, const std::vector<double>& frozen_weights,
                            const TrainConfig& config, int runs_per_mask, std::uint64_t seed,
                            int workers, bool use_validation) {
  if (runs_per_mask < 1) throw std::invalid_argument("importance: runs_per_mask must be >= 1");
  const int t_count = graph.num_timesteps();
  if (static_cast<int>(frozen_weights.size()) != t_count) {
    throw std::invalid_argument("importance: frozen weights length must equal the timestep count");
  }
  for (double w : frozen_weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("importance: frozen weights must be nonnegative");
  }

  // Condition 0 is the unmasked baseline; condition k+1 masks timestep k.
  // Every condition reuses the same seed set, so drops are paired.
  const int conditions = t_count + 1;
  std::vector<std::vector<double>> accuracy(conditions,
                                            std::vector<double>(runs_per_mask, 0.0));
  std::vector<std::vector<double>> weights_by_condition;
  weights_by_condition.reserve(conditions);
  weights_by_condition.push_back(frozen_weights);
  for (int k = 0; k < t_count; ++k) {
    weights_by_condition.push_back(MaskedWeights(frozen_weights, k).values());
  }

  parallel_for(conditions * runs_per_mask, workers, [&](int job) {
    const int condition = job / runs_per_mask;
    const int run = job % runs_per_mask;
    const std::uint64_t run_seed = mix_seed(seed, kRunStream + static_cast<std::uint64_t>(run));
    const WeightingScheme scheme = WeightingScheme::frozen(weights_by_condition[condition]);
    accuracy[condition][run] = single_run(graph, config, scheme, run_seed, use_validation).accuracy;
  });

  ImportanceVector iv;
  iv.runs_per_mask = runs_per_mask;
  iv.reference_accuracy = sample_mean(accuracy[0]);
  iv.masked_accuracy.resize(t_count);
  iv.importance.resize(t_count);
  for (int k = 0; k < t_count; ++k) {
    iv.masked_accuracy[k] = sample_mean(accuracy[k + 1]);
    iv.importance[k] = iv.reference_accuracy - iv.masked_accuracy[k];
  }
  return iv;
}

double attention_importance_correlation(std::span<const double> weights,
                                        const ImportanceVector& importance) {
  return metrics::pearson(weights, importance.importance);
}

double autocorrelation(std::span<const double> weights, int lag) {
  const int t_count = static_cast<int>(weights.size());
  if (lag < 1 || lag >= t_count) throw std::invalid_argument("autocorrelation: lag out of range");
  if (all_equal(weights)) throw std::invalid_argument("autocorrelation: constant input");
  const double mean = sample_mean(weights);
  double denom = 0.0;
  for (double v : weights) denom += (v - mean) * (v - mean);
  if (denom == 0.0) throw std::invalid_argument("autocorrelation: constant input");
  double num = 0.0;
  for (int t = 0; t + lag < t_count; ++t) {
    num += (weights[t] - mean) * (weights[t + lag] - mean);
  }
  // Window-normalized: numerator averaged over T-lag terms, denominator over T.
  return (num / static_cast<double>(t_count - lag)) / (denom / static_cast<double>(t_count));
}

std::optional<int> detect_period(std::span<const double> weights, double threshold) {
  const int t_count = static_cast<int>(weights.size());
  if (t_count < 3) throw std::invalid_argument("detect_period: need at least 3 timesteps");
  const int max_lag = t_count / 2;
  if (max_lag < 2) return std::nullopt;
  std::vector<double> rho(max_lag + 1, 0.0);
  for (int lag = 1; lag <= max_lag; ++lag) rho[lag] = autocorrelation(weights, lag);

  std::vector<int> candidates;
  for (int lag = 2; lag <= max_lag; ++lag) {
    const bool rising = rho[lag] > rho[lag - 1];
    const bool falling = lag == max_lag || rho[lag] >= rho[lag + 1];
    if (rising && falling) candidates.push_back(lag);
  }
  if (candidates.empty()) return std::nullopt;
  int best_lag = candidates[0];
  for (int lag : candidates) {
    if (rho[lag] > rho[best_lag]) best_lag = lag;
  }
  const double best = rho[best_lag];
  if (best <= threshold) return std::nullopt;
  // Prefer the fundamental over its harmonics: a multiple of the true period
  // scores about as high, but a true longer period never leaves a strong peak
  // at its divisors.
  if (best > 0.0) {
    for (int lag : candidates) {
      if (rho[lag] >= 0.9 * best) return lag;
      if (best_lag % lag == 0 && rho[lag] >= 0.6 * best) return lag;
    }
  }
  return best_lag;
}

std::vector<int> detect_anomalies(std::span<const double> weights, double k_sigma) {
  if (weights.size() < 3) throw std::invalid_argument("detect_anomalies: need at least 3 timesteps");
  if (all_equal(weights)) return {};
  const double mean = sample_mean(weights);
  const double sd = population_std(weights);
  std::vector<int> out;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    if (weights[t] < mean - k_sigma * sd) out.push_back(static_cast<int>(t));
  }
  return out;
}

std::vector<int> detect_transitions(std::span<const double> weights, double jump_threshold) {
  if (weights.size() < 3) throw std::invalid_argument("detect_transitions: need at least 3 timesteps");
  if (all_equal(weights)) return {};
  const double sd = population_std(weights);
  std::vector<int> out;
  for (std::size_t t = 1; t < weights.size(); ++t) {
    if (weights[t] - weights[t - 1] > jump_threshold * sd) out.push_back(static_cast<int>(t));
  }
  return out;
}

}  // namespace gcnse::explain
