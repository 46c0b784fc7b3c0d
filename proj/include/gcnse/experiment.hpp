#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcnse/explain.hpp"
#include "gcnse/graph.hpp"
#include "gcnse/model.hpp"
#include "gcnse/synthgen.hpp"

namespace gcnse::experiment {

/// Named synthetic scenario plus its knobs. Only the fields of the named
/// scenario apply; the rest keep their defaults.
struct ScenarioSpec {
  std::string name = "base";
  GenParams gen;

  // deletion
  std::vector<int> deletion_steps = {3, 8, 9};
  double deletion_fraction = 0.5;

  // densify (labels are static for this scenario unless transition_prob is
  // set explicitly; an empty class list boosts every class)
  std::vector<int> densify_steps = {1, 4, 5, 8};
  std::vector<int> densify_classes;
  double p_intra_hi = 0.40;
  double p_inter_hi = 0.10;
  DensifyPairRule densify_rule = DensifyPairRule::AnyBoostedEndpoint;

  // anomaly
  std::vector<int> anomaly_steps = {5};

  // transition: labels reshuffle with probability transition_high when
  // entering step s+1 for each listed s, and drift with transition_low
  // elsewhere
  std::vector<int> transition_steps = {3};
  double transition_high = 0.80;
  double transition_low = 0.05;

  // periodic: a fresh block of `period` snapshots (label drift
  // period_transition inside the block) tiled period_repeats times with edge
  // flip noise
  int period = 3;
  int period_repeats = 4;
  double flip_prob = 0.01;
  double period_transition = 0.30;
};

/// Builds the named scenario's graph.
DynamicGraph build_scenario(const ScenarioSpec& spec);

/// The unmanipulated graph the scenario modifies (same generator seed), for
/// paired baseline comparisons. Equals build_scenario for "base".
DynamicGraph build_scenario_baseline(const ScenarioSpec& spec);

struct ExperimentConfig {
  ScenarioSpec scenario;
  TrainConfig train;
  WeightingScheme scheme = WeightingScheme::learned_se();
  int num_runs = 20;
  int runs_per_mask = 20;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  bool use_validation = false;
  std::string out_dir = "out";
};

/// Flat key=value text with an optional [scenario] section. '#' starts a
/// comment line.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double reference = 0.0;
};

struct FigureResult {
  std::string figure;
  std::vector<CheckResult> checks;
  std::vector<double> attention_mean;

  bool all_pass() const {
    for (const CheckResult& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

/// Runs one named reproduction end to end and writes its bundle (per-run and
/// averaged attention CSVs, graphs, summary.json) under out_dir. Known ids:
/// fig3, fig4, fig5, fig8, fig9, fig10, fig11.
FigureResult reproduce_figure(const ExperimentConfig& config, const std::string& figure_id,
                              const std::string& out_dir);

// Subcommand bodies; each returns a process exit code.
int cmd_generate(const ExperimentConfig& config, const std::string& out_path);
int cmd_train(const ExperimentConfig& config, const std::string& graph_path,
              const std::string& out_dir);
int cmd_eval(const std::string& model_path, const std::string& graph_path,
             const std::string& out_dir);
int cmd_explain(const ExperimentConfig& config, const std::string& graph_path,
                const std::string& out_dir);
int cmd_reproduce(const ExperimentConfig& config, const std::string& figure_id,
                  const std::string& out_dir);

void write_attention_runs_csv(const std::string& path,
                              const std::vector<std::vector<double>>& runs);
void write_attention_mean_csv(const std::string& path, std::span<const double> mean);

}  // namespace gcnse::experiment
