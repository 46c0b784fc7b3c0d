#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcnse/experiment.hpp"

namespace {

using gcnse::experiment::ExperimentConfig;

struct CommonOptions {
  std::string config_path;
  std::string graph_path;
  std::string out_path;
  std::string scheme;
  std::string variant;
  std::uint64_t seed = 0;
  int runs = 0;
  int workers = 0;
  bool seed_set = false;
  bool runs_set = false;
  bool workers_set = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file (key=value lines)");
  cmd->add_option("--out", opts.out_path, "output file or directory");
  auto* seed = cmd->add_option("--seed", opts.seed, "master seed override");
  auto* runs = cmd->add_option("--runs", opts.runs, "number of training runs");
  auto* workers = cmd->add_option("--workers", opts.workers, "concurrent training runs");
  cmd->add_option("--scheme", opts.scheme,
                  "weighting scheme: learned|learned-dual|uniform|exp-decay|frozen");
  cmd->add_option("--variant", opts.variant, "model variant: se|se-dual (alias for --scheme)");
  cmd->parse_complete_callback([seed, runs, workers, &opts]() {
    opts.seed_set = seed->count() > 0;
    opts.runs_set = runs->count() > 0;
    opts.workers_set = workers->count() > 0;
  });
}

ExperimentConfig resolve_config(const CommonOptions& opts) {
  ExperimentConfig config;
  if (!opts.config_path.empty()) config = gcnse::experiment::parse_config_file(opts.config_path);
  if (const char* env = std::getenv("GCNSE_WORKERS"); env != nullptr && *env != '\0') {
    config.workers = std::atoi(env);
  }
  if (opts.seed_set) gcnse::experiment::apply_config_entry(config, "seed", std::to_string(opts.seed));
  if (opts.runs_set) config.num_runs = opts.runs;
  if (opts.workers_set) config.workers = opts.workers;
  if (!opts.scheme.empty()) {
    gcnse::experiment::apply_config_entry(config, "scheme", opts.scheme);
  }
  if (!opts.variant.empty()) {
    if (opts.variant == "se") config.scheme = gcnse::WeightingScheme::learned_se();
    else if (opts.variant == "se-dual") config.scheme = gcnse::WeightingScheme::learned_se_dual();
    else throw std::invalid_argument("--variant must be 'se' or 'se-dual'");
  }
  if (!opts.out_path.empty()) config.out_dir = opts.out_path;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic-graph node classification with learned snapshot attention"};
  app.require_subcommand(1);

  CommonOptions gen_opts, train_opts, explain_opts, repro_opts, eval_opts;
  std::string scenario_override;
  std::string figure_id;
  std::string model_path;

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic scenario graph");
  add_common(generate, gen_opts);
  generate->add_option("--scenario", scenario_override,
                       "base|deletion|densify|anomaly|single-relevant|transition|periodic");

  CLI::App* train = app.add_subcommand("train", "train one model and emit metrics + attention");
  add_common(train, train_opts);
  train->add_option("--graph", train_opts.graph_path, "input graph file")->required();

  CLI::App* explain_cmd =
      app.add_subcommand("explain", "attention averaging, masking importance, correlation");
  add_common(explain_cmd, explain_opts);
  explain_cmd->add_option("--graph", explain_opts.graph_path, "input graph file")->required();

  CLI::App* reproduce = app.add_subcommand("reproduce", "run a named scenario study end to end");
  add_common(reproduce, repro_opts);
  reproduce->add_option("--figure", figure_id, "fig3|fig4|fig5|fig8|fig9|fig10|fig11")->required();

  CLI::App* eval = app.add_subcommand("eval", "evaluate a saved model on a graph");
  add_common(eval, eval_opts);
  eval->add_option("--model", model_path, "saved model file")->required();
  eval->add_option("--graph", eval_opts.graph_path, "input graph file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      ExperimentConfig config = resolve_config(gen_opts);
      if (!scenario_override.empty()) config.scenario.name = scenario_override;
      const std::string out = gen_opts.out_path.empty() ? "graph.txt" : gen_opts.out_path;
      return gcnse::experiment::cmd_generate(config, out);
    }
    if (train->parsed()) {
      ExperimentConfig config = resolve_config(train_opts);
      return gcnse::experiment::cmd_train(config, train_opts.graph_path, config.out_dir);
    }
    if (explain_cmd->parsed()) {
      ExperimentConfig config = resolve_config(explain_opts);
      return gcnse::experiment::cmd_explain(config, explain_opts.graph_path, config.out_dir);
    }
    if (reproduce->parsed()) {
      ExperimentConfig config = resolve_config(repro_opts);
      return gcnse::experiment::cmd_reproduce(config, figure_id, config.out_dir);
    }
    if (eval->parsed()) {
      ExperimentConfig config = resolve_config(eval_opts);
      return gcnse::experiment::cmd_eval(model_path, eval_opts.graph_path, config.out_dir);
    }
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << std::endl;
    return 2;
  }
  return 2;
}
