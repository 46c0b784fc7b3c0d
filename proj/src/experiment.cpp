#include "gcnse/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gcnse/metrics.hpp"
#include "gcnse/parallel.hpp"
#include "gcnse/rng.hpp"

namespace gcnse::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kManipulationStream = 9000;
constexpr std::uint64_t kImportanceStream = 77;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument("config: bad boolean value '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(value);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (!token.empty()) parts.push_back(token);
  }
  return parts;
}

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  for (const std::string& part : split_list(value)) out.push_back(std::stoi(part));
  return out;
}

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  for (const std::string& part : split_list(value)) out.push_back(std::stod(part));
  return out;
}

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

std::string format_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  return out;
}

GenParams scenario_gen(const ScenarioSpec& spec) {
  GenParams g = spec.gen;
  if (!g.transition_prob.empty()) return g;  // explicit override wins
  if (spec.name == "densify") {
    g.transition_prob.assign(g.num_timesteps, 0.0);
  } else if (spec.name == "transition") {
    std::vector<double> tp(g.num_timesteps, spec.transition_low);
    tp[0] = 0.0;
    for (int s : spec.transition_steps) {
      if (s < 0 || s + 1 >= g.num_timesteps) {
        throw std::invalid_argument("transition scenario: step out of range");
      }
      tp[s + 1] = spec.transition_high;
    }
    g.transition_prob = std::move(tp);
  } else if (spec.name == "periodic") {
    g.num_timesteps = spec.period;
    g.transition_prob.assign(spec.period, spec.period_transition);
  }
  return g;
}

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double std_of(std::span<const double> v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double mean_at(std::span<const double> v, const std::vector<int>& idx) {
  double sum = 0.0;
  for (int i : idx) sum += v[i];
  return sum / static_cast<double>(idx.size());
}

int argmax_of(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

DynamicGraph build_scenario_baseline(const ScenarioSpec& spec) {
  if (spec.name == "periodic") return build_scenario(spec);
  return generate(scenario_gen(spec));
}

DynamicGraph build_scenario(const ScenarioSpec& spec) {
  const GenParams g = scenario_gen(spec);
  if (spec.name == "base" || spec.name == "transition") {
    return generate(g);
  }
  if (spec.name == "deletion") {
    return delete_edges(generate(g), as_set(spec.deletion_steps), spec.deletion_fraction,
                        mix_seed(g.seed, kManipulationStream + 1));
  }
  if (spec.name == "densify") {
    std::set<int> classes = as_set(spec.densify_classes);
    if (classes.empty()) {
      for (int c = 0; c < g.num_classes; ++c) classes.insert(c);
    }
    return densify(generate(g), g, as_set(spec.densify_steps), classes, spec.p_intra_hi,
                   spec.p_inter_hi, mix_seed(g.seed, kManipulationStream + 2), spec.densify_rule);
  }
  if (spec.name == "anomaly") {
    return randomize_labels(generate(g), g, as_set(spec.anomaly_steps),
                            mix_seed(g.seed, kManipulationStream + 3));
  }
  if (spec.name == "single-relevant") {
    std::set<int> steps;
    for (int t = 0; t + 1 < g.num_timesteps; ++t) steps.insert(t);
    return randomize_labels(generate(g), g, steps, mix_seed(g.seed, kManipulationStream + 4));
  }
  if (spec.name == "periodic") {
    const DynamicGraph block = generate(g);
    return make_periodic(block, spec.period_repeats, spec.flip_prob,
                         mix_seed(g.seed, kManipulationStream + 5));
  }
  throw std::invalid_argument("unknown scenario '" + spec.name + "'");
}

void apply_config_entry(ExperimentConfig& config, const std::string& key, const std::string& value) {
  ScenarioSpec& s = config.scenario;
  TrainConfig& t = config.train;
  if (key == "scenario") s.name = value;
  else if (key == "nodes") s.gen.num_nodes = std::stoi(value);
  else if (key == "classes") s.gen.num_classes = std::stoi(value);
  else if (key == "timesteps") s.gen.num_timesteps = std::stoi(value);
  else if (key == "p_intra") s.gen.p_intra = std::stod(value);
  else if (key == "p_inter") s.gen.p_inter = std::stod(value);
  else if (key == "transition_prob") {
    const std::vector<double> list = parse_double_list(value);
    if (list.size() == 1) {
      s.gen.transition_prob.assign(s.gen.num_timesteps, list[0]);
    } else {
      s.gen.transition_prob = list;
    }
  } else if (key == "seed") {
    config.seed = std::stoull(value);
    s.gen.seed = config.seed;  // one master seed drives generation and training
  }
  else if (key == "lr" || key == "learning_rate") t.learning_rate = std::stod(value);
  else if (key == "iterations") t.iterations = std::stoi(value);
  else if (key == "dropout") t.dropout = std::stod(value);
  else if (key == "se_ratio") t.se_ratio = std::stod(value);
  else if (key == "fc_bias") t.fc_bias = parse_bool(value);
  else if (key == "separate_combine_dropout") t.separate_combine_dropout = parse_bool(value);
  else if (key == "train_ratio") t.train_ratio = std::stod(value);
  else if (key == "val_ratio") t.val_ratio = std::stod(value);
  else if (key == "test_ratio") t.test_ratio = std::stod(value);
  else if (key == "scheme") {
    config.scheme = WeightingScheme::from_name(value, config.scheme.lambda,
                                               config.scheme.frozen_weights);
  } else if (key == "lambda") config.scheme.lambda = std::stod(value);
  else if (key == "frozen_weights") config.scheme.frozen_weights = parse_double_list(value);
  else if (key == "runs") config.num_runs = std::stoi(value);
  else if (key == "runs_per_mask") config.runs_per_mask = std::stoi(value);
  else if (key == "workers") config.workers = std::stoi(value);
  else if (key == "use_validation") config.use_validation = parse_bool(value);
  else if (key == "out") config.out_dir = value;
  else if (key == "deletion_steps") s.deletion_steps = parse_int_list(value);
  else if (key == "deletion_fraction") s.deletion_fraction = std::stod(value);
  else if (key == "densify_steps") s.densify_steps = parse_int_list(value);
  else if (key == "densify_classes") s.densify_classes = parse_int_list(value);
  else if (key == "p_intra_hi") s.p_intra_hi = std::stod(value);
  else if (key == "p_inter_hi") s.p_inter_hi = std::stod(value);
  else if (key == "densify_rule") {
    if (value == "any") s.densify_rule = DensifyPairRule::AnyBoostedEndpoint;
    else if (value == "exactly-one") s.densify_rule = DensifyPairRule::ExactlyOneBoosted;
    else throw std::invalid_argument("config: densify_rule must be 'any' or 'exactly-one'");
  } else if (key == "anomaly_steps") s.anomaly_steps = parse_int_list(value);
  else if (key == "transition_steps") s.transition_steps = parse_int_list(value);
  else if (key == "transition_high") s.transition_high = std::stod(value);
  else if (key == "transition_low") s.transition_low = std::stod(value);
  else if (key == "period") s.period = std::stoi(value);
  else if (key == "period_repeats") s.period_repeats = std::stoi(value);
  else if (key == "flip_prob") s.flip_prob = std::stod(value);
  else if (key == "period_transition") s.period_transition = std::stod(value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  ExperimentConfig config;
  std::string line;
  int line_no = 0;
  std::string section;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scenario" && !section.empty()) {
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_entry(config, key, value);
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

void write_attention_runs_csv(const std::string& path,
                              const std::vector<std::vector<double>>& runs) {
  std::ofstream out = open_out(path);
  out << "run,timestep,weight\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t t = 0; t < runs[r].size(); ++t) {
      out << r << "," << t << "," << format_value(runs[r][t]) << "\n";
    }
  }
}

void write_attention_mean_csv(const std::string& path, std::span<const double> mean) {
  std::ofstream out = open_out(path);
  out << "timestep,weight\n";
  for (std::size_t t = 0; t < mean.size(); ++t) {
    out << t << "," << format_value(mean[t]) << "\n";
  }
}

namespace {

void write_importance_csv(const fs::path& path, std::span<const double> weights,
                          const explain::ImportanceVector& iv) {
  std::ofstream out = open_out(path);
  out << "timestep,weight,m_k,I_k\n";
  for (std::size_t t = 0; t < iv.importance.size(); ++t) {
    out << t << "," << format_value(weights[t]) << "," << format_value(iv.masked_accuracy[t]) << ","
        << format_value(iv.importance[t]) << "\n";
  }
}

json checks_to_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const CheckResult& c : checks) {
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"reference", c.reference}});
  }
  return arr;
}

void write_summary(const fs::path& path, const FigureResult& result, json details) {
  json j;
  j["figure"] = result.figure;
  j["checks"] = checks_to_json(result.checks);
  j["pass"] = result.all_pass();
  if (!details.is_null()) j["details"] = std::move(details);
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

json metrics_to_json(const metrics::EvalReport& report) {
  return json{{"acc", report.accuracy},
              {"auc", report.auc},
              {"f1", report.f1},
              {"per_class_f1", report.per_class_f1},
              {"per_class_auc", report.per_class_auc}};
}

}  // namespace

int cmd_generate(const ExperimentConfig& config, const std::string& out_path) {
  const DynamicGraph graph = build_scenario(config.scenario);
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  save_graph(graph, out_path);
  return 0;
}

int cmd_train(const ExperimentConfig& config, const std::string& graph_path,
              const std::string& out_dir) {
  const DynamicGraph graph = load_graph(graph_path);
  const NodeSplit split = split_nodes(graph.num_nodes, config.train.train_ratio,
                                      config.train.val_ratio, config.train.test_ratio, config.seed);
  const TrainResult result = train(graph, config.train, config.scheme, split, config.seed);
  const ForwardResult fwd = forward(graph, result.params, config.scheme, 0, false, config.train);
  const std::vector<int> pred = argmax_rows(fwd.probs);
  const metrics::EvalReport report =
      metrics::evaluate(fwd.probs, pred, graph.labels.back(), split.test, graph.num_classes);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_model(result.params, config.scheme, config.train, config.seed, (dir / "model.txt").string());

  json j = metrics_to_json(report);
  j["best_iteration"] = result.best_iteration;
  j["best_val_accuracy"] = result.best_val_accuracy;
  j["scheme"] = config.scheme.name();
  j["seed"] = config.seed;
  std::ofstream mout = open_out(dir / "metrics.json");
  mout << j.dump(2) << "\n";

  std::ofstream aout = open_out(dir / "attention.csv");
  if (result.attention_attr.empty()) {
    aout << "timestep,weight\n";
    for (std::size_t t = 0; t < result.attention.size(); ++t) {
      aout << t << "," << format_value(result.attention[t]) << "\n";
    }
  } else {
    aout << "timestep,weight,weight_attr\n";
    for (std::size_t t = 0; t < result.attention.size(); ++t) {
      aout << t << "," << format_value(result.attention[t]) << ","
           << format_value(result.attention_attr[t]) << "\n";
    }
  }
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& graph_path,
             const std::string& out_dir) {
  const LoadedModel loaded = load_model(model_path);
  const DynamicGraph graph = load_graph(graph_path);
  const NodeSplit split = split_nodes(graph.num_nodes, loaded.config.train_ratio,
                                      loaded.config.val_ratio, loaded.config.test_ratio, loaded.seed);
  const ForwardResult fwd = forward(graph, loaded.params, loaded.scheme, 0, false, loaded.config);
  const std::vector<int> pred = argmax_rows(fwd.probs);
  const metrics::EvalReport report =
      metrics::evaluate(fwd.probs, pred, graph.labels.back(), split.test, graph.num_classes);
  fs::create_directories(out_dir);
  std::ofstream out = open_out(fs::path(out_dir) / "metrics.json");
  json j = metrics_to_json(report);
  j["scheme"] = loaded.scheme.name();
  j["seed"] = loaded.seed;
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_explain(const ExperimentConfig& config, const std::string& graph_path,
                const std::string& out_dir) {
  const DynamicGraph graph = load_graph(graph_path);
  const explain::AttentionBatch batch = explain::collect_attention(
      graph, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  const explain::ImportanceVector iv =
      explain::importance(graph, batch.mean, config.train, config.runs_per_mask,
                          mix_seed(config.seed, kImportanceStream), config.workers,
                          config.use_validation);
  const double r = explain::attention_importance_correlation(batch.mean, iv);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_importance_csv(dir / "importance.csv", batch.mean, iv);
  write_attention_runs_csv((dir / "attention_runs.csv").string(), batch.runs);
  std::ofstream out = open_out(dir / "correlation.json");
  json j;
  j["m"] = iv.reference_accuracy;
  j["r"] = r;
  j["num_runs"] = config.num_runs;
  j["runs_per_mask"] = iv.runs_per_mask;
  j["scheme"] = config.scheme.name();
  out << j.dump(2) << "\n";
  return 0;
}

namespace {

FigureResult figure_deletion(const ExperimentConfig& config, const fs::path& dir) {
  ScenarioSpec spec = config.scenario;
  spec.name = "deletion";
  FigureResult result;
  result.figure = "fig3";

  const DynamicGraph base = build_scenario_baseline(spec);
  save_graph(base, (dir / "graph_baseline.txt").string());
  const explain::AttentionBatch att_base = explain::collect_attention(
      base, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  write_attention_runs_csv((dir / "attention_baseline_runs.csv").string(), att_base.runs);
  write_attention_mean_csv((dir / "attention_baseline_mean.csv").string(), att_base.mean);

  const std::vector<double> fractions = {0.10, 0.20, 0.50};
  std::vector<double> drops;
  json details;
  for (double fraction : fractions) {
    const DynamicGraph g =
        delete_edges(base, as_set(spec.deletion_steps), fraction,
                     mix_seed(spec.gen.seed, kManipulationStream + 1));
    const std::string tag = "delete" + std::to_string(static_cast<int>(fraction * 100.0));
    save_graph(g, (dir / ("graph_" + tag + ".txt")).string());
    const explain::AttentionBatch att = explain::collect_attention(
        g, config.train, config.scheme, config.num_runs, config.seed, config.workers);
    write_attention_runs_csv((dir / ("attention_" + tag + "_runs.csv")).string(), att.runs);
    write_attention_mean_csv((dir / ("attention_" + tag + "_mean.csv")).string(), att.mean);
    double drop = 0.0;
    for (int s : spec.deletion_steps) drop += att_base.mean[s] - att.mean[s];
    drop /= static_cast<double>(spec.deletion_steps.size());
    drops.push_back(drop);
    details["drop_" + tag] = drop;
  }
  result.attention_mean = att_base.mean;
  result.checks.push_back({"attention_drops_at_deleted_steps_10pct", drops[0] > 0.0, drops[0], 0.0});
  result.checks.push_back({"attention_drops_at_deleted_steps_50pct", drops[2] > 0.0, drops[2], 0.0});
  result.checks.push_back({"drop_at_50pct_exceeds_drop_at_10pct", drops[2] > drops[0], drops[2], drops[0]});
  write_summary(dir / "summary.json", result, details);
  return result;
}

FigureResult figure_densify(const ExperimentConfig& config, const fs::path& dir) {
  ScenarioSpec spec = config.scenario;
  spec.name = "densify";
  FigureResult result;
  result.figure = "fig4";

  const DynamicGraph g = build_scenario(spec);
  save_graph(g, (dir / "graph.txt").string());
  const explain::AttentionBatch batch = explain::collect_attention(
      g, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  write_attention_runs_csv((dir / "attention_runs.csv").string(), batch.runs);
  write_attention_mean_csv((dir / "attention_mean.csv").string(), batch.mean);

  std::vector<int> rest;
  const std::set<int> boosted = as_set(spec.densify_steps);
  for (int t = 0; t < g.num_timesteps(); ++t) {
    if (boosted.count(t) == 0) rest.push_back(t);
  }
  int dominant_runs = 0;
  for (const std::vector<double>& run : batch.runs) {
    if (mean_at(run, spec.densify_steps) > mean_at(run, rest)) ++dominant_runs;
  }
  const double needed = 0.9 * static_cast<double>(config.num_runs);
  const double avg_boosted = mean_at(batch.mean, spec.densify_steps);
  const double avg_rest = mean_at(batch.mean, rest);
  result.attention_mean = batch.mean;
  result.checks.push_back({"boosted_steps_dominate_in_90pct_of_runs",
                           static_cast<double>(dominant_runs) >= needed,
                           static_cast<double>(dominant_runs), needed});
  result.checks.push_back(
      {"boosted_steps_dominate_on_average", avg_boosted > avg_rest, avg_boosted, avg_rest});
  write_summary(dir / "summary.json", result,
                json{{"dominant_runs", dominant_runs}, {"avg_boosted", avg_boosted}, {"avg_rest", avg_rest}});
  return result;
}

FigureResult figure_recency(const ExperimentConfig& config, const fs::path& dir) {
  ScenarioSpec spec = config.scenario;
  spec.name = "base";
  FigureResult result;
  result.figure = "fig5";

  const DynamicGraph g = build_scenario(spec);
  save_graph(g, (dir / "graph.txt").string());
  const explain::AttentionBatch batch = explain::collect_attention(
      g, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  write_attention_runs_csv((dir / "attention_runs.csv").string(), batch.runs);
  write_attention_mean_csv((dir / "attention_mean.csv").string(), batch.mean);

  std::vector<double> index(batch.mean.size());
  for (std::size_t t = 0; t < index.size(); ++t) index[t] = static_cast<double>(t);
  const double rho = metrics::spearman(batch.mean, index);
  result.attention_mean = batch.mean;
  result.checks.push_back({"attention_increases_with_time_spearman", rho > 0.5, rho, 0.5});
  write_summary(dir / "summary.json", result, json{{"spearman", rho}});
  return result;
}

FigureResult figure_anomaly(const ExperimentConfig& config, const fs::path& dir) {
  ScenarioSpec spec = config.scenario;
  spec.name = "anomaly";
  FigureResult result;
  result.figure = "fig8";

  const DynamicGraph base = build_scenario_baseline(spec);
  const DynamicGraph g = build_scenario(spec);
  save_graph(base, (dir / "graph_baseline.txt").string());
  save_graph(g, (dir / "graph.txt").string());
  const explain::AttentionBatch att_base = explain::collect_attention(
      base, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  const explain::AttentionBatch att = explain::collect_attention(
      g, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  write_attention_runs_csv((dir / "attention_baseline_runs.csv").string(), att_base.runs);
  write_attention_mean_csv((dir / "attention_baseline_mean.csv").string(), att_base.mean);
  write_attention_runs_csv((dir / "attention_runs.csv").string(), att.runs);
  write_attention_mean_csv((dir / "attention_mean.csv").string(), att.mean);

  const double threshold = mean_of(att_base.mean) - std_of(att_base.mean);
  result.attention_mean = att.mean;
  for (int s : spec.anomaly_steps) {
    result.checks.push_back({"randomized_step_" + std::to_string(s) + "_below_baseline_band",
                             att.mean[s] < threshold, att.mean[s], threshold});
  }
  const std::vector<int> detected = explain::detect_anomalies(att.mean, 1.0);
  write_summary(dir / "summary.json", result,
                json{{"threshold", threshold}, {"detected_anomalies", detected}});
  return result;
}

FigureResult figure_single_relevant(const ExperimentConfig& config, const fs::path& dir) {
  ScenarioSpec spec = config.scenario;
  spec.name = "single-relevant";
  FigureResult result;
  result.figure = "fig9";

  const DynamicGraph g = build_scenario(spec);
  save_graph(g, (dir / "graph.txt").string());
  const explain::AttentionBatch batch = explain::collect_attention(
      g, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  write_attention_runs_csv((dir / "attention_runs.csv").string(), batch.runs);
  write_attention_mean_csv((dir / "attention_mean.csv").string(), batch.mean);

  const explain::ImportanceVector iv =
      explain::importance(g, batch.mean, config.train, config.runs_per_mask,
                          mix_seed(config.seed, kImportanceStream), config.workers,
                          config.use_validation);
  write_importance_csv(dir / "importance.csv", batch.mean, iv);

  const int relevant = g.num_timesteps() - 1;
  const int att_peak = argmax_of(batch.mean);
  const int imp_peak = argmax_of(iv.importance);
  result.attention_mean = batch.mean;
  result.checks.push_back({"relevant_step_has_max_attention", att_peak == relevant,
                           static_cast<double>(att_peak), static_cast<double>(relevant)});
  result.checks.push_back({"relevant_step_has_max_importance", imp_peak == relevant,
                           static_cast<double>(imp_peak), static_cast<double>(relevant)});
  write_summary(dir / "summary.json", result,
                json{{"reference_accuracy", iv.reference_accuracy}, {"importance", iv.importance}});
  return result;
}

FigureResult figure_transition(const ExperimentConfig& config, const fs::path& dir) {
  ScenarioSpec spec = config.scenario;
  spec.name = "transition";
  FigureResult result;
  result.figure = "fig10";

  const DynamicGraph g = build_scenario(spec);
  save_graph(g, (dir / "graph.txt").string());
  const explain::AttentionBatch batch = explain::collect_attention(
      g, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  write_attention_runs_csv((dir / "attention_runs.csv").string(), batch.runs);
  write_attention_mean_csv((dir / "attention_mean.csv").string(), batch.mean);

  const std::vector<int> detected = explain::detect_transitions(batch.mean, 1.0);
  const int expected = *std::max_element(spec.transition_steps.begin(), spec.transition_steps.end()) + 1;
  const bool found = std::find(detected.begin(), detected.end(), expected) != detected.end();
  result.attention_mean = batch.mean;
  result.checks.push_back({"jump_detected_at_regime_change", found, static_cast<double>(expected), 0.0});
  write_summary(dir / "summary.json", result, json{{"detected_transitions", detected}});
  return result;
}

FigureResult figure_periodic(const ExperimentConfig& config, const fs::path& dir) {
  ScenarioSpec spec = config.scenario;
  spec.name = "periodic";
  FigureResult result;
  result.figure = "fig11";

  const DynamicGraph g = build_scenario(spec);
  save_graph(g, (dir / "graph.txt").string());
  const explain::AttentionBatch batch = explain::collect_attention(
      g, config.train, config.scheme, config.num_runs, config.seed, config.workers);
  write_attention_runs_csv((dir / "attention_runs.csv").string(), batch.runs);
  write_attention_mean_csv((dir / "attention_mean.csv").string(), batch.mean);

  const int period = spec.period;
  const double rho_before = explain::autocorrelation(batch.mean, period - 1);
  const double rho_at = explain::autocorrelation(batch.mean, period);
  const double rho_after = explain::autocorrelation(batch.mean, period + 1);
  const std::optional<int> detected = explain::detect_period(batch.mean);
  result.attention_mean = batch.mean;
  result.checks.push_back({"detected_period_matches", detected.has_value() && *detected == period,
                           detected.has_value() ? static_cast<double>(*detected) : -1.0,
                           static_cast<double>(period)});
  result.checks.push_back(
      {"autocorrelation_peaks_above_shorter_lag", rho_at > rho_before, rho_at, rho_before});
  result.checks.push_back(
      {"autocorrelation_peaks_above_longer_lag", rho_at > rho_after, rho_at, rho_after});
  write_summary(dir / "summary.json", result,
                json{{"rho_period", rho_at}, {"rho_before", rho_before}, {"rho_after", rho_after}});
  return result;
}

}  // namespace

FigureResult reproduce_figure(const ExperimentConfig& config, const std::string& figure_id,
                              const std::string& out_dir) {
  const fs::path dir = fs::path(out_dir) / figure_id;
  fs::create_directories(dir);
  if (figure_id == "fig3") return figure_deletion(config, dir);
  if (figure_id == "fig4") return figure_densify(config, dir);
  if (figure_id == "fig5") return figure_recency(config, dir);
  if (figure_id == "fig8") return figure_anomaly(config, dir);
  if (figure_id == "fig9") return figure_single_relevant(config, dir);
  if (figure_id == "fig10") return figure_transition(config, dir);
  if (figure_id == "fig11") return figure_periodic(config, dir);
  throw std::invalid_argument("unknown figure id '" + figure_id + "'");
}

int cmd_reproduce(const ExperimentConfig& config, const std::string& figure_id,
                  const std::string& out_dir) {
  const FigureResult result = reproduce_figure(config, figure_id, out_dir);
  return result.all_pass() ? 0 : 1;
}

}  // namespace gcnse::experiment
