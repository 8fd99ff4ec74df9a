// dlpeval: dynamic link prediction evaluation from the command line.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "dlpeval/pipeline.hpp"
#include "dlpeval/synthetic.hpp"

using namespace dlpeval;
using nlohmann::json;

namespace {

// Command-line values that override the config file. Only flags the user
// actually passed are applied.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flags, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flags, *value, help);
    setters_.push_back([opt, value, key](json& j) {
      if (opt->count() > 0) j[key] = *value;
    });
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flags, const std::string& key, const std::string& help) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app->add_flag(flags, *value, help);
    setters_.push_back([opt, value, key](json& j) {
      if (opt->count() > 0) j[key] = *value;
    });
    return opt;
  }

  json collect() const {
    json j = json::object();
    for (const auto& set : setters_) set(j);
    return j;
  }

 private:
  std::vector<std::function<void(json&)>> setters_;
};

struct Command {
  CLI::App* app;
  Overrides overrides;
  std::string config_file;
};

void add_input_options(Command& c) {
  c.app->add_option("--config", c.config_file, "JSON config file; flags given here win")->check(CLI::ExistingFile);
  c.overrides.add<std::string>(c.app, "--events,-e", "events", "event CSV: source,destination,timestamp[,attributes...]");
  c.overrides.flag(c.app, "--symmetrize", "symmetrize", "add the reverse of every event");
  c.overrides.add<double>(c.app, "--train-fraction", "train_fraction", "share of events for training (0.7)");
  c.overrides.add<double>(c.app, "--val-fraction", "val_fraction", "share of events for validation (0.15)");
  c.overrides.add<double>(c.app, "--test-fraction", "test_fraction", "share of events for testing (0.15)");
  c.overrides.add<std::string>(c.app, "--output-dir,-o", "output_dir", "directory for all artifacts (out)");
}

void add_taxonomy_options(Command& c) {
  c.overrides.add<std::string>(c.app, "--observed-scope", "observed_scope",
                               "what counts as observed: train | train+validation");
  c.overrides.flag(c.app, "--historical-includes-overlap", "historical_includes_overlap",
                   "let historical pools include overlap entities");
}

void add_sampler_options(Command& c) {
  c.overrides.add<std::vector<std::string>>(c.app, "--sampler,-s", "samplers",
                                            "negative sampler, repeatable (destination, historical-edge, ...)");
  c.overrides.add<std::size_t>(c.app, "-k", "k", "negatives per positive per sampler (100)");
  c.overrides.add<std::uint64_t>(c.app, "--seed", "seed", "sampling seed (0)");
  c.overrides.flag(c.app, "--include-history", "include_history", "also sample for train and validation events");
  c.overrides.add<std::string>(c.app, "--on-empty-pool", "on_empty_pool", "skip | abort");
  c.overrides.flag(c.app, "--exclude-same-timestamp", "exclude_same_timestamp_positives",
                   "never emit a pair that is a positive at the same timestamp");
  c.overrides.flag(c.app, "--allow-self-loops", "allow_self_loops", "allow u == v negatives");
  c.overrides.add<std::size_t>(c.app, "--rejection-budget", "rejection_budget", "draws before never_observed gives up");
}

void add_scorer_options(Command& c) {
  c.overrides.add<std::string>(c.app, "--scorer", "scorer", "edgebank | pa | external:<scores.csv>");
  c.overrides.add<double>(c.app, "--edgebank-window", "edgebank_window", "EdgeBank memory length in time units");
  c.overrides.flag(c.app, "--edgebank-symmetrize", "edgebank_symmetrize", "EdgeBank remembers both directions");
}

void add_metric_options(Command& c) {
  c.overrides.add<std::string>(c.app, "--rank-convention", "rank_convention", "mean | optimistic | pessimistic");
  c.overrides.add<std::string>(c.app, "--averaging", "averaging", "pooled | per-event");
}

void add_plot_options(Command& c) {
  c.overrides.add<std::string>(c.app, "--node-attributes", "node_attributes", "CSV node_id,label for TNA colors");
  c.overrides.add<std::string>(c.app, "--style", "style", "JSON style map");
  c.overrides.add<double>(c.app, "--rank-threshold", "rank_threshold", "rank plots keep ranks above this (200)");
  c.overrides.add<std::size_t>(c.app, "--max-points", "max_points", "downsample plots to this many points");
  c.overrides.add<std::uint64_t>(c.app, "--downsample-seed", "downsample_seed", "seed for downsampling");
}

RunConfig resolve(const Command& c) {
  RunConfig config;
  if (!c.config_file.empty()) config = load_config(c.config_file);
  config = config_from_json(c.overrides.collect(), config);
  config.validate();
  return config;
}

void report(const Artifacts& written) {
  for (const auto& p : written) std::cout << p.string() << '\n';
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return 1;
    case ErrorKind::Data: return 2;
    case ErrorKind::Internal: return 3;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic link prediction evaluation"};
  app.require_subcommand(1);

  Command split{app.add_subcommand("split", "chronological split manifest")};
  add_input_options(split);

  Command classify{app.add_subcommand("classify", "node and edge categories")};
  add_input_options(classify);
  add_taxonomy_options(classify);

  Command sample{app.add_subcommand("sample", "negative candidates for each test positive")};
  add_input_options(sample);
  add_taxonomy_options(sample);
  add_sampler_options(sample);

  Command score{app.add_subcommand("score", "score candidates with a baseline or an external table")};
  add_input_options(score);
  add_scorer_options(score);
  std::string score_candidates_path;
  score.app->add_option("--candidates", score_candidates_path, "candidate CSV (default: output dir)");

  Command evaluate{app.add_subcommand("evaluate", "AUC, AP, MRR and ranks; samples and scores first if needed")};
  add_input_options(evaluate);
  add_taxonomy_options(evaluate);
  add_sampler_options(evaluate);
  add_scorer_options(evaluate);
  add_metric_options(evaluate);
  std::string eval_candidates_path, eval_scores_path;
  evaluate.app->add_option("--candidates", eval_candidates_path, "candidate CSV from `sample`");
  evaluate.app->add_option("--scores", eval_scores_path, "score CSV from `score` or an external model");

  Command plot{app.add_subcommand("plot", "TNA/TEA, competing, rank and degree plots")};
  add_input_options(plot);
  add_taxonomy_options(plot);
  add_plot_options(plot);
  std::string plot_kind, plot_entity = "node", plot_degree = "destination", plot_ranks, plot_out;
  plot.app->add_option("kind", plot_kind, "tna | tea | competing | rank | degree")
      ->required()
      ->check(CLI::IsMember({"tna", "tea", "competing", "rank", "degree"}));
  plot.app->add_option("--entity", plot_entity, "node | edge (competing, rank)")
      ->check(CLI::IsMember({"node", "edge"}));
  plot.app->add_option("--degree-mode", plot_degree, "destination | edge");
  plot.app->add_option("--ranks", plot_ranks, "rank CSV (default: output dir)");
  plot.app->add_option("--out", plot_out, "SVG path");

  Command run{app.add_subcommand("run", "the whole pipeline, with a manifest")};
  add_input_options(run);
  add_taxonomy_options(run);
  add_sampler_options(run);
  add_scorer_options(run);
  add_metric_options(run);
  add_plot_options(run);
  run.overrides.add<std::vector<std::string>>(run.app, "--plots", "plots", "plots to draw (all)")->delimiter(',');

  auto* synth = app.add_subcommand("synth", "generate a synthetic event stream");
  SyntheticConfig synth_config;
  std::string synth_out;
  synth->add_option("--nodes", synth_config.n_nodes, "node count");
  synth->add_option("--count", synth_config.n_events, "event count");
  synth->add_option("--seed", synth_config.seed, "generator seed");
  synth->add_option("--historical-nodes", synth_config.historical_node_fraction, "share of train-only nodes");
  synth->add_option("--inductive-nodes", synth_config.inductive_node_fraction, "share of test-only nodes");
  synth->add_option("--repeat-fraction", synth_config.test_repeat_fraction, "share of test events on seen pairs");
  synth->add_option("--per-timestamp", synth_config.events_per_timestamp, "events sharing each timestamp");
  synth->add_flag("--allow-self-loops", synth_config.allow_self_loops, "allow u == v events");
  synth->add_option("--out,-o", synth_out, "output CSV (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      const History h = generate_synthetic(synth_config);
      if (synth_out.empty()) {
        write_events(std::cout, h);
      } else {
        write_events(std::filesystem::path(synth_out), h);
      }
      return 0;
    }
    if (run.app->parsed()) {
      report(run_pipeline(resolve(run)));
      return 0;
    }

    Command* active = nullptr;
    for (Command* c : {&split, &classify, &sample, &score, &evaluate, &plot}) {
      if (c->app->parsed()) active = c;
    }
    const RunConfig config = in_stage("config", [&] { return resolve(*active); });
    const auto data = load_dataset(config);

    if (active == &split) {
      report(in_stage("split", [&] { return stage_split(config, *data); }));
    } else if (active == &classify) {
      report(in_stage("classify", [&] { return stage_classify(config, *data); }));
    } else if (active == &sample) {
      report(in_stage("sample", [&] { return stage_sample(config, *data); }));
    } else if (active == &score) {
      std::optional<std::filesystem::path> candidates;
      if (!score_candidates_path.empty()) candidates = score_candidates_path;
      report(in_stage("score", [&] { return stage_score(config, *data, candidates); }));
    } else if (active == &evaluate) {
      std::optional<std::filesystem::path> candidates, scores;
      if (!eval_candidates_path.empty()) candidates = eval_candidates_path;
      if (!eval_scores_path.empty()) scores = eval_scores_path;
      if (!scores) {
        if (!candidates) in_stage("sample", [&] { return stage_sample(config, *data); });
        in_stage("score", [&] { return stage_score(config, *data, candidates); });
      }
      in_stage("evaluate", [&] { return stage_evaluate(config, *data, candidates, scores); });
      std::ifstream metrics(OutputPaths(config.output_dir).metrics_json());
      std::cout << metrics.rdbuf();
    } else {
      PlotRequest request;
      request.kind = plot_kind;
      request.entity = plot_entity == "edge" ? EntityKind::Edge : EntityKind::Node;
      request.degree_mode = in_stage("config", [&] { return parse_degree_mode(plot_degree); });
      if (!plot_ranks.empty()) request.ranks = plot_ranks;
      if (!plot_out.empty()) request.out = plot_out;
      report(in_stage("plot", [&] { return stage_plot(config, *data, request); }));
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "dlpeval: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "dlpeval: internal error: " << e.what() << '\n';
    return 3;
  }
}
