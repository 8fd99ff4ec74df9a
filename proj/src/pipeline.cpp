#include "dlpeval/pipeline.hpp"

#include <fstream>
#include <set>

#include "dlpeval/error.hpp"
#include "dlpeval/hash.hpp"

namespace dlpeval {

namespace {

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + " is not valid JSON: " + e.what());
  }
}

std::filesystem::path sidecar(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

struct ScorerSpec {
  ScorerKind kind;
  std::filesystem::path external_path;
};

ScorerSpec parse_scorer(const std::string& text) {
  constexpr std::string_view kExternal = "external:";
  if (text.rfind(kExternal, 0) == 0) {
    const auto path = text.substr(kExternal.size());
    if (path.empty()) throw ValidationError("external scorer needs a path: external:<scores.csv>");
    return {ScorerKind::External, path};
  }
  const auto kind = parse_scorer_kind(text);
  if (kind == ScorerKind::External) throw ValidationError("external scorer needs a path: external:<scores.csv>");
  return {kind, {}};
}

std::string edge_id(const History& h, PairKey key) {
  return h.raw_id(pair_source(key)) + "->" + h.raw_id(pair_destination(key));
}

}  // namespace

std::vector<SamplerSpec> RunConfig::sampler_specs() const {
  std::vector<SamplerSpec> specs;
  for (const auto& name : samplers) {
    SamplerSpec s = parse_sampler(name);
    s.k = k;
    s.seed = seed;
    s.exclude_same_timestamp_positives = exclude_same_timestamp_positives;
    s.allow_self_loops = allow_self_loops;
    s.rejection_budget = rejection_budget;
    specs.push_back(s);
  }
  return specs;
}

void RunConfig::validate() const {
  if (events.empty()) throw ValidationError("no event file given (--events)");
  if (k == 0) throw ValidationError("K must be at least 1");
  if (samplers.empty()) throw ValidationError("at least one sampler is required");
  if (rejection_budget == 0) throw ValidationError("rejection budget must be positive");
  (void)sampler_specs();
  (void)parse_scorer(scorer);
  static const std::set<std::string> kPlots{"tna", "tea", "competing", "rank", "degree"};
  for (const auto& p : plots) {
    if (!kPlots.count(p)) throw ValidationError("unknown plot '" + p + "'");
  }
  if (edgebank.window && *edgebank.window <= 0) throw ValidationError("EdgeBank window must be positive");
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{
      {"events", c.events.string()},
      {"node_attributes", c.node_attributes ? nlohmann::json(c.node_attributes->string()) : nlohmann::json()},
      {"symmetrize", c.ingest.symmetrize},
      {"keep_attributes", c.ingest.keep_attributes},
      {"train_fraction", c.fractions.train},
      {"val_fraction", c.fractions.validation},
      {"test_fraction", c.fractions.test},
      {"observed_scope", to_string(c.taxonomy.observed_scope)},
      {"historical_includes_overlap", c.taxonomy.historical_includes_overlap},
      {"samplers", c.samplers},
      {"k", c.k},
      {"seed", c.seed},
      {"include_history", c.include_history},
      {"on_empty_pool", c.on_empty_pool == EmptyPoolPolicy::Skip ? "skip" : "abort"},
      {"exclude_same_timestamp_positives", c.exclude_same_timestamp_positives},
      {"allow_self_loops", c.allow_self_loops},
      {"rejection_budget", c.rejection_budget},
      {"scorer", c.scorer},
      {"edgebank_window", c.edgebank.window ? nlohmann::json(*c.edgebank.window) : nlohmann::json()},
      {"edgebank_symmetrize", c.edgebank.symmetrize},
      {"rank_convention", to_string(c.rank_convention)},
      {"averaging", to_string(c.averaging)},
      {"output_dir", c.output_dir.string()},
      {"style", c.style ? nlohmann::json(c.style->string()) : nlohmann::json()},
      {"plots", c.plots},
      {"rank_threshold", c.rank_threshold},
      {"max_points", c.max_points ? nlohmann::json(*c.max_points) : nlohmann::json()},
      {"downsample_seed", c.downsample_seed},
  };
  return j;
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw ValidationError("configuration must be a JSON object");
  static const std::set<std::string> kKeys = [] {
    std::set<std::string> keys;
    const auto defaults = to_json(RunConfig{});
    for (const auto& [key, _] : defaults.items()) keys.insert(key);
    return keys;
  }();
  try {
    for (const auto& [key, value] : j.items()) {
      if (!kKeys.count(key)) throw ValidationError("unknown configuration key '" + key + "'");
      auto optional_path = [&value]() -> std::optional<std::filesystem::path> {
        if (value.is_null()) return std::nullopt;
        return value.get<std::string>();
      };
      if (key == "events") c.events = value.get<std::string>();
      else if (key == "node_attributes") c.node_attributes = optional_path();
      else if (key == "symmetrize") c.ingest.symmetrize = value.get<bool>();
      else if (key == "keep_attributes") c.ingest.keep_attributes = value.get<bool>();
      else if (key == "train_fraction") c.fractions.train = value.get<double>();
      else if (key == "val_fraction") c.fractions.validation = value.get<double>();
      else if (key == "test_fraction") c.fractions.test = value.get<double>();
      else if (key == "observed_scope") c.taxonomy.observed_scope = parse_observed_scope(value.get<std::string>());
      else if (key == "historical_includes_overlap") c.taxonomy.historical_includes_overlap = value.get<bool>();
      else if (key == "samplers") c.samplers = value.get<std::vector<std::string>>();
      else if (key == "k") c.k = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "include_history") c.include_history = value.get<bool>();
      else if (key == "on_empty_pool") {
        const auto v = value.get<std::string>();
        if (v != "skip" && v != "abort") throw ValidationError("on_empty_pool must be skip or abort");
        c.on_empty_pool = v == "skip" ? EmptyPoolPolicy::Skip : EmptyPoolPolicy::Abort;
      } else if (key == "exclude_same_timestamp_positives") c.exclude_same_timestamp_positives = value.get<bool>();
      else if (key == "allow_self_loops") c.allow_self_loops = value.get<bool>();
      else if (key == "rejection_budget") c.rejection_budget = value.get<std::size_t>();
      else if (key == "scorer") c.scorer = value.get<std::string>();
      else if (key == "edgebank_window") c.edgebank.window = value.is_null() ? std::nullopt : std::optional(value.get<double>());
      else if (key == "edgebank_symmetrize") c.edgebank.symmetrize = value.get<bool>();
      else if (key == "rank_convention") c.rank_convention = parse_rank_convention(value.get<std::string>());
      else if (key == "averaging") c.averaging = parse_averaging(value.get<std::string>());
      else if (key == "output_dir") c.output_dir = value.get<std::string>();
      else if (key == "style") c.style = optional_path();
      else if (key == "plots") c.plots = value.get<std::vector<std::string>>();
      else if (key == "rank_threshold") c.rank_threshold = value.get<double>();
      else if (key == "max_points") c.max_points = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
      else if (key == "downsample_seed") c.downsample_seed = value.get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad configuration value: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in), std::move(base));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

std::unique_ptr<Dataset> load_dataset(const RunConfig& config) {
  auto data = std::make_unique<Dataset>();
  in_stage("load", [&] {
    data->history = load_events(config.events, config.ingest);
    if (config.node_attributes) data->attributes = load_node_attributes(*config.node_attributes, data->history);
  });
  in_stage("split", [&] { data->split = chronological_split(data->history, config.fractions); });
  in_stage("classify", [&] { data->catalog = EntityCatalog::build(data->split, config.taxonomy); });
  return data;
}

Artifacts stage_split(const RunConfig& config, const Dataset& data) {
  const OutputPaths out(config.output_dir);
  auto manifest = split_manifest(data.split, config.taxonomy.observed_scope);
  write_json(out.split(), manifest);
  return {out.split()};
}

Artifacts stage_classify(const RunConfig& config, const Dataset& data) {
  const OutputPaths out(config.output_dir);
  const auto& h = data.history;
  const auto& cat = data.catalog;
  ensure_parent_directory(out.classification_csv());
  std::ofstream csv_out(out.classification_csv(), std::ios::binary);
  if (!csv_out) throw DataError("cannot write " + out.classification_csv().string());
  csv_out << "entity_type,entity_id,category,first_arrival,last_arrival\n";
  for (NodeId u = 0; u < h.node_count(); ++u) {
    const EntityRecord* r = cat.node_record(u);
    if (!r) continue;
    csv_out << "node," << h.raw_id(u) << ',' << to_string(cat.node_category(u)) << ','
            << csv::format_number(r->first_arrival) << ',' << csv::format_number(r->last_arrival) << '\n';
  }
  for (PairKey key : cat.edge_keys()) {
    const NodeId u = pair_source(key), v = pair_destination(key);
    const EntityRecord* r = cat.edge_record(u, v);
    csv_out << "edge," << edge_id(h, key) << ',' << to_string(cat.edge_category(u, v)) << ','
            << csv::format_number(r->first_arrival) << ',' << csv::format_number(r->last_arrival) << '\n';
  }
  csv_out.close();

  nlohmann::json nodes = nlohmann::json::object(), edges = nlohmann::json::object();
  for (auto c : kNodeCategories) nodes[to_string(c)] = cat.nodes_in(c).size();
  for (auto c : kObservedEdgeCategories) edges[to_string(c)] = cat.edges_in(c).size();
  write_json(out.classification_json(),
             {{"nodes", nodes},
              {"edges", edges},
              {"observed_scope", to_string(config.taxonomy.observed_scope)},
              {"historical_includes_overlap", config.taxonomy.historical_includes_overlap},
              {"t_train", data.split.t_train}});
  return {out.classification_csv(), out.classification_json()};
}

Artifacts stage_sample(const RunConfig& config, const Dataset& data) {
  const OutputPaths out(config.output_dir);
  const auto specs = config.sampler_specs();
  const auto options = config.sample_options();
  const auto run = sample_run(specs, data.split, data.catalog, options);
  write_candidates(out.candidates_csv(), run, data.history);

  auto meta = sampler_spec_json(specs, options, data.split, config.taxonomy);
  meta["sampler_spec_hash"] = sampler_spec_hash(specs, options, data.split, config.taxonomy);
  meta["positives"] = run.sets.size();
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : run.skipped) {
    skipped.push_back({{"positive_ordinal", s.positive_ordinal}, {"strategy", s.strategy}, {"reason", s.reason}});
  }
  meta["skipped"] = skipped;
  write_json(out.candidates_json(), meta);
  return {out.candidates_csv(), out.candidates_json()};
}

Artifacts stage_score(const RunConfig& config, const Dataset& data,
                      const std::optional<std::filesystem::path>& candidates) {
  const OutputPaths out(config.output_dir);
  const auto candidates_path = candidates.value_or(out.candidates_csv());
  const auto meta = read_json(sidecar(candidates_path));
  const std::string hash = meta.value("sampler_spec_hash", "");
  const auto sets = read_candidates(candidates_path, data.history);

  const auto scorer = parse_scorer(config.scorer);
  ExternalScoreTable external;
  ScorerChoice choice{scorer.kind, config.edgebank, nullptr, hash};
  std::string model = scorer_name(scorer.kind);
  if (scorer.kind == ScorerKind::External) {
    external = ExternalScoreTable::read(scorer.external_path);
    choice.external = &external;
    if (!external.model().empty()) model = external.model();
  }
  const auto scored = score_candidates(choice, data.split, sets);
  to_score_table(scored, model, hash).write(out.scores_csv());
  return {out.scores_csv(), sidecar(out.scores_csv())};
}

std::map<std::string, std::size_t> candidate_composition(const std::vector<CandidateSet>& sets,
                                                         const EntityCatalog& catalog) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sets) {
    for (const auto& n : s.negatives) {
      ++counts[n.label + "|edge=" + to_string(catalog.edge_category(n.source, n.destination))];
      ++counts[n.label + "|pair=" + to_string(catalog.classify_pair(n.source, n.destination))];
    }
  }
  return counts;
}

Artifacts stage_evaluate(const RunConfig& config, const Dataset& data,
                         const std::optional<std::filesystem::path>& candidates,
                         const std::optional<std::filesystem::path>& scores) {
  const OutputPaths out(config.output_dir);
  const auto candidates_path = candidates.value_or(out.candidates_csv());
  const auto scores_path = scores.value_or(out.scores_csv());
  const auto meta = read_json(sidecar(candidates_path));
  const auto sets = read_candidates(candidates_path, data.history);
  const auto table = ExternalScoreTable::read(scores_path);

  ScorerChoice choice{ScorerKind::External, {}, &table, meta.value("sampler_spec_hash", "")};
  const auto scored = score_candidates(choice, data.split, sets);
  auto report = evaluate(scored, config.rank_convention, config.averaging);
  report.sampler = meta.value("samplers", nlohmann::json());
  report.composition = candidate_composition(sets, data.catalog);

  auto j = to_json(report);
  j["scorer"] = table.model();
  j["sampler_spec_hash"] = table.spec_hash();
  j["observed_scope"] = to_string(config.taxonomy.observed_scope);
  j["historical_includes_overlap"] = config.taxonomy.historical_includes_overlap;
  write_json(out.metrics_json(), j);
  write_ranks(out.ranks_csv(), compute_ranks(scored, config.rank_convention));
  Artifacts written{out.metrics_json(), out.ranks_csv()};

  std::vector<std::string> strategies;
  for (const auto& s : config.sampler_specs()) strategies.push_back(label(s));
  if (strategies.size() > 1) {
    std::ofstream c(out.competing_csv(), std::ios::binary);
    c << "positive_ordinal,label,missing\n";
    for (const auto& l : competing_labels(scored, strategies)) {
      std::string missing;
      for (const auto& m : l.missing) missing += (missing.empty() ? "" : ";") + m;
      c << l.positive_ordinal << ',' << l.label << ',' << missing << '\n';
    }
    written.push_back(out.competing_csv());
  }
  return written;
}

Artifacts stage_plot(const RunConfig& config, const Dataset& data, const PlotRequest& request) {
  const OutputPaths out(config.output_dir);
  const StyleMap styles = config.style ? StyleMap::load(*config.style) : StyleMap::defaults();
  const std::string entity = request.entity == EntityKind::Node ? "tna" : "tea";
  auto target = [&](const std::string& name) { return request.out.value_or(out.plots() / (name + ".svg")); };
  auto layout_for = [&](EntityKind kind) {
    PlotLayout layout = kind == EntityKind::Node
                            ? node_layout(data.history, data.attributes.empty() ? nullptr : &data.attributes)
                            : edge_layout(data.history);
    add_split_markers(layout, data.split);
    return layout;
  };
  RenderOptions options;
  options.max_points = config.max_points;
  options.downsample_seed = config.downsample_seed;

  RenderResult result;
  if (request.kind == "tna" || request.kind == "tea") {
    const auto kind = request.kind == "tna" ? EntityKind::Node : EntityKind::Edge;
    options.title = kind == EntityKind::Node ? "Temporal Node Activity" : "Temporal Edge Activity";
    result = render(layout_for(kind), styles, nullptr, options, target(request.kind));
  } else if (request.kind == "competing" || request.kind == "rank") {
    const auto ranks = read_ranks(request.ranks.value_or(out.ranks_csv()));
    const auto layout = layout_for(request.entity);
    if (request.kind == "competing") {
      std::vector<CompetingLabel> labels;
      for (const auto& r : ranks) labels.push_back({r.positive_ordinal, r.best_label, {}});
      const auto overlay = competing_overlay(labels);
      options.title = "Highest-scoring candidate per event";
      result = render(layout, styles, &overlay, options, target("competing_" + entity));
    } else {
      const auto overlay = rank_overlay(ranks);
      options.title = "Prediction rank above " + csv::format_number(config.rank_threshold);
      options.min_value = config.rank_threshold;
      options.show_context = false;
      result = render(layout, styles, &overlay, options, target("rank_" + entity));
    }
  } else if (request.kind == "degree") {
    const auto ranks = read_ranks(request.ranks.value_or(out.ranks_csv()));
    const auto scatter = degree_scatter(ranks, data.history, data.catalog, request.degree_mode);
    const std::string mode = request.degree_mode == DegreeMode::DestinationNode ? "destination" : "edge";
    ScatterOptions so;
    so.title = "Prediction rank vs " + mode + " degree";
    result = render_degree_scatter(scatter, so, target("degree_" + mode));
  } else {
    throw ValidationError("unknown plot kind '" + request.kind + "'");
  }
  return {result.svg, result.csv};
}

Artifacts run_pipeline(const RunConfig& config) {
  in_stage("config", [&] { config.validate(); });
  const auto data = load_dataset(config);
  Artifacts all;
  auto add = [&all](const Artifacts& a) { all.insert(all.end(), a.begin(), a.end()); };
  add(in_stage("split", [&] { return stage_split(config, *data); }));
  add(in_stage("classify", [&] { return stage_classify(config, *data); }));
  add(in_stage("sample", [&] { return stage_sample(config, *data); }));
  add(in_stage("score", [&] { return stage_score(config, *data); }));
  add(in_stage("evaluate", [&] { return stage_evaluate(config, *data); }));
  auto plot = [&](const std::string& kind, EntityKind entity, DegreeMode mode) {
    PlotRequest request;
    request.kind = kind;
    request.entity = entity;
    request.degree_mode = mode;
    add(stage_plot(config, *data, request));
  };
  for (const auto& kind : config.plots) {
    in_stage("plot " + kind, [&] {
      if (kind == "tna" || kind == "tea") {
        plot(kind, EntityKind::Node, DegreeMode::DestinationNode);
      } else if (kind == "degree") {
        plot(kind, EntityKind::Node, DegreeMode::DestinationNode);
        plot(kind, EntityKind::Node, DegreeMode::Edge);
      } else {
        plot(kind, EntityKind::Node, DegreeMode::DestinationNode);
        plot(kind, EntityKind::Edge, DegreeMode::DestinationNode);
      }
    });
  }

  nlohmann::json inputs{{"events", {{"path", config.events.string()}, {"sha256", sha256_file(config.events)}}}};
  if (config.node_attributes) {
    inputs["node_attributes"] = {{"path", config.node_attributes->string()},
                                 {"sha256", sha256_file(*config.node_attributes)}};
  }
  if (config.style) inputs["style"] = {{"path", config.style->string()}, {"sha256", sha256_file(*config.style)}};
  if (const auto scorer = parse_scorer(config.scorer); scorer.kind == ScorerKind::External) {
    inputs["external_scores"] = {{"path", scorer.external_path.string()},
                                 {"sha256", sha256_file(scorer.external_path)}};
  }
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& path : all) {
    artifacts.push_back(
        {{"path", path.lexically_relative(config.output_dir).generic_string()}, {"sha256", sha256_file(path)}});
  }
  const OutputPaths out(config.output_dir);
  write_json(out.manifest(), {{"config", to_json(config)}, {"inputs", inputs}, {"artifacts", artifacts}});
  all.push_back(out.manifest());
  return all;
}

}  // namespace dlpeval
