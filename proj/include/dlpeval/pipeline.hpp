#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlpeval/error.hpp"
#include "dlpeval/events.hpp"
#include "dlpeval/io.hpp"
#include "dlpeval/metrics.hpp"
#include "dlpeval/render.hpp"
#include "dlpeval/sampling.hpp"
#include "dlpeval/scoring.hpp"
#include "dlpeval/split.hpp"
#include "dlpeval/taxonomy.hpp"

namespace dlpeval {

/// Fully resolved settings of one run. Serializes to a flat JSON object.
struct RunConfig {
  std::filesystem::path events;
  std::optional<std::filesystem::path> node_attributes;
  IngestOptions ingest;
  SplitFractions fractions;
  TaxonomyOptions taxonomy;

  std::vector<std::string> samplers{"destination"};
  std::size_t k = 100;
  std::uint64_t seed = 0;
  bool include_history = false;
  EmptyPoolPolicy on_empty_pool = EmptyPoolPolicy::Skip;
  bool exclude_same_timestamp_positives = false;
  bool allow_self_loops = false;
  std::size_t rejection_budget = 100000;

  /// "edgebank", "pa" or "external:<scores.csv>".
  std::string scorer = "edgebank";
  EdgeBankOptions edgebank;

  RankConvention rank_convention = RankConvention::Mean;
  Averaging averaging = Averaging::Pooled;

  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> style;
  /// Any of tna, tea, competing, rank, degree.
  std::vector<std::string> plots{"tna", "tea", "competing", "rank", "degree"};
  double rank_threshold = 200.0;
  std::optional<std::size_t> max_points;
  std::uint64_t downsample_seed = 0;

  std::vector<SamplerSpec> sampler_specs() const;
  SampleRunOptions sample_options() const { return {include_history, on_empty_pool}; }
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// History, split and catalog of one event file. Pinned in memory because the
/// split and catalog refer to the history.
struct Dataset {
  History history;
  SplitHistory split;
  EntityCatalog catalog;
  NodeAttributes attributes;

  Dataset() = default;
  Dataset(const Dataset&) = delete;
  Dataset& operator=(const Dataset&) = delete;
};

std::unique_ptr<Dataset> load_dataset(const RunConfig& config);

/// Output file names under RunConfig::output_dir.
struct OutputPaths {
  explicit OutputPaths(const std::filesystem::path& dir) : dir(dir) {}
  std::filesystem::path dir;
  std::filesystem::path split() const { return dir / "split.json"; }
  std::filesystem::path classification_csv() const { return dir / "classification.csv"; }
  std::filesystem::path classification_json() const { return dir / "classification.json"; }
  std::filesystem::path candidates_csv() const { return dir / "candidates.csv"; }
  std::filesystem::path candidates_json() const { return dir / "candidates.json"; }
  std::filesystem::path scores_csv() const { return dir / "scores.csv"; }
  std::filesystem::path metrics_json() const { return dir / "metrics.json"; }
  std::filesystem::path ranks_csv() const { return dir / "ranks.csv"; }
  std::filesystem::path competing_csv() const { return dir / "competing.csv"; }
  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path plots() const { return dir / "plots"; }
};

/// Files written by one stage.
using Artifacts = std::vector<std::filesystem::path>;

Artifacts stage_split(const RunConfig& config, const Dataset& data);
Artifacts stage_classify(const RunConfig& config, const Dataset& data);
Artifacts stage_sample(const RunConfig& config, const Dataset& data);
/// Scores candidates.csv (or `candidates` when given) with the configured scorer.
Artifacts stage_score(const RunConfig& config, const Dataset& data,
                      const std::optional<std::filesystem::path>& candidates = std::nullopt);
/// Evaluates candidates.csv against scores.csv (or the given files).
Artifacts stage_evaluate(const RunConfig& config, const Dataset& data,
                         const std::optional<std::filesystem::path>& candidates = std::nullopt,
                         const std::optional<std::filesystem::path>& scores = std::nullopt);

struct PlotRequest {
  std::string kind;  // tna, tea, competing, rank, degree
  EntityKind entity = EntityKind::Node;
  DegreeMode degree_mode = DegreeMode::DestinationNode;
  std::optional<std::filesystem::path> ranks;  // defaults to ranks.csv
  std::optional<std::filesystem::path> out;    // defaults under plots/
};

Artifacts stage_plot(const RunConfig& config, const Dataset& data, const PlotRequest& request);

/// Candidate composition by edge and node-pair category, per strategy label.
std::map<std::string, std::size_t> candidate_composition(const std::vector<CandidateSet>& sets,
                                                         const EntityCatalog& catalog);

/// split -> classify -> sample -> score -> evaluate -> plots, then manifest.json.
Artifacts run_pipeline(const RunConfig& config);

/// Runs `body` and prefixes any error with the stage name, keeping its kind.
template <typename F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), "stage '" + stage + "': " + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorKind::Data, "stage '" + stage + "': " + e.what());
  }
}

}  // namespace dlpeval
