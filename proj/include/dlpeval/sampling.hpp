#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlpeval/events.hpp"
#include "dlpeval/split.hpp"
#include "dlpeval/taxonomy.hpp"

namespace dlpeval {

enum class Strategy {
  RandomDestination,
  HistoricalDestination,
  InductiveDestination,
  OverlapDestination,
  NeverObserved,
  HistoricalEdge,
  InductiveEdge,
  OverlapEdge,
  NodePair,
};

struct SamplerSpec {
  Strategy strategy = Strategy::RandomDestination;
  PairCategory pair = PairCategory::Undefined;  // NodePair only
  std::size_t k = 1;
  std::uint64_t seed = 0;
  /// Also reject pairs that occur as a positive at the same timestamp.
  bool exclude_same_timestamp_positives = false;
  /// Permit u == v candidates for the pair-drawing strategies.
  bool allow_self_loops = false;
  /// Draw cap for rejection sampling (NeverObserved and strict exclusion).
  std::size_t rejection_budget = 100000;
};

/// Snake-case label written to candidate files ("historical_edge", "destination", ...).
std::string label(const SamplerSpec& spec);
/// Accepts labels and their hyphenated CLI spellings; NodePair as "pair-hi" or
/// "historical_to_inductive". "random-edge" is an alias of never-observed.
SamplerSpec parse_sampler(const std::string& name);
nlohmann::json to_json(const SamplerSpec& spec);

struct Negative {
  NodeId source = 0;
  NodeId destination = 0;
  std::string label;  // strategy the slot was sampled under
};

/// One positive event and its negatives; slot s>=1 is negatives[s-1].
struct CandidateSet {
  Event positive;
  std::vector<Negative> negatives;
};

/// Draws spec.k negatives for one positive. Deterministic in (spec, positive.ordinal).
///
/// Throws EmptyPoolError when the strategy has nothing to offer after
/// excluding the positive pair, and RejectionBudgetExceeded when rejection
/// sampling gives up.
CandidateSet sample_negatives(const SamplerSpec& spec, const EntityCatalog& catalog, const History& history,
                              const Event& positive);

/// The membership predicate a negative drawn under `spec` must satisfy.
bool satisfies(const SamplerSpec& spec, const EntityCatalog& catalog, const Event& positive, NodeId u, NodeId v);

enum class EmptyPoolPolicy { Skip, Abort };

struct SampleRunOptions {
  /// Emit candidates for train and validation positives too.
  bool include_history = false;
  EmptyPoolPolicy on_empty_pool = EmptyPoolPolicy::Skip;
};

struct SkippedSlot {
  Ordinal positive_ordinal = 0;
  std::string strategy;
  std::string reason;
};

struct SampleRun {
  std::vector<SamplerSpec> specs;
  std::vector<CandidateSet> sets;
  std::vector<SkippedSlot> skipped;
};

/// One CandidateSet per positive in stream order. With several specs the
/// negatives of each spec are concatenated in spec order; a spec whose pool is
/// empty for an event drops out of that event's set (recorded in `skipped`)
/// and the positive is dropped only if no spec produced anything.
SampleRun sample_run(const std::vector<SamplerSpec>& specs, const SplitHistory& split,
                     const EntityCatalog& catalog, const SampleRunOptions& options = {});

/// Digest identifying the candidate stream: specs, options and split.
std::string sampler_spec_hash(const std::vector<SamplerSpec>& specs, const SampleRunOptions& options,
                              const SplitHistory& split, const TaxonomyOptions& taxonomy);
nlohmann::json sampler_spec_json(const std::vector<SamplerSpec>& specs, const SampleRunOptions& options,
                                 const SplitHistory& split, const TaxonomyOptions& taxonomy);

/// candidates.csv: positive_ordinal,slot,neg_source,neg_destination,strategy (raw node ids).
void write_candidates(const std::filesystem::path& path, const SampleRun& run, const History& history);
/// Reads candidates.csv back, checking every positive ordinal against the history.
std::vector<CandidateSet> read_candidates(const std::filesystem::path& path, const History& history);

}  // namespace dlpeval
