#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dlpeval/events.hpp"
#include "dlpeval/sampling.hpp"
#include "dlpeval/split.hpp"

namespace dlpeval {

struct EdgeBankOptions {
  /// Remember a pair only for this long after its last occurrence; unset keeps everything.
  std::optional<double> window;
  /// Treat (u,v) and (v,u) as the same pair.
  bool symmetrize = false;
};

struct Watermark {
  Timestamp timestamp = 0.0;
  Ordinal ordinal = 0;
};

/// Streaming state shared by EdgeBank and preferential attachment.
///
/// Single writer: `advance` consumes positives in stream order; the scoring
/// calls are const and only accept query times after the watermark.
class ScorerState {
 public:
  explicit ScorerState(EdgeBankOptions edgebank = {}) : edgebank_(edgebank) {}

  void advance(const Event& event);

  /// 1 iff (u,v) occurred strictly before t (within the window, if any).
  double score_edgebank(NodeId u, NodeId v, Timestamp t) const;
  /// Product of the strict-past temporal degrees.
  std::uint64_t score_pa(NodeId u, NodeId v, Timestamp t) const;

  std::uint64_t degree(NodeId u) const { return u < degrees_.size() ? degrees_[u] : 0; }
  std::size_t seen_pairs() const { return last_seen_.size(); }
  std::size_t events_processed() const { return processed_; }
  const std::optional<Watermark>& watermark() const { return watermark_; }

 private:
  void check_query(Timestamp t) const;

  EdgeBankOptions edgebank_;
  std::unordered_map<PairKey, Timestamp> last_seen_;
  std::vector<std::uint64_t> degrees_;
  std::size_t processed_ = 0;
  std::optional<Watermark> watermark_;
};

/// Scores produced elsewhere, keyed by (positive_ordinal, slot); slot 0 is the positive.
class ExternalScoreTable {
 public:
  ExternalScoreTable() = default;
  ExternalScoreTable(std::string model, std::string spec_hash) : model_(std::move(model)), spec_hash_(std::move(spec_hash)) {}

  const std::string& model() const { return model_; }
  const std::string& spec_hash() const { return spec_hash_; }
  std::size_t size() const { return scores_.size(); }

  void set(Ordinal ordinal, std::size_t slot, double score);
  std::optional<double> find(Ordinal ordinal, std::size_t slot) const;
  /// Throws MissingScoreError naming the first (ordinal, slot) without a score.
  double at(Ordinal ordinal, std::size_t slot) const;

  /// `scores.csv` plus sidecar `scores.json` holding model and sampler_spec_hash.
  static ExternalScoreTable read(const std::filesystem::path& csv_path);
  void write(const std::filesystem::path& csv_path) const;
  static std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

 private:
  std::string model_;
  std::string spec_hash_;
  std::map<std::pair<Ordinal, std::size_t>, double> scores_;
};

enum class ScorerKind { EdgeBank, PreferentialAttachment, External };

struct ScorerChoice {
  ScorerKind kind = ScorerKind::EdgeBank;
  EdgeBankOptions edgebank;
  const ExternalScoreTable* external = nullptr;
  /// When non-empty, an external table must carry this sampler spec hash.
  std::string expected_spec_hash;
};

std::string scorer_name(ScorerKind kind);
ScorerKind parse_scorer_kind(const std::string& text);

struct ScoredSet {
  CandidateSet candidates;
  double positive_score = 0.0;
  std::vector<double> negative_scores;
};

/// Scores each positive and its negatives against the identical strict-past state.
///
/// Before a positive at (t, ordinal), every event with timestamp < t is fed
/// to the state; negatives are never inserted.
std::vector<ScoredSet> score_candidates(const ScorerChoice& scorer, const SplitHistory& split,
                                        const std::vector<CandidateSet>& candidates);

/// Flattens scored sets into a table (model name and hash as given).
ExternalScoreTable to_score_table(const std::vector<ScoredSet>& scored, std::string model, std::string spec_hash);

}  // namespace dlpeval
