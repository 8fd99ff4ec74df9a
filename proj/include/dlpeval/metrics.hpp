#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlpeval/scoring.hpp"

namespace dlpeval {

inline const std::string kPositiveLabel = "positive";

enum class RankConvention { Mean, Optimistic, Pessimistic };
enum class Averaging { Pooled, PerEvent };

std::string to_string(RankConvention c);
RankConvention parse_rank_convention(const std::string& text);
std::string to_string(Averaging a);
Averaging parse_averaging(const std::string& text);

/// Two-sample AUC, P(pos > neg) + P(pos == neg)/2, by sort-and-count.
double auc(std::span<const double> positives, std::span<const double> negatives);
/// Average precision with positives as the relevant class. Tied scores form
/// one threshold: every positive in a tied block gets the precision at the
/// block's end (sum over thresholds of recall gain times precision).
double average_precision(std::span<const double> positives, std::span<const double> negatives);
/// Rank of `positive` among `negatives`, 1 = best.
double rank_of(double positive, std::span<const double> negatives, RankConvention convention = RankConvention::Mean);

/// Pooled or per-event-averaged metric over a scored stream.
double compute_auc(const std::vector<ScoredSet>& scored, Averaging averaging = Averaging::Pooled);
double compute_ap(const std::vector<ScoredSet>& scored, Averaging averaging = Averaging::Pooled);

struct RankRecord {
  Ordinal positive_ordinal = 0;
  double rank = 1.0;
  std::size_t k = 0;
  std::string best_label;  // argmax candidate; ties go to the positive, then the lowest slot
};

std::vector<RankRecord> compute_ranks(const std::vector<ScoredSet>& scored,
                                      RankConvention convention = RankConvention::Mean);
double mean_reciprocal_rank(std::span<const RankRecord> ranks);

struct CompetingLabel {
  Ordinal positive_ordinal = 0;
  std::string label;
  std::vector<std::string> missing;  // configured strategies with no candidate for this event
};

/// Winner per event among the positive and the strategy-labelled negatives.
std::vector<CompetingLabel> competing_labels(const std::vector<ScoredSet>& scored,
                                             const std::vector<std::string>& strategies);

struct StrategyMetrics {
  double auc = 0.0;
  double ap = 0.0;
  double mrr = 0.0;
  std::size_t negatives = 0;
};

struct MetricReport {
  double auc = 0.0;
  double ap = 0.0;
  double mrr = 0.0;
  std::size_t events = 0;
  std::size_t negatives = 0;
  RankConvention rank_convention = RankConvention::Mean;
  Averaging averaging = Averaging::Pooled;
  std::map<std::string, StrategyMetrics> per_strategy;
  nlohmann::json sampler;  // echo of the sampler spec
  std::map<std::string, std::size_t> composition;  // negatives per category label, when known
};

MetricReport evaluate(const std::vector<ScoredSet>& scored, RankConvention convention = RankConvention::Mean,
                      Averaging averaging = Averaging::Pooled);

nlohmann::json to_json(const MetricReport& report);

/// ranks.csv: positive_ordinal,rank,best_label
void write_ranks(const std::filesystem::path& path, const std::vector<RankRecord>& ranks);
std::vector<RankRecord> read_ranks(const std::filesystem::path& path);

}  // namespace dlpeval
