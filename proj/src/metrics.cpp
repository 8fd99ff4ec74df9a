#include "dlpeval/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "dlpeval/error.hpp"
#include "dlpeval/io.hpp"

namespace dlpeval {

std::string to_string(RankConvention c) {
  switch (c) {
    case RankConvention::Mean: return "mean";
    case RankConvention::Optimistic: return "optimistic";
    case RankConvention::Pessimistic: return "pessimistic";
  }
  return "?";
}

RankConvention parse_rank_convention(const std::string& text) {
  if (text == "mean") return RankConvention::Mean;
  if (text == "optimistic") return RankConvention::Optimistic;
  if (text == "pessimistic") return RankConvention::Pessimistic;
  throw ValidationError("unknown rank convention '" + text + "'");
}

std::string to_string(Averaging a) { return a == Averaging::Pooled ? "pooled" : "per-event"; }

Averaging parse_averaging(const std::string& text) {
  if (text == "pooled") return Averaging::Pooled;
  if (text == "per-event" || text == "macro") return Averaging::PerEvent;
  throw ValidationError("unknown averaging '" + text + "' (expected pooled or per-event)");
}

namespace {

struct Labelled {
  double score;
  bool positive;
};

std::vector<Labelled> pooled(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw DataError("metric needs at least one positive and one negative score");
  }
  std::vector<Labelled> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Labelled& a, const Labelled& b) { return a.score < b.score; });
  return all;
}

// Calls f(positives_in_block, negatives_in_block) for each block of equal scores, ascending.
template <typename F>
void for_each_tie_block(const std::vector<Labelled>& sorted, F&& f) {
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    std::uint64_t p = 0, n = 0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      (sorted[j].positive ? p : n) += 1;
      ++j;
    }
    f(p, n);
    i = j;
  }
}

}  // namespace

double auc(std::span<const double> positives, std::span<const double> negatives) {
  const auto sorted = pooled(positives, negatives);
  // Twice the Mann-Whitney count keeps half-ties integral.
  std::uint64_t twice_wins = 0;
  std::uint64_t negatives_below = 0;
  for_each_tie_block(sorted, [&](std::uint64_t p, std::uint64_t n) {
    twice_wins += 2 * p * negatives_below + p * n;
    negatives_below += n;
  });
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(positives.size()) * static_cast<double>(negatives.size()));
}

double average_precision(std::span<const double> positives, std::span<const double> negatives) {
  auto sorted = pooled(positives, negatives);
  std::reverse(sorted.begin(), sorted.end());
  const auto total_positives = static_cast<double>(positives.size());
  double weighted = 0.0;
  std::uint64_t seen = 0, hits = 0;
  for_each_tie_block(sorted, [&](std::uint64_t p, std::uint64_t n) {
    hits += p;
    seen += p + n;
    if (p > 0) weighted += static_cast<double>(p) * (static_cast<double>(hits) / static_cast<double>(seen));
  });
  return weighted / total_positives;
}

double rank_of(double positive, std::span<const double> negatives, RankConvention convention) {
  std::size_t greater = 0, tied = 0;
  for (double s : negatives) {
    greater += s > positive;
    tied += s == positive;
  }
  switch (convention) {
    case RankConvention::Optimistic: return 1.0 + static_cast<double>(greater);
    case RankConvention::Pessimistic: return 1.0 + static_cast<double>(greater + tied);
    case RankConvention::Mean: break;
  }
  return 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(tied);
}

namespace {

template <typename Metric>
double aggregate(const std::vector<ScoredSet>& scored, Averaging averaging, Metric metric) {
  if (averaging == Averaging::PerEvent) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : scored) {
      if (s.negative_scores.empty()) continue;
      sum += metric(std::span<const double>(&s.positive_score, 1), std::span<const double>(s.negative_scores));
      ++count;
    }
    if (count == 0) throw DataError("metric needs at least one scored event with negatives");
    return sum / static_cast<double>(count);
  }
  std::vector<double> pos, neg;
  pos.reserve(scored.size());
  for (const auto& s : scored) {
    pos.push_back(s.positive_score);
    neg.insert(neg.end(), s.negative_scores.begin(), s.negative_scores.end());
  }
  return metric(std::span<const double>(pos), std::span<const double>(neg));
}

std::string best_label(const ScoredSet& s) {
  std::string label = kPositiveLabel;
  double best = s.positive_score;
  for (std::size_t i = 0; i < s.negative_scores.size(); ++i) {
    if (s.negative_scores[i] > best) {
      best = s.negative_scores[i];
      label = s.candidates.negatives[i].label;
    }
  }
  return label;
}

}  // namespace

double compute_auc(const std::vector<ScoredSet>& scored, Averaging averaging) {
  return aggregate(scored, averaging, [](auto p, auto n) { return auc(p, n); });
}

double compute_ap(const std::vector<ScoredSet>& scored, Averaging averaging) {
  return aggregate(scored, averaging, [](auto p, auto n) { return average_precision(p, n); });
}

std::vector<RankRecord> compute_ranks(const std::vector<ScoredSet>& scored, RankConvention convention) {
  std::vector<RankRecord> out;
  out.reserve(scored.size());
  for (const auto& s : scored) {
    out.push_back({s.candidates.positive.ordinal, rank_of(s.positive_score, s.negative_scores, convention),
                   s.negative_scores.size(), best_label(s)});
  }
  return out;
}

double mean_reciprocal_rank(std::span<const RankRecord> ranks) {
  if (ranks.empty()) throw DataError("MRR needs at least one ranked event");
  double sum = 0.0;
  for (const auto& r : ranks) sum += 1.0 / r.rank;
  return sum / static_cast<double>(ranks.size());
}

std::vector<CompetingLabel> competing_labels(const std::vector<ScoredSet>& scored,
                                             const std::vector<std::string>& strategies) {
  std::vector<CompetingLabel> out;
  out.reserve(scored.size());
  for (const auto& s : scored) {
    CompetingLabel c{s.candidates.positive.ordinal, best_label(s), {}};
    for (const auto& strategy : strategies) {
      const bool present = std::any_of(s.candidates.negatives.begin(), s.candidates.negatives.end(),
                                       [&](const Negative& n) { return n.label == strategy; });
      if (!present) c.missing.push_back(strategy);
    }
    out.push_back(std::move(c));
  }
  return out;
}

MetricReport evaluate(const std::vector<ScoredSet>& scored, RankConvention convention, Averaging averaging) {
  MetricReport r;
  r.rank_convention = convention;
  r.averaging = averaging;
  r.auc = compute_auc(scored, averaging);
  r.ap = compute_ap(scored, averaging);
  const auto ranks = compute_ranks(scored, convention);
  r.mrr = mean_reciprocal_rank(ranks);
  r.events = scored.size();
  for (const auto& s : scored) r.negatives += s.negative_scores.size();

  std::set<std::string> labels;
  for (const auto& s : scored) {
    for (const auto& n : s.candidates.negatives) labels.insert(n.label);
  }
  if (labels.size() > 1) {
    for (const auto& label : labels) {
      std::vector<ScoredSet> subset;
      for (const auto& s : scored) {
        ScoredSet part{{s.candidates.positive, {}}, s.positive_score, {}};
        for (std::size_t i = 0; i < s.negative_scores.size(); ++i) {
          if (s.candidates.negatives[i].label != label) continue;
          part.candidates.negatives.push_back(s.candidates.negatives[i]);
          part.negative_scores.push_back(s.negative_scores[i]);
        }
        if (!part.negative_scores.empty()) subset.push_back(std::move(part));
      }
      StrategyMetrics m;
      m.auc = compute_auc(subset, averaging);
      m.ap = compute_ap(subset, averaging);
      m.mrr = mean_reciprocal_rank(compute_ranks(subset, convention));
      for (const auto& s : subset) m.negatives += s.negative_scores.size();
      r.per_strategy.emplace(label, m);
    }
  }
  return r;
}

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [label, m] : report.per_strategy) {
    per[label] = {{"auc", m.auc}, {"ap", m.ap}, {"mrr", m.mrr}, {"negatives", m.negatives}};
  }
  nlohmann::json j{
      {"auc", report.auc},
      {"ap", report.ap},
      {"mrr", report.mrr},
      {"events", report.events},
      {"negatives", report.negatives},
      {"rank_convention", to_string(report.rank_convention)},
      {"averaging", to_string(report.averaging)},
      {"per_strategy", per},
  };
  if (!report.sampler.is_null()) j["sampler"] = report.sampler;
  if (!report.composition.empty()) j["candidate_composition"] = report.composition;
  return j;
}

void write_ranks(const std::filesystem::path& path, const std::vector<RankRecord>& ranks) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "positive_ordinal,rank,best_label\n";
  for (const auto& r : ranks) out << r.positive_ordinal << ',' << csv::format_number(r.rank) << ',' << r.best_label << '\n';
}

std::vector<RankRecord> read_ranks(const std::filesystem::path& path) {
  const auto table = csv::read_table(path, {"positive_ordinal", "rank", "best_label"});
  std::vector<RankRecord> out;
  const std::string where = path.string();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = table.line_numbers[r];
    RankRecord rec;
    rec.positive_ordinal = csv::parse_uint(row[0], where, line);
    rec.rank = csv::parse_double(row[1], where, line);
    if (rec.rank < 1.0) throw ParseError(where, line, "rank below 1");
    rec.best_label = row[2];
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace dlpeval
