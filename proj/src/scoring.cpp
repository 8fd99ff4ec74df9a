#include "dlpeval/scoring.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "dlpeval/error.hpp"
#include "dlpeval/io.hpp"

namespace dlpeval {

void ScorerState::advance(const Event& event) {
  if (watermark_ && (event.ordinal <= watermark_->ordinal || event.timestamp < watermark_->timestamp)) {
    throw OrderError("out-of-order event: ordinal " + std::to_string(event.ordinal) + " after watermark " +
                     std::to_string(watermark_->ordinal));
  }
  auto remember = [this, &event](NodeId u, NodeId v) { last_seen_[pair_key(u, v)] = event.timestamp; };
  remember(event.source, event.destination);
  if (edgebank_.symmetrize) remember(event.destination, event.source);

  const NodeId top = std::max(event.source, event.destination);
  if (degrees_.size() <= top) degrees_.resize(top + 1, 0);
  ++degrees_[event.source];
  if (event.destination != event.source) ++degrees_[event.destination];

  ++processed_;
  watermark_ = Watermark{event.timestamp, event.ordinal};
}

void ScorerState::check_query(Timestamp t) const {
  if (watermark_ && t <= watermark_->timestamp) {
    throw OrderError("query at t=" + csv::format_number(t) + " would see state up to t=" +
                     csv::format_number(watermark_->timestamp));
  }
}

double ScorerState::score_edgebank(NodeId u, NodeId v, Timestamp t) const {
  check_query(t);
  auto it = last_seen_.find(pair_key(u, v));
  if (it == last_seen_.end()) return 0.0;
  if (edgebank_.window && t - it->second > *edgebank_.window) return 0.0;
  return 1.0;
}

std::uint64_t ScorerState::score_pa(NodeId u, NodeId v, Timestamp t) const {
  check_query(t);
  return degree(u) * degree(v);
}

void ExternalScoreTable::set(Ordinal ordinal, std::size_t slot, double score) { scores_[{ordinal, slot}] = score; }

std::optional<double> ExternalScoreTable::find(Ordinal ordinal, std::size_t slot) const {
  auto it = scores_.find({ordinal, slot});
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

double ExternalScoreTable::at(Ordinal ordinal, std::size_t slot) const {
  if (auto s = find(ordinal, slot)) return *s;
  throw MissingScoreError("missing external score for (positive_ordinal=" + std::to_string(ordinal) +
                          ", slot=" + std::to_string(slot) + ")");
}

std::filesystem::path ExternalScoreTable::sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

ExternalScoreTable ExternalScoreTable::read(const std::filesystem::path& csv_path) {
  ExternalScoreTable table;
  const auto sidecar = sidecar_path(csv_path);
  if (std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    try {
      const auto meta = nlohmann::json::parse(in);
      table.model_ = meta.value("model", "");
      table.spec_hash_ = meta.value("sampler_spec_hash", "");
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed score sidecar " + sidecar.string() + ": " + e.what());
    }
  }
  const auto rows = csv::read_table(csv_path, {"positive_ordinal", "slot", "score"});
  const std::string where = csv_path.string();
  for (std::size_t r = 0; r < rows.rows.size(); ++r) {
    const auto& row = rows.rows[r];
    const auto line = rows.line_numbers[r];
    table.set(csv::parse_uint(row[0], where, line), csv::parse_uint(row[1], where, line),
              csv::parse_double(row[2], where, line));
  }
  return table;
}

void ExternalScoreTable::write(const std::filesystem::path& csv_path) const {
  ensure_parent_directory(csv_path);
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + csv_path.string());
    out << "positive_ordinal,slot,score\n";
    for (const auto& [key, score] : scores_) {
      out << key.first << ',' << key.second << ',' << csv::format_number(score) << '\n';
    }
  }
  std::ofstream meta(sidecar_path(csv_path), std::ios::binary);
  meta << nlohmann::json{{"model", model_}, {"sampler_spec_hash", spec_hash_}}.dump(2) << '\n';
}

std::string scorer_name(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::EdgeBank: return "edgebank";
    case ScorerKind::PreferentialAttachment: return "pa";
    case ScorerKind::External: return "external";
  }
  return "?";
}

ScorerKind parse_scorer_kind(const std::string& text) {
  if (text == "edgebank") return ScorerKind::EdgeBank;
  if (text == "pa" || text == "preferential-attachment") return ScorerKind::PreferentialAttachment;
  if (text == "external") return ScorerKind::External;
  throw ValidationError("unknown scorer '" + text + "' (expected edgebank, pa or external:<path>)");
}

std::vector<ScoredSet> score_candidates(const ScorerChoice& scorer, const SplitHistory& split,
                                        const std::vector<CandidateSet>& candidates) {
  const History& history = *split.history;
  if (scorer.kind == ScorerKind::External) {
    if (scorer.external == nullptr) throw ValidationError("external scorer without a score table");
    if (!scorer.expected_spec_hash.empty() && scorer.external->spec_hash() != scorer.expected_spec_hash) {
      throw DataError("external score table was produced for sampler spec " + scorer.external->spec_hash() +
                      ", but the candidates come from " + scorer.expected_spec_hash);
    }
  }

  ScorerState state(scorer.edgebank);
  std::size_t next = 0;
  std::optional<Ordinal> previous;
  std::vector<ScoredSet> out;
  out.reserve(candidates.size());
  for (const auto& set : candidates) {
    const Event& p = set.positive;
    if (p.ordinal >= history.size() || !(history[p.ordinal] == p)) {
      throw DataError("candidate/split mismatch at positive ordinal " + std::to_string(p.ordinal));
    }
    if (previous && p.ordinal <= *previous) {
      throw DataError("candidate stream is not ordered by positive ordinal at " + std::to_string(p.ordinal));
    }
    previous = p.ordinal;

    ScoredSet scored{set, 0.0, {}};
    scored.negative_scores.reserve(set.negatives.size());
    if (scorer.kind == ScorerKind::External) {
      scored.positive_score = scorer.external->at(p.ordinal, 0);
      for (std::size_t i = 0; i < set.negatives.size(); ++i) {
        scored.negative_scores.push_back(scorer.external->at(p.ordinal, i + 1));
      }
    } else {
      while (next < history.size() && history[next].timestamp < p.timestamp) state.advance(history[next++]);
      auto score = [&](NodeId u, NodeId v) {
        return scorer.kind == ScorerKind::EdgeBank ? state.score_edgebank(u, v, p.timestamp)
                                                   : static_cast<double>(state.score_pa(u, v, p.timestamp));
      };
      scored.positive_score = score(p.source, p.destination);
      for (const auto& n : set.negatives) scored.negative_scores.push_back(score(n.source, n.destination));
    }
    out.push_back(std::move(scored));
  }
  return out;
}

ExternalScoreTable to_score_table(const std::vector<ScoredSet>& scored, std::string model, std::string spec_hash) {
  ExternalScoreTable table(std::move(model), std::move(spec_hash));
  for (const auto& s : scored) {
    table.set(s.candidates.positive.ordinal, 0, s.positive_score);
    for (std::size_t i = 0; i < s.negative_scores.size(); ++i) {
      table.set(s.candidates.positive.ordinal, i + 1, s.negative_scores[i]);
    }
  }
  return table;
}

}  // namespace dlpeval
