#include "dlpeval/split.hpp"

#include <cmath>

#include "dlpeval/error.hpp"

namespace dlpeval {

std::string to_string(ObservedScope scope) {
  return scope == ObservedScope::TrainOnly ? "train" : "train+validation";
}

ObservedScope parse_observed_scope(const std::string& text) {
  if (text == "train" || text == "train-only") return ObservedScope::TrainOnly;
  if (text == "train+validation" || text == "train+val" || text == "train-val") {
    return ObservedScope::TrainAndValidation;
  }
  throw ValidationError("unknown observed scope '" + text + "' (expected train or train+validation)");
}

Timestamp SplitHistory::t_validation() const {
  if (train_end < val_end) return (*history)[train_end].timestamp;
  return t_train;
}

namespace {

// First index after the tie block containing index `b`, where b splits [b-1] | [b].
std::size_t block_end(std::span<const Event> events, std::size_t b) {
  while (b < events.size() && b > 0 && events[b].timestamp == events[b - 1].timestamp) ++b;
  return b;
}

std::size_t block_begin(std::span<const Event> events, std::size_t b) {
  while (b > 0 && b < events.size() && events[b].timestamp == events[b - 1].timestamp) --b;
  return b;
}

std::size_t floor_count(double fraction, std::size_t m) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(m) + 1e-9));
}

}  // namespace

SplitHistory chronological_split(const History& history, const SplitFractions& f) {
  if (f.train < 0.0 || f.validation < 0.0 || f.test < 0.0) {
    throw ValidationError("split fractions must be non-negative");
  }
  if (std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  if (f.test <= 0.0) throw ValidationError("test split empty: test fraction must be positive");
  if (f.train <= 0.0) throw ValidationError("train split empty: train fraction must be positive");

  const auto events = history.events();
  const std::size_t m = events.size();
  if (m < 3) throw DataError("chronological split needs at least 3 events, got " + std::to_string(m));
  if (events.front().timestamp == events.back().timestamp) {
    throw DataError("split impossible: a single timestamp spans the entire stream");
  }

  SplitHistory s;
  s.history = &history;
  s.fractions = f;
  const std::size_t train_req = floor_count(f.train, m);
  const std::size_t val_req = std::max(train_req, floor_count(f.train + f.validation, m));
  if (val_req >= m) throw DataError("test split empty after rounding");

  std::size_t val_end = block_end(events, val_req);
  std::string val_dir = val_end == val_req ? "none" : "forward";
  if (val_end >= m) {
    val_end = block_begin(events, val_req);
    val_dir = "backward";
  }
  if (val_end == 0) throw DataError("split impossible: no event precedes the test boundary timestamp");

  std::size_t train_end = std::min(train_req, val_end);
  std::string train_dir = "none";
  if (train_end < val_end) {
    const std::size_t fwd = block_end(events, train_end);
    if (fwd != train_end) {
      train_end = std::min(fwd, val_end);
      train_dir = "forward";
    }
  } else if (train_end != train_req) {
    train_dir = "backward";
  }
  if (train_end == 0) throw DataError("train split empty after tie adjustment");

  s.train_end = train_end;
  s.val_end = val_end;
  s.t_train = events[val_end].timestamp;
  s.train_adjustment = {train_req, train_end, train_dir};
  s.val_adjustment = {val_req, val_end, val_dir};
  return s;
}

nlohmann::json split_manifest(const SplitHistory& s, ObservedScope scope) {
  auto adjustment = [](const TieAdjustment& a) {
    return nlohmann::json{{"requested", a.requested}, {"adjusted", a.adjusted}, {"direction", a.direction}};
  };
  return nlohmann::json{
      {"fractions", {{"train", s.fractions.train}, {"validation", s.fractions.validation}, {"test", s.fractions.test}}},
      {"event_count", s.size()},
      {"train_end", s.train_end},
      {"val_end", s.val_end},
      {"t_validation", s.t_validation()},
      {"t_train", s.t_train},
      {"tie_adjustments", {{"train_end", adjustment(s.train_adjustment)}, {"val_end", adjustment(s.val_adjustment)}}},
      {"observed_scope", to_string(scope)},
  };
}

SplitHistory split_from_manifest(const History& history, const nlohmann::json& manifest) {
  try {
    const auto& fr = manifest.at("fractions");
    SplitFractions f{fr.at("train").get<double>(), fr.at("validation").get<double>(), fr.at("test").get<double>()};
    SplitHistory s = chronological_split(history, f);
    if (manifest.at("event_count").get<std::size_t>() != history.size() ||
        manifest.at("train_end").get<std::size_t>() != s.train_end ||
        manifest.at("val_end").get<std::size_t>() != s.val_end) {
      throw DataError("split manifest does not match the event file");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed split manifest: ") + e.what());
  }
}

}  // namespace dlpeval
