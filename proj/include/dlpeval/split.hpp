#pragma once

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "dlpeval/events.hpp"

namespace dlpeval {

struct SplitFractions {
  double train = 0.70;
  double validation = 0.15;
  double test = 0.15;
};

/// Which events count as "observed before test" when classifying entities.
enum class ObservedScope { TrainOnly, TrainAndValidation };

std::string to_string(ObservedScope scope);
ObservedScope parse_observed_scope(const std::string& text);

/// Record of how a boundary was moved off a tied-timestamp block.
struct TieAdjustment {
  std::size_t requested = 0;
  std::size_t adjusted = 0;
  std::string direction;  // "none", "forward" or "backward"
};

/// Chronological train/validation/test partition of a History by event count.
///
/// Train is [0, train_end), validation [train_end, val_end), test [val_end, M).
/// No timestamp straddles either boundary.
struct SplitHistory {
  const History* history = nullptr;
  SplitFractions fractions;
  std::size_t train_end = 0;
  std::size_t val_end = 0;
  Timestamp t_train = 0.0;  // timestamp of the first test event
  TieAdjustment train_adjustment;
  TieAdjustment val_adjustment;

  std::size_t size() const { return history->size(); }
  std::span<const Event> train() const { return history->events().subspan(0, train_end); }
  std::span<const Event> validation() const {
    return history->events().subspan(train_end, val_end - train_end);
  }
  std::span<const Event> test() const { return history->events().subspan(val_end); }
  /// Timestamp of the first validation event, or t_train when validation is empty.
  Timestamp t_validation() const;

  /// End of the "observed" prefix under the given scope.
  std::size_t observed_end(ObservedScope scope) const {
    return scope == ObservedScope::TrainOnly ? train_end : val_end;
  }
};

/// Splits by event-count proportions, then moves each boundary off any tie
/// block (forward, or backward when forward would leave the test split empty).
SplitHistory chronological_split(const History& history, const SplitFractions& fractions = {});

/// Split manifest as written to split.json.
nlohmann::json split_manifest(const SplitHistory& split, ObservedScope scope);

/// Rebuilds a split from a manifest, checking it against the history.
SplitHistory split_from_manifest(const History& history, const nlohmann::json& manifest);

}  // namespace dlpeval
