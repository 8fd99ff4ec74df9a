#pragma once

#include <cstdint>

#include "dlpeval/events.hpp"
#include "dlpeval/split.hpp"

namespace dlpeval {

/// Target mix for a generated stream, expressed against its own split.
///
/// Node fractions are over the node universe; overlap gets the remainder.
/// `test_repeat_fraction` is the share of test events whose pair already
/// occurred before the test boundary. Targets are met exactly when feasible,
/// except that an overlap node without a test slot degrades to historical.
struct SyntheticConfig {
  std::size_t n_nodes = 50;
  std::size_t n_events = 1000;
  std::uint64_t seed = 1;
  double historical_node_fraction = 0.4;
  double inductive_node_fraction = 0.2;
  double test_repeat_fraction = 0.3;
  SplitFractions fractions{};
  std::size_t events_per_timestamp = 1;
  bool allow_self_loops = false;
};

/// Deterministic under `seed`. Throws ValidationError for infeasible mixes.
History generate_synthetic(const SyntheticConfig& config);

}  // namespace dlpeval
