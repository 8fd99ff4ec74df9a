#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dlpeval/events.hpp"
#include "dlpeval/io.hpp"
#include "dlpeval/split.hpp"

namespace dlpeval {

enum class EntityKind { Node, Edge };

struct PlotPoint {
  Timestamp timestamp = 0.0;
  std::size_t row = 0;
  Ordinal ordinal = 0;
  std::string style_key;
  std::optional<double> value;
};

struct TimeMarker {
  std::string label;
  Timestamp timestamp = 0.0;
};

struct AxisMeta {
  Timestamp t_min = 0.0;
  Timestamp t_max = 0.0;
  std::size_t rows = 0;
  std::vector<TimeMarker> markers;
};

/// Row assignment plus the point cloud of a Temporal Node/Edge Activity plot.
///
/// Rows follow (first arrival, last arrival, entity id) ascending; node ids
/// are dense ids and edge ids are (source, destination) pairs.
struct PlotLayout {
  EntityKind kind = EntityKind::Node;
  std::vector<std::uint64_t> entities;  // row -> NodeId or PairKey
  std::unordered_map<std::uint64_t, std::size_t> rows;
  std::vector<PlotPoint> points;
  AxisMeta axis;

  std::size_t row_of(std::uint64_t entity) const { return rows.at(entity); }
};

inline const std::string kActivityStyle = "activity";

/// Two points per event, (t, row(source)) and (t, row(destination)). With
/// attributes, each point takes its node's label as style key.
PlotLayout node_layout(const History& history, const NodeAttributes* attributes = nullptr);
/// One point per event at (t, row(source, destination)).
PlotLayout edge_layout(const History& history);

/// Adds "validation" and "test" boundary rules.
void add_split_markers(PlotLayout& layout, const SplitHistory& split);

}  // namespace dlpeval
