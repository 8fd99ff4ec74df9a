#include "dlpeval/layout.hpp"

#include <algorithm>
#include <tuple>

#include "dlpeval/error.hpp"

namespace dlpeval {

namespace {

struct Span {
  Timestamp first = 0.0;
  Timestamp last = 0.0;
  bool seen = false;

  void touch(Timestamp t) {
    if (!seen) first = t;
    last = t;
    seen = true;
  }
};

void assign_rows(PlotLayout& layout, std::vector<std::pair<std::uint64_t, Span>> spans) {
  std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second.first, a.second.last, a.first) < std::tie(b.second.first, b.second.last, b.first);
  });
  layout.entities.reserve(spans.size());
  for (std::size_t row = 0; row < spans.size(); ++row) {
    layout.entities.push_back(spans[row].first);
    layout.rows.emplace(spans[row].first, row);
  }
  layout.axis.rows = spans.size();
}

void set_time_range(PlotLayout& layout, const History& history) {
  layout.axis.t_min = history.events().front().timestamp;
  layout.axis.t_max = history.events().back().timestamp;
}

}  // namespace

PlotLayout node_layout(const History& history, const NodeAttributes* attributes) {
  if (history.empty()) throw DataError("cannot lay out an empty history");
  std::vector<Span> spans(history.node_count());
  for (const Event& e : history.events()) {
    spans[e.source].touch(e.timestamp);
    spans[e.destination].touch(e.timestamp);
  }
  std::vector<std::pair<std::uint64_t, Span>> entries;
  for (NodeId u = 0; u < spans.size(); ++u) {
    if (spans[u].seen) entries.emplace_back(u, spans[u]);
  }

  PlotLayout layout;
  layout.kind = EntityKind::Node;
  assign_rows(layout, std::move(entries));
  set_time_range(layout, history);

  auto style = [&](NodeId u) -> const std::string& {
    if (attributes != nullptr && u < attributes->size() && !(*attributes)[u].empty()) return (*attributes)[u];
    return kActivityStyle;
  };
  layout.points.reserve(2 * history.size());
  for (const Event& e : history.events()) {
    layout.points.push_back({e.timestamp, layout.rows[e.source], e.ordinal, style(e.source), std::nullopt});
    layout.points.push_back({e.timestamp, layout.rows[e.destination], e.ordinal, style(e.destination), std::nullopt});
  }
  return layout;
}

PlotLayout edge_layout(const History& history) {
  if (history.empty()) throw DataError("cannot lay out an empty history");
  std::unordered_map<PairKey, Span> spans;
  for (const Event& e : history.events()) spans[pair_key(e.source, e.destination)].touch(e.timestamp);
  std::vector<std::pair<std::uint64_t, Span>> entries(spans.begin(), spans.end());

  PlotLayout layout;
  layout.kind = EntityKind::Edge;
  assign_rows(layout, std::move(entries));
  set_time_range(layout, history);

  layout.points.reserve(history.size());
  for (const Event& e : history.events()) {
    layout.points.push_back(
        {e.timestamp, layout.rows[pair_key(e.source, e.destination)], e.ordinal, kActivityStyle, std::nullopt});
  }
  return layout;
}

void add_split_markers(PlotLayout& layout, const SplitHistory& split) {
  if (split.train_end < split.val_end) layout.axis.markers.push_back({"validation", split.t_validation()});
  layout.axis.markers.push_back({"test", split.t_train});
}

}  // namespace dlpeval
