#include "dlpeval/events.hpp"

#include <algorithm>
#include <numeric>

#include "dlpeval/error.hpp"

namespace dlpeval {

std::optional<NodeId> History::find_node(std::string_view raw) const {
  auto it = id_lookup_.find(std::string(raw));
  if (it == id_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::string> History::attributes(Ordinal ordinal) const {
  if (attributes_.empty() || ordinal >= attributes_.size()) return {};
  return attributes_[ordinal];
}

void HistoryBuilder::add(std::string source, std::string destination, Timestamp timestamp,
                         std::vector<std::string> attributes) {
  if (!(timestamp >= 0.0) || timestamp == kEndOfTime) {
    throw DataError("timestamp must be finite and non-negative");
  }
  any_attributes_ = any_attributes_ || !attributes.empty();
  rows_.push_back({std::move(source), std::move(destination), timestamp, std::move(attributes)});
}

History HistoryBuilder::build() && {
  std::vector<std::size_t> order(rows_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows_[a].timestamp < rows_[b].timestamp;
  });

  History h;
  h.events_.reserve(rows_.size());
  auto intern = [&h](const std::string& raw) {
    auto [it, inserted] = h.id_lookup_.try_emplace(raw, static_cast<NodeId>(h.raw_ids_.size()));
    if (inserted) h.raw_ids_.push_back(raw);
    return it->second;
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Row& row = rows_[order[i]];
    const NodeId u = intern(row.source);
    const NodeId v = intern(row.destination);
    h.events_.push_back(Event{u, v, row.timestamp, static_cast<Ordinal>(i)});
  }
  if (any_attributes_) {
    h.attributes_.reserve(order.size());
    for (std::size_t i : order) h.attributes_.push_back(std::move(rows_[i].attributes));
  }
  h.attribute_names_ = std::move(attribute_names_);
  rows_.clear();
  return h;
}

std::span<const Event> prefix_view(const History& history, Timestamp t, Ordinal ordinal_bound) {
  const auto events = history.events();
  auto it = std::lower_bound(events.begin(), events.end(), t,
                             [](const Event& e, Timestamp value) { return e.timestamp < value; });
  const auto by_time = static_cast<std::size_t>(it - events.begin());
  const auto by_ordinal = static_cast<std::size_t>(std::min<Ordinal>(ordinal_bound, events.size()));
  return events.first(std::min(by_time, by_ordinal));
}

}  // namespace dlpeval
