#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dlpeval {

using NodeId = std::uint32_t;
using Ordinal = std::uint64_t;
using Timestamp = double;

inline constexpr Timestamp kEndOfTime = std::numeric_limits<Timestamp>::infinity();
inline constexpr Ordinal kNoOrdinalBound = std::numeric_limits<Ordinal>::max();

/// One timestamped directed interaction.
struct Event {
  NodeId source = 0;
  NodeId destination = 0;
  Timestamp timestamp = 0.0;
  Ordinal ordinal = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Directed node pair packed into one key; orders like (source, destination).
using PairKey = std::uint64_t;

constexpr PairKey pair_key(NodeId source, NodeId destination) {
  return (static_cast<PairKey>(source) << 32) | destination;
}
constexpr NodeId pair_source(PairKey key) { return static_cast<NodeId>(key >> 32); }
constexpr NodeId pair_destination(PairKey key) { return static_cast<NodeId>(key & 0xffffffffu); }

/// Immutable time-ordered event stream with its node-id mapping.
///
/// Events are sorted by (timestamp, input order) and carry ordinal == index.
/// Dense node ids are handed out in order of first appearance along the sorted
/// stream (source before destination), so the mapping is a pure function of
/// the stream contents.
class History {
 public:
  History() = default;

  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }

  std::size_t node_count() const { return raw_ids_.size(); }
  const std::string& raw_id(NodeId node) const { return raw_ids_.at(node); }
  const std::vector<std::string>& raw_ids() const { return raw_ids_; }
  std::optional<NodeId> find_node(std::string_view raw) const;

  /// Opaque extra columns of an event; empty when not retained.
  std::span<const std::string> attributes(Ordinal ordinal) const;
  const std::vector<std::string>& attribute_names() const { return attribute_names_; }
  bool has_attributes() const { return !attributes_.empty(); }

  friend bool operator==(const History& a, const History& b) {
    return a.events_ == b.events_ && a.raw_ids_ == b.raw_ids_ && a.attributes_ == b.attributes_ &&
           a.attribute_names_ == b.attribute_names_;
  }

 private:
  friend class HistoryBuilder;

  std::vector<Event> events_;
  std::vector<std::string> raw_ids_;
  std::unordered_map<std::string, NodeId> id_lookup_;
  std::vector<std::string> attribute_names_;
  std::vector<std::vector<std::string>> attributes_;  // indexed by ordinal, or empty
};

/// Accumulates raw rows in input order and produces a canonical History.
class HistoryBuilder {
 public:
  void set_attribute_names(std::vector<std::string> names) { attribute_names_ = std::move(names); }
  void add(std::string source, std::string destination, Timestamp timestamp,
           std::vector<std::string> attributes = {});
  std::size_t size() const { return rows_.size(); }

  /// Stable-sorts by timestamp and assigns ordinals and dense ids.
  History build() &&;

 private:
  struct Row {
    std::string source;
    std::string destination;
    Timestamp timestamp;
    std::vector<std::string> attributes;
  };
  std::vector<Row> rows_;
  std::vector<std::string> attribute_names_;
  bool any_attributes_ = false;
};

/// Events strictly before `t` and with ordinal below `ordinal_bound`.
///
/// Both constraints select a prefix of the sorted stream, so the view is a
/// subspan and costs one binary search.
std::span<const Event> prefix_view(const History& history, Timestamp t,
                                   Ordinal ordinal_bound = kNoOrdinalBound);

}  // namespace dlpeval
