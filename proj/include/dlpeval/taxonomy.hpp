#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dlpeval/events.hpp"
#include "dlpeval/split.hpp"

namespace dlpeval {

enum class NodeCategory { Historical, Inductive, Overlap, Absent };

/// `OutOfScope` marks pairs seen only in validation when validation is not
/// part of the observed scope; it never occurs under the default scope.
enum class EdgeCategory { NeverObserved, Historical, Inductive, Overlap, OutOfScope };

/// Unordered combination of the endpoint categories. `Undefined` when either
/// endpoint is Absent.
enum class PairCategory {
  HistoricalHistorical,
  HistoricalInductive,
  InductiveInductive,
  OverlapOverlap,
  OverlapHistorical,
  OverlapInductive,
  Undefined,
};

inline constexpr std::array kNodeCategories{NodeCategory::Historical, NodeCategory::Inductive,
                                            NodeCategory::Overlap, NodeCategory::Absent};
inline constexpr std::array kObservedEdgeCategories{EdgeCategory::Historical, EdgeCategory::Inductive,
                                                    EdgeCategory::Overlap, EdgeCategory::OutOfScope};
inline constexpr std::array kPairCategories{
    PairCategory::HistoricalHistorical, PairCategory::HistoricalInductive, PairCategory::InductiveInductive,
    PairCategory::OverlapOverlap,       PairCategory::OverlapHistorical,   PairCategory::OverlapInductive};

std::string to_string(NodeCategory c);
std::string to_string(EdgeCategory c);
std::string to_string(PairCategory c);
PairCategory parse_pair_category(const std::string& text);

/// The two endpoint categories of a pair class, in table order.
std::pair<NodeCategory, NodeCategory> endpoints(PairCategory c);
PairCategory combine(NodeCategory a, NodeCategory b);

struct TaxonomyOptions {
  ObservedScope observed_scope = ObservedScope::TrainAndValidation;
  /// Let Historical sampling pools also draw Overlap members (train-occurring
  /// entities). Category labels themselves stay strict.
  bool historical_includes_overlap = false;
};

/// Presence record of a node or a directed pair.
struct EntityRecord {
  Timestamp first_arrival = 0.0;
  Timestamp last_arrival = 0.0;
  bool in_observed = false;  // occurs before the test boundary, within the observed scope
  bool in_test = false;
  std::vector<Timestamp> arrivals;  // sorted, one entry per event
};

/// Per-entity presence records and category indexes over one split.
///
/// Built in one pass. Immutable afterwards and safe to share between readers.
class EntityCatalog {
 public:
  static EntityCatalog build(const SplitHistory& split, const TaxonomyOptions& options = {});

  const TaxonomyOptions& options() const { return options_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t observed_node_count() const;
  std::size_t edge_count() const { return edge_keys_.size(); }

  NodeCategory node_category(NodeId u) const;
  EdgeCategory edge_category(NodeId u, NodeId v) const;
  PairCategory classify_pair(NodeId u, NodeId v) const { return combine(node_category(u), node_category(v)); }

  const EntityRecord* node_record(NodeId u) const;
  const EntityRecord* edge_record(NodeId u, NodeId v) const;
  bool observed_pair(NodeId u, NodeId v) const { return edge_index_.count(pair_key(u, v)) != 0; }

  /// Sorted members of one category (strict labels).
  std::span<const NodeId> nodes_in(NodeCategory c) const { return node_members_[static_cast<int>(c)]; }
  std::span<const PairKey> edges_in(EdgeCategory c) const { return edge_members_[static_cast<int>(c)]; }

  /// Sampling pools; identical to the category lists except that Historical
  /// absorbs Overlap when `historical_includes_overlap` is set.
  std::span<const NodeId> node_pool(NodeCategory c) const;
  std::span<const PairKey> edge_pool(EdgeCategory c) const;
  bool in_node_pool(NodeCategory c, NodeId u) const;
  bool in_edge_pool(EdgeCategory c, NodeId u, NodeId v) const;

  /// Events touching `u` strictly before `t`; a self-loop counts once.
  std::size_t temporal_degree(NodeId u, Timestamp t) const;
  /// Events on exactly (u,v) strictly before `t`.
  std::size_t edge_degree(NodeId u, NodeId v, Timestamp t) const;

  /// All observed pair keys, ascending.
  std::span<const PairKey> edge_keys() const { return edge_keys_; }

 private:
  TaxonomyOptions options_;
  std::vector<EntityRecord> nodes_;
  std::vector<NodeCategory> node_categories_;
  std::vector<PairKey> edge_keys_;
  std::vector<EntityRecord> edges_;  // parallel to edge_keys_
  std::vector<EdgeCategory> edge_categories_;
  std::unordered_map<PairKey, std::size_t> edge_index_;
  std::array<std::vector<NodeId>, 4> node_members_;
  std::array<std::vector<PairKey>, 5> edge_members_;
  std::vector<NodeId> relaxed_historical_nodes_;
  std::vector<PairKey> relaxed_historical_edges_;
};

}  // namespace dlpeval
