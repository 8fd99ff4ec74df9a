#include "dlpeval/taxonomy.hpp"

#include <algorithm>

#include "dlpeval/error.hpp"

namespace dlpeval {

std::string to_string(NodeCategory c) {
  switch (c) {
    case NodeCategory::Historical: return "historical";
    case NodeCategory::Inductive: return "inductive";
    case NodeCategory::Overlap: return "overlap";
    case NodeCategory::Absent: return "absent";
  }
  return "?";
}

std::string to_string(EdgeCategory c) {
  switch (c) {
    case EdgeCategory::NeverObserved: return "never_observed";
    case EdgeCategory::Historical: return "historical_edge";
    case EdgeCategory::Inductive: return "inductive_edge";
    case EdgeCategory::Overlap: return "overlap_edge";
    case EdgeCategory::OutOfScope: return "out_of_scope_edge";
  }
  return "?";
}

std::string to_string(PairCategory c) {
  switch (c) {
    case PairCategory::HistoricalHistorical: return "historical_to_historical";
    case PairCategory::HistoricalInductive: return "historical_to_inductive";
    case PairCategory::InductiveInductive: return "inductive_to_inductive";
    case PairCategory::OverlapOverlap: return "overlap_to_overlap";
    case PairCategory::OverlapHistorical: return "overlap_to_historical";
    case PairCategory::OverlapInductive: return "overlap_to_inductive";
    case PairCategory::Undefined: return "undefined";
  }
  return "?";
}

PairCategory parse_pair_category(const std::string& text) {
  for (auto c : kPairCategories) {
    if (to_string(c) == text) return c;
  }
  static const std::pair<const char*, PairCategory> kShort[] = {
      {"hh", PairCategory::HistoricalHistorical}, {"hi", PairCategory::HistoricalInductive},
      {"ih", PairCategory::HistoricalInductive},  {"ii", PairCategory::InductiveInductive},
      {"oo", PairCategory::OverlapOverlap},       {"oh", PairCategory::OverlapHistorical},
      {"ho", PairCategory::OverlapHistorical},    {"oi", PairCategory::OverlapInductive},
      {"io", PairCategory::OverlapInductive},
  };
  for (const auto& [name, c] : kShort) {
    if (text == name) return c;
  }
  throw ValidationError("unknown node-pair category '" + text + "'");
}

std::pair<NodeCategory, NodeCategory> endpoints(PairCategory c) {
  using N = NodeCategory;
  switch (c) {
    case PairCategory::HistoricalHistorical: return {N::Historical, N::Historical};
    case PairCategory::HistoricalInductive: return {N::Historical, N::Inductive};
    case PairCategory::InductiveInductive: return {N::Inductive, N::Inductive};
    case PairCategory::OverlapOverlap: return {N::Overlap, N::Overlap};
    case PairCategory::OverlapHistorical: return {N::Overlap, N::Historical};
    case PairCategory::OverlapInductive: return {N::Overlap, N::Inductive};
    case PairCategory::Undefined: break;
  }
  return {N::Absent, N::Absent};
}

PairCategory combine(NodeCategory a, NodeCategory b) {
  using N = NodeCategory;
  if (a == N::Absent || b == N::Absent) return PairCategory::Undefined;
  if (static_cast<int>(a) > static_cast<int>(b)) std::swap(a, b);
  // a <= b in Historical < Inductive < Overlap order.
  if (a == N::Historical && b == N::Historical) return PairCategory::HistoricalHistorical;
  if (a == N::Historical && b == N::Inductive) return PairCategory::HistoricalInductive;
  if (a == N::Historical && b == N::Overlap) return PairCategory::OverlapHistorical;
  if (a == N::Inductive && b == N::Inductive) return PairCategory::InductiveInductive;
  if (a == N::Inductive && b == N::Overlap) return PairCategory::OverlapInductive;
  return PairCategory::OverlapOverlap;
}

namespace {

void touch(EntityRecord& r, Timestamp t, bool observed, bool test) {
  if (r.arrivals.empty()) r.first_arrival = t;
  r.last_arrival = t;
  r.arrivals.push_back(t);
  r.in_observed = r.in_observed || observed;
  r.in_test = r.in_test || test;
}

template <typename Category>
Category categorize(const EntityRecord& r, Category historical, Category inductive, Category overlap,
                    Category neither) {
  if (r.in_observed && r.in_test) return overlap;
  if (r.in_observed) return historical;
  if (r.in_test) return inductive;
  return neither;
}

template <typename T>
std::vector<T> merged(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<T> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

EntityCatalog EntityCatalog::build(const SplitHistory& split, const TaxonomyOptions& options) {
  if (split.history == nullptr) throw ValidationError("split has no history");
  const std::size_t observed_end = split.observed_end(options.observed_scope);
  if (observed_end == 0) throw DataError("taxonomy needs a non-empty observed (train) period");
  if (split.val_end >= split.size()) throw DataError("taxonomy needs a non-empty test period");

  EntityCatalog c;
  c.options_ = options;
  c.nodes_.resize(split.history->node_count());

  std::unordered_map<PairKey, EntityRecord> edges;
  for (const Event& e : split.history->events()) {
    const bool observed = e.ordinal < observed_end;
    const bool test = e.ordinal >= split.val_end;
    touch(c.nodes_[e.source], e.timestamp, observed, test);
    if (e.destination != e.source) touch(c.nodes_[e.destination], e.timestamp, observed, test);
    touch(edges[pair_key(e.source, e.destination)], e.timestamp, observed, test);
  }

  c.node_categories_.resize(c.nodes_.size());
  for (NodeId u = 0; u < c.nodes_.size(); ++u) {
    const auto cat = categorize(c.nodes_[u], NodeCategory::Historical, NodeCategory::Inductive,
                                NodeCategory::Overlap, NodeCategory::Absent);
    c.node_categories_[u] = cat;
    c.node_members_[static_cast<int>(cat)].push_back(u);
  }

  c.edge_keys_.reserve(edges.size());
  for (const auto& [key, _] : edges) c.edge_keys_.push_back(key);
  std::sort(c.edge_keys_.begin(), c.edge_keys_.end());
  c.edges_.reserve(edges.size());
  c.edge_categories_.reserve(edges.size());
  for (std::size_t i = 0; i < c.edge_keys_.size(); ++i) {
    const PairKey key = c.edge_keys_[i];
    c.edges_.push_back(std::move(edges[key]));
    const auto cat = categorize(c.edges_.back(), EdgeCategory::Historical, EdgeCategory::Inductive,
                                EdgeCategory::Overlap, EdgeCategory::OutOfScope);
    c.edge_categories_.push_back(cat);
    c.edge_members_[static_cast<int>(cat)].push_back(key);
    c.edge_index_.emplace(key, i);
  }

  if (options.historical_includes_overlap) {
    c.relaxed_historical_nodes_ = merged(c.node_members_[static_cast<int>(NodeCategory::Historical)],
                                         c.node_members_[static_cast<int>(NodeCategory::Overlap)]);
    c.relaxed_historical_edges_ = merged(c.edge_members_[static_cast<int>(EdgeCategory::Historical)],
                                         c.edge_members_[static_cast<int>(EdgeCategory::Overlap)]);
  }
  return c;
}

std::size_t EntityCatalog::observed_node_count() const {
  return nodes_.size() - node_members_[static_cast<int>(NodeCategory::Absent)].size();
}

NodeCategory EntityCatalog::node_category(NodeId u) const {
  return u < node_categories_.size() ? node_categories_[u] : NodeCategory::Absent;
}

EdgeCategory EntityCatalog::edge_category(NodeId u, NodeId v) const {
  auto it = edge_index_.find(pair_key(u, v));
  return it == edge_index_.end() ? EdgeCategory::NeverObserved : edge_categories_[it->second];
}

const EntityRecord* EntityCatalog::node_record(NodeId u) const {
  return u < nodes_.size() && !nodes_[u].arrivals.empty() ? &nodes_[u] : nullptr;
}

const EntityRecord* EntityCatalog::edge_record(NodeId u, NodeId v) const {
  auto it = edge_index_.find(pair_key(u, v));
  return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

std::span<const NodeId> EntityCatalog::node_pool(NodeCategory c) const {
  if (c == NodeCategory::Historical && options_.historical_includes_overlap) return relaxed_historical_nodes_;
  return nodes_in(c);
}

std::span<const PairKey> EntityCatalog::edge_pool(EdgeCategory c) const {
  if (c == EdgeCategory::Historical && options_.historical_includes_overlap) return relaxed_historical_edges_;
  return edges_in(c);
}

bool EntityCatalog::in_node_pool(NodeCategory c, NodeId u) const {
  const auto actual = node_category(u);
  if (actual == c) return true;
  return c == NodeCategory::Historical && options_.historical_includes_overlap && actual == NodeCategory::Overlap;
}

bool EntityCatalog::in_edge_pool(EdgeCategory c, NodeId u, NodeId v) const {
  const auto actual = edge_category(u, v);
  if (actual == c) return true;
  return c == EdgeCategory::Historical && options_.historical_includes_overlap && actual == EdgeCategory::Overlap;
}

namespace {
std::size_t count_before(const std::vector<Timestamp>& arrivals, Timestamp t) {
  return static_cast<std::size_t>(std::lower_bound(arrivals.begin(), arrivals.end(), t) - arrivals.begin());
}
}  // namespace

std::size_t EntityCatalog::temporal_degree(NodeId u, Timestamp t) const {
  if (u >= nodes_.size()) return 0;
  return count_before(nodes_[u].arrivals, t);
}

std::size_t EntityCatalog::edge_degree(NodeId u, NodeId v, Timestamp t) const {
  const EntityRecord* r = edge_record(u, v);
  return r == nullptr ? 0 : count_before(r->arrivals, t);
}

}  // namespace dlpeval
