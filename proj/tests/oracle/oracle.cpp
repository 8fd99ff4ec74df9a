#include "oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace oracle {

using dlpeval::EdgeCategory;
using dlpeval::NodeCategory;
using dlpeval::Strategy;

double auc(const std::vector<double>& positives, const std::vector<double>& negatives) {
  if (positives.empty() || negatives.empty()) throw std::invalid_argument("empty score list");
  double credit = 0.0;
  for (double p : positives) {
    for (double n : negatives) {
      if (p > n) credit += 1.0;
      else if (p == n) credit += 0.5;
    }
  }
  return credit / (static_cast<double>(positives.size()) * static_cast<double>(negatives.size()));
}

double average_precision(const std::vector<double>& positives, const std::vector<double>& negatives) {
  if (positives.empty()) throw std::invalid_argument("no positives");
  double total = 0.0;
  for (double threshold : positives) {
    double hits = 0.0, retrieved = 0.0;
    for (double p : positives) {
      if (p >= threshold) hits += 1.0, retrieved += 1.0;
    }
    for (double n : negatives) {
      if (n >= threshold) retrieved += 1.0;
    }
    total += hits / retrieved;
  }
  return total / static_cast<double>(positives.size());
}

double rank(double positive, const std::vector<double>& negatives, dlpeval::RankConvention convention) {
  std::vector<double> all(negatives);
  all.push_back(positive);
  std::sort(all.begin(), all.end(), std::greater<>());
  std::size_t first = all.size(), last = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] == positive) {
      first = std::min(first, i);
      last = i;
    }
  }
  switch (convention) {
    case dlpeval::RankConvention::Optimistic: return static_cast<double>(first + 1);
    case dlpeval::RankConvention::Pessimistic: return static_cast<double>(last + 1);
    case dlpeval::RankConvention::Mean: break;
  }
  return (static_cast<double>(first + 1) + static_cast<double>(last + 1)) / 2.0;
}

double mrr(const std::vector<double>& ranks) {
  double sum = 0.0;
  for (double r : ranks) sum += 1.0 / r;
  return sum / static_cast<double>(ranks.size());
}

double edgebank_replay(const History& history, NodeId u, NodeId v, Timestamp t, std::optional<double> window,
                       bool symmetrize) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Event& e = history[i];
    if (!(e.timestamp < t)) continue;
    const bool same = (e.source == u && e.destination == v) || (symmetrize && e.source == v && e.destination == u);
    if (!same) continue;
    if (window && t - e.timestamp > *window) continue;
    return 1.0;
  }
  return 0.0;
}

std::uint64_t pa_replay(const History& history, NodeId u, NodeId v, Timestamp t) {
  std::uint64_t du = 0, dv = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Event& e = history[i];
    if (!(e.timestamp < t)) continue;
    if (e.source == u || e.destination == u) ++du;
    if (e.source == v || e.destination == v) ++dv;
  }
  return du * dv;
}

NodeCategory Taxonomy::node(NodeId u) const { return u < nodes.size() ? nodes[u] : NodeCategory::Absent; }

EdgeCategory Taxonomy::edge(NodeId u, NodeId v) const {
  auto it = edges.find(dlpeval::pair_key(u, v));
  return it == edges.end() ? EdgeCategory::NeverObserved : it->second;
}

Taxonomy classify(const History& history, std::size_t observed_end, std::size_t val_end,
                  bool historical_includes_overlap) {
  Taxonomy out;
  out.historical_includes_overlap = historical_includes_overlap;
  std::set<NodeId> seen_nodes;
  std::set<dlpeval::PairKey> seen_pairs;
  std::set<NodeId> observed_nodes, test_nodes;
  std::set<dlpeval::PairKey> observed_pairs, test_pairs;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Event& e = history[i];
    const auto key = dlpeval::pair_key(e.source, e.destination);
    seen_nodes.insert(e.source);
    seen_nodes.insert(e.destination);
    seen_pairs.insert(key);
    if (i < observed_end) {
      observed_nodes.insert(e.source);
      observed_nodes.insert(e.destination);
      observed_pairs.insert(key);
    }
    if (i >= val_end) {
      test_nodes.insert(e.source);
      test_nodes.insert(e.destination);
      test_pairs.insert(key);
    }
  }
  out.nodes.assign(history.node_count(), NodeCategory::Absent);
  for (NodeId u : seen_nodes) {
    const bool a = observed_nodes.count(u) > 0, b = test_nodes.count(u) > 0;
    out.nodes[u] = a && b ? NodeCategory::Overlap : a ? NodeCategory::Historical : b ? NodeCategory::Inductive
                                                                                     : NodeCategory::Absent;
  }
  for (auto key : seen_pairs) {
    const bool a = observed_pairs.count(key) > 0, b = test_pairs.count(key) > 0;
    out.edges[key] = a && b ? EdgeCategory::Overlap : a ? EdgeCategory::Historical : b ? EdgeCategory::Inductive
                                                                                       : EdgeCategory::OutOfScope;
  }
  return out;
}

namespace {

bool node_in(const Taxonomy& tx, NodeCategory wanted, NodeId u) {
  const auto actual = tx.node(u);
  return actual == wanted ||
         (wanted == NodeCategory::Historical && tx.historical_includes_overlap && actual == NodeCategory::Overlap);
}

bool edge_in(const Taxonomy& tx, EdgeCategory wanted, NodeId u, NodeId v) {
  const auto actual = tx.edge(u, v);
  return actual == wanted ||
         (wanted == EdgeCategory::Historical && tx.historical_includes_overlap && actual == EdgeCategory::Overlap);
}

}  // namespace

bool admissible(const dlpeval::SamplerSpec& spec, const Taxonomy& tx, const Event& positive, NodeId u, NodeId v) {
  if (u == positive.source && v == positive.destination) return false;
  const bool valid_ids = u < tx.nodes.size() && v < tx.nodes.size();
  if (!valid_ids) return false;
  switch (spec.strategy) {
    case Strategy::RandomDestination: return u == positive.source;
    case Strategy::HistoricalDestination: return u == positive.source && node_in(tx, NodeCategory::Historical, v);
    case Strategy::InductiveDestination: return u == positive.source && node_in(tx, NodeCategory::Inductive, v);
    case Strategy::OverlapDestination: return u == positive.source && node_in(tx, NodeCategory::Overlap, v);
    case Strategy::NeverObserved:
      return (u != v || spec.allow_self_loops) && tx.edge(u, v) == EdgeCategory::NeverObserved;
    case Strategy::HistoricalEdge: return edge_in(tx, EdgeCategory::Historical, u, v);
    case Strategy::InductiveEdge: return edge_in(tx, EdgeCategory::Inductive, u, v);
    case Strategy::OverlapEdge: return edge_in(tx, EdgeCategory::Overlap, u, v);
    case Strategy::NodePair: {
      if (u == v && !spec.allow_self_loops) return false;
      NodeCategory a = NodeCategory::Absent, b = NodeCategory::Absent;
      switch (spec.pair) {
        case dlpeval::PairCategory::HistoricalHistorical: a = b = NodeCategory::Historical; break;
        case dlpeval::PairCategory::HistoricalInductive: a = NodeCategory::Historical, b = NodeCategory::Inductive; break;
        case dlpeval::PairCategory::InductiveInductive: a = b = NodeCategory::Inductive; break;
        case dlpeval::PairCategory::OverlapOverlap: a = b = NodeCategory::Overlap; break;
        case dlpeval::PairCategory::OverlapHistorical: a = NodeCategory::Overlap, b = NodeCategory::Historical; break;
        case dlpeval::PairCategory::OverlapInductive: a = NodeCategory::Overlap, b = NodeCategory::Inductive; break;
        case dlpeval::PairCategory::Undefined: return false;
      }
      return (node_in(tx, a, u) && node_in(tx, b, v)) || (node_in(tx, b, u) && node_in(tx, a, v));
    }
  }
  return false;
}

}  // namespace oracle
