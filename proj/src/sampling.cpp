#include "dlpeval/sampling.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "dlpeval/error.hpp"
#include "dlpeval/hash.hpp"
#include "dlpeval/io.hpp"
#include "dlpeval/rng.hpp"

namespace dlpeval {

namespace {

struct StrategyName {
  Strategy strategy;
  const char* label;
};

constexpr StrategyName kStrategyNames[] = {
    {Strategy::RandomDestination, "destination"},
    {Strategy::HistoricalDestination, "historical_destination"},
    {Strategy::InductiveDestination, "inductive_destination"},
    {Strategy::OverlapDestination, "overlap_destination"},
    {Strategy::NeverObserved, "never_observed"},
    {Strategy::HistoricalEdge, "historical_edge"},
    {Strategy::InductiveEdge, "inductive_edge"},
    {Strategy::OverlapEdge, "overlap_edge"},
};

std::string normalize(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return name;
}

NodeCategory destination_category(Strategy s) {
  switch (s) {
    case Strategy::HistoricalDestination: return NodeCategory::Historical;
    case Strategy::InductiveDestination: return NodeCategory::Inductive;
    case Strategy::OverlapDestination: return NodeCategory::Overlap;
    default: throw Error(ErrorKind::Internal, "not a destination strategy");
  }
}

EdgeCategory edge_category_of(Strategy s) {
  switch (s) {
    case Strategy::HistoricalEdge: return EdgeCategory::Historical;
    case Strategy::InductiveEdge: return EdgeCategory::Inductive;
    case Strategy::OverlapEdge: return EdgeCategory::Overlap;
    default: throw Error(ErrorKind::Internal, "not an edge strategy");
  }
}

/// Uniform pick from a sorted pool with at most one element left out.
template <typename T>
class PoolDraw {
 public:
  PoolDraw(std::span<const T> pool, const T& excluded) : pool_(pool) {
    auto it = std::lower_bound(pool.begin(), pool.end(), excluded);
    if (it != pool.end() && *it == excluded) skip_ = static_cast<std::size_t>(it - pool.begin());
  }
  std::size_t available() const { return pool_.size() - (skip_ ? 1 : 0); }
  T operator()(Rng& rng) const {
    std::size_t i = rng.below(available());
    if (skip_ && i >= *skip_) ++i;
    return pool_[i];
  }

 private:
  std::span<const T> pool_;
  std::optional<std::size_t> skip_;
};

std::unordered_set<PairKey> same_timestamp_pairs(const History& history, Timestamp t) {
  const auto events = history.events();
  auto lo = std::lower_bound(events.begin(), events.end(), t,
                             [](const Event& e, Timestamp v) { return e.timestamp < v; });
  std::unordered_set<PairKey> pairs;
  for (auto it = lo; it != events.end() && it->timestamp == t; ++it) pairs.insert(pair_key(it->source, it->destination));
  return pairs;
}

std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

class Sampler {
 public:
  Sampler(const SamplerSpec& spec, const EntityCatalog& catalog, const History& history, const Event& positive)
      : spec_(spec),
        catalog_(catalog),
        positive_(positive),
        rng_(Rng::keyed(spec.seed, positive.ordinal,
                        static_cast<std::uint64_t>(spec.strategy) * 16 + static_cast<std::uint64_t>(spec.pair))),
        label_(label(spec)) {
    if (spec.exclude_same_timestamp_positives) strict_ = same_timestamp_pairs(history, positive.timestamp);
  }

  CandidateSet run() {
    if (spec_.k == 0) throw ValidationError("K must be at least 1");
    CandidateSet set{positive_, {}};
    set.negatives.reserve(spec_.k);
    switch (spec_.strategy) {
      case Strategy::RandomDestination:
        universe_.resize(catalog_.node_count());
        std::iota(universe_.begin(), universe_.end(), NodeId{0});
        destinations(universe_, set);
        break;
      case Strategy::HistoricalDestination:
      case Strategy::InductiveDestination:
      case Strategy::OverlapDestination:
        destinations(catalog_.node_pool(destination_category(spec_.strategy)), set);
        break;
      case Strategy::NeverObserved:
        never_observed(set);
        break;
      case Strategy::HistoricalEdge:
      case Strategy::InductiveEdge:
      case Strategy::OverlapEdge:
        edges(catalog_.edge_pool(edge_category_of(spec_.strategy)), set);
        break;
      case Strategy::NodePair:
        node_pairs(set);
        break;
    }
    return set;
  }

 private:
  [[noreturn]] void empty_pool() const {
    throw EmptyPoolError("empty candidate pool for strategy '" + label_ + "' at positive ordinal " +
                         std::to_string(positive_.ordinal));
  }
  [[noreturn]] void out_of_budget() const {
    throw RejectionBudgetExceeded("rejection budget of " + std::to_string(spec_.rejection_budget) +
                                  " draws exceeded for strategy '" + label_ + "' at positive ordinal " +
                                  std::to_string(positive_.ordinal));
  }

  bool strictly_excluded(NodeId u, NodeId v) const { return !strict_.empty() && strict_.count(pair_key(u, v)); }

  template <typename Draw>
  void fill(CandidateSet& set, Draw&& draw) {
    for (std::size_t slot = 0; slot < spec_.k; ++slot) {
      std::size_t attempts = 0;
      while (true) {
        if (attempts++ >= spec_.rejection_budget) out_of_budget();
        auto [u, v] = draw();
        if (strictly_excluded(u, v)) continue;
        set.negatives.push_back({u, v, label_});
        break;
      }
    }
  }

  void destinations(std::span<const NodeId> pool, CandidateSet& set) {
    PoolDraw<NodeId> pick(pool, positive_.destination);
    if (pick.available() == 0) empty_pool();
    fill(set, [&] { return std::pair{positive_.source, pick(rng_)}; });
  }

  void edges(std::span<const PairKey> pool, CandidateSet& set) {
    PoolDraw<PairKey> pick(pool, pair_key(positive_.source, positive_.destination));
    if (pick.available() == 0) empty_pool();
    fill(set, [&] {
      const PairKey key = pick(rng_);
      return std::pair{pair_source(key), pair_destination(key)};
    });
  }

  void never_observed(CandidateSet& set) {
    const std::uint64_t n = catalog_.node_count();
    std::uint64_t possible = spec_.allow_self_loops ? n * n : n * (n - 1);
    std::uint64_t taken = 0;
    for (PairKey key : catalog_.edge_keys()) {
      if (spec_.allow_self_loops || pair_source(key) != pair_destination(key)) ++taken;
    }
    if (n == 0 || possible <= taken) empty_pool();
    fill(set, [&] {
      for (std::size_t attempts = 0; attempts < spec_.rejection_budget; ++attempts) {
        const auto u = static_cast<NodeId>(rng_.below(n));
        const auto v = static_cast<NodeId>(rng_.below(n));
        if ((u == v && !spec_.allow_self_loops) || catalog_.observed_pair(u, v)) continue;
        return std::pair{u, v};
      }
      out_of_budget();
    });
  }

  void node_pairs(CandidateSet& set) {
    if (spec_.pair == PairCategory::Undefined) throw ValidationError("node-pair strategy needs a pair category");
    const auto [first, second] = endpoints(spec_.pair);
    const auto a = catalog_.node_pool(first);
    const auto b = catalog_.node_pool(second);
    const std::uint64_t common = intersection_size(a, b);
    std::uint64_t available = 2 * static_cast<std::uint64_t>(a.size()) * b.size() - common * common;
    if (!spec_.allow_self_loops) available -= common;
    const NodeId pu = positive_.source, pv = positive_.destination;
    if (satisfies_pair(pu, pv)) --available;
    if (available == 0) empty_pool();
    auto in_both = [&, first = first, second = second](NodeId x) {
      return catalog_.in_node_pool(first, x) && catalog_.in_node_pool(second, x);
    };
    fill(set, [&] {
      for (std::size_t attempts = 0; attempts < spec_.rejection_budget; ++attempts) {
        NodeId u = a[rng_.below(a.size())];
        NodeId v = b[rng_.below(b.size())];
        if (rng_.coin()) std::swap(u, v);
        // A pair reachable from both orientations would be drawn twice as often.
        if (first != second && in_both(u) && in_both(v) && rng_.coin()) continue;
        if (u == v && !spec_.allow_self_loops) continue;
        if (u == pu && v == pv) continue;
        return std::pair{u, v};
      }
      out_of_budget();
    });
  }

  bool satisfies_pair(NodeId u, NodeId v) const {
    if (u == v && !spec_.allow_self_loops) return false;
    const auto [first, second] = endpoints(spec_.pair);
    return (catalog_.in_node_pool(first, u) && catalog_.in_node_pool(second, v)) ||
           (catalog_.in_node_pool(second, u) && catalog_.in_node_pool(first, v));
  }

  const SamplerSpec& spec_;
  const EntityCatalog& catalog_;
  const Event& positive_;
  Rng rng_;
  std::string label_;
  std::unordered_set<PairKey> strict_;
  std::vector<NodeId> universe_;
};

}  // namespace

std::string label(const SamplerSpec& spec) {
  if (spec.strategy == Strategy::NodePair) return "pair_" + to_string(spec.pair);
  for (const auto& n : kStrategyNames) {
    if (n.strategy == spec.strategy) return n.label;
  }
  return "?";
}

SamplerSpec parse_sampler(const std::string& name) {
  const std::string key = normalize(name);
  SamplerSpec spec;
  if (key == "random_edge" || key == "random") {
    spec.strategy = Strategy::NeverObserved;
    return spec;
  }
  if (key == "random_destination") {
    spec.strategy = Strategy::RandomDestination;
    return spec;
  }
  for (const auto& n : kStrategyNames) {
    if (key == n.label) {
      spec.strategy = n.strategy;
      return spec;
    }
  }
  if (key.rfind("pair_", 0) == 0) {
    spec.strategy = Strategy::NodePair;
    spec.pair = parse_pair_category(key.substr(5));
    return spec;
  }
  throw ValidationError("unknown sampler '" + name + "'");
}

nlohmann::json to_json(const SamplerSpec& spec) {
  return nlohmann::json{{"strategy", label(spec)},
                        {"k", spec.k},
                        {"seed", spec.seed},
                        {"exclude_same_timestamp_positives", spec.exclude_same_timestamp_positives},
                        {"allow_self_loops", spec.allow_self_loops},
                        {"rejection_budget", spec.rejection_budget}};
}

bool satisfies(const SamplerSpec& spec, const EntityCatalog& catalog, const Event& positive, NodeId u, NodeId v) {
  if (u == positive.source && v == positive.destination) return false;
  switch (spec.strategy) {
    case Strategy::RandomDestination:
      return u == positive.source && v < catalog.node_count();
    case Strategy::HistoricalDestination:
    case Strategy::InductiveDestination:
    case Strategy::OverlapDestination:
      return u == positive.source && catalog.in_node_pool(destination_category(spec.strategy), v);
    case Strategy::NeverObserved:
      return (u != v || spec.allow_self_loops) && u < catalog.node_count() && v < catalog.node_count() &&
             catalog.edge_category(u, v) == EdgeCategory::NeverObserved;
    case Strategy::HistoricalEdge:
    case Strategy::InductiveEdge:
    case Strategy::OverlapEdge:
      return catalog.in_edge_pool(edge_category_of(spec.strategy), u, v);
    case Strategy::NodePair: {
      if (u == v && !spec.allow_self_loops) return false;
      const auto [first, second] = endpoints(spec.pair);
      return (catalog.in_node_pool(first, u) && catalog.in_node_pool(second, v)) ||
             (catalog.in_node_pool(second, u) && catalog.in_node_pool(first, v));
    }
  }
  return false;
}

CandidateSet sample_negatives(const SamplerSpec& spec, const EntityCatalog& catalog, const History& history,
                              const Event& positive) {
  return Sampler(spec, catalog, history, positive).run();
}

SampleRun sample_run(const std::vector<SamplerSpec>& specs, const SplitHistory& split, const EntityCatalog& catalog,
                     const SampleRunOptions& options) {
  if (specs.empty()) throw ValidationError("at least one sampler is required");
  SampleRun run;
  run.specs = specs;
  const auto positives = options.include_history ? split.history->events() : split.test();
  run.sets.reserve(positives.size());
  for (const Event& positive : positives) {
    CandidateSet merged{positive, {}};
    for (const auto& spec : specs) {
      try {
        auto set = sample_negatives(spec, catalog, *split.history, positive);
        std::move(set.negatives.begin(), set.negatives.end(), std::back_inserter(merged.negatives));
      } catch (const EmptyPoolError& e) {
        if (options.on_empty_pool == EmptyPoolPolicy::Abort) throw;
        run.skipped.push_back({positive.ordinal, label(spec), e.what()});
      }
    }
    if (!merged.negatives.empty()) run.sets.push_back(std::move(merged));
  }
  return run;
}

nlohmann::json sampler_spec_json(const std::vector<SamplerSpec>& specs, const SampleRunOptions& options,
                                 const SplitHistory& split, const TaxonomyOptions& taxonomy) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : specs) list.push_back(to_json(s));
  return nlohmann::json{
      {"samplers", list},
      {"include_history", options.include_history},
      {"on_empty_pool", options.on_empty_pool == EmptyPoolPolicy::Skip ? "skip" : "abort"},
      {"split", {{"event_count", split.size()}, {"train_end", split.train_end}, {"val_end", split.val_end}}},
      {"taxonomy",
       {{"observed_scope", to_string(taxonomy.observed_scope)},
        {"historical_includes_overlap", taxonomy.historical_includes_overlap}}},
  };
}

std::string sampler_spec_hash(const std::vector<SamplerSpec>& specs, const SampleRunOptions& options,
                              const SplitHistory& split, const TaxonomyOptions& taxonomy) {
  return sha256_hex(sampler_spec_json(specs, options, split, taxonomy).dump());
}

void write_candidates(const std::filesystem::path& path, const SampleRun& run, const History& history) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "positive_ordinal,slot,neg_source,neg_destination,strategy\n";
  for (const auto& set : run.sets) {
    for (std::size_t i = 0; i < set.negatives.size(); ++i) {
      const auto& n = set.negatives[i];
      out << set.positive.ordinal << ',' << i + 1 << ',' << history.raw_id(n.source) << ','
          << history.raw_id(n.destination) << ',' << n.label << '\n';
    }
  }
}

std::vector<CandidateSet> read_candidates(const std::filesystem::path& path, const History& history) {
  const auto table =
      csv::read_table(path, {"positive_ordinal", "slot", "neg_source", "neg_destination", "strategy"});
  const std::string where = path.string();
  std::vector<CandidateSet> sets;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    const Ordinal ordinal = csv::parse_uint(row[0], where, line);
    const std::uint64_t slot = csv::parse_uint(row[1], where, line);
    if (ordinal >= history.size()) throw ParseError(where, line, "positive ordinal outside the event stream");
    auto u = history.find_node(row[2]);
    auto v = history.find_node(row[3]);
    if (!u || !v) throw ParseError(where, line, "unknown node id");
    if (sets.empty() || sets.back().positive.ordinal != ordinal) {
      if (!sets.empty() && sets.back().positive.ordinal > ordinal) {
        throw ParseError(where, line, "positive ordinals must be non-decreasing");
      }
      sets.push_back({history[ordinal], {}});
    }
    if (slot != sets.back().negatives.size() + 1) throw ParseError(where, line, "slots must run 1..K in order");
    sets.back().negatives.push_back({*u, *v, row[4]});
  }
  return sets;
}

}  // namespace dlpeval
