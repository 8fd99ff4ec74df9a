#include "dlpeval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "dlpeval/error.hpp"
#include "dlpeval/rng.hpp"

namespace dlpeval {

namespace {

struct RawEvent {
  std::size_t u;
  std::size_t v;
};

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
}

std::uint64_t key(std::size_t u, std::size_t v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

class Generator {
 public:
  explicit Generator(const SyntheticConfig& c) : c_(c), rng_(c.seed) {}

  History run() {
    validate();
    assign_categories();
    generate_observed();
    generate_test();
    return assemble();
  }

 private:
  void fail(const std::string& why) const { throw ValidationError("infeasible synthetic mix: " + why); }

  void validate() {
    if (c_.n_nodes == 0 || c_.n_events == 0) throw ValidationError("synthetic config needs n_nodes > 0 and n_events > 0");
    if (c_.events_per_timestamp == 0) throw ValidationError("events_per_timestamp must be positive");
    if (c_.historical_node_fraction < 0 || c_.inductive_node_fraction < 0 ||
        c_.historical_node_fraction + c_.inductive_node_fraction > 1.0 + 1e-12) {
      throw ValidationError("node fractions must be non-negative and sum to at most 1");
    }
    if (c_.test_repeat_fraction < 0 || c_.test_repeat_fraction > 1) {
      throw ValidationError("test_repeat_fraction must lie in [0,1]");
    }
    const double observed = c_.fractions.train + c_.fractions.validation;
    n_obs_ = static_cast<std::size_t>(std::floor(observed * static_cast<double>(c_.n_events) + 1e-9));
    if (n_obs_ == 0) fail("no events before the test boundary");
    if (n_obs_ >= c_.n_events) fail("zero test events");
    n_test_ = c_.n_events - n_obs_;
  }

  void assign_categories() {
    const auto n = c_.n_nodes;
    auto nh = static_cast<std::size_t>(std::llround(c_.historical_node_fraction * static_cast<double>(n)));
    auto ni = static_cast<std::size_t>(std::llround(c_.inductive_node_fraction * static_cast<double>(n)));
    if (nh + ni > n) ni = n - nh;
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    shuffle(ids, rng_);
    historical_.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(nh));
    inductive_.assign(ids.begin() + static_cast<std::ptrdiff_t>(nh), ids.begin() + static_cast<std::ptrdiff_t>(nh + ni));
    overlap_.assign(ids.begin() + static_cast<std::ptrdiff_t>(nh + ni), ids.end());

    observed_pool_ = historical_;
    observed_pool_.insert(observed_pool_.end(), overlap_.begin(), overlap_.end());
    test_pool_ = inductive_;
    test_pool_.insert(test_pool_.end(), overlap_.begin(), overlap_.end());
    const std::size_t min_pool = c_.allow_self_loops ? 1 : 2;
    if (observed_pool_.size() < min_pool) fail("too few historical/overlap nodes for the observed period");
    if (test_pool_.size() < min_pool) fail("too few inductive/overlap nodes for the test period");
  }

  std::size_t draw(const std::vector<std::size_t>& pool) { return pool[rng_.below(pool.size())]; }

  std::size_t partner(const std::vector<std::size_t>& pool, std::size_t u) {
    std::size_t v = draw(pool);
    while (!c_.allow_self_loops && v == u) v = draw(pool);
    return v;
  }

  void generate_observed() {
    std::vector<std::size_t> cover = observed_pool_;
    shuffle(cover, rng_);
    for (std::size_t i = 0; i < cover.size(); i += 2) {
      const std::size_t u = cover[i];
      const std::size_t v = i + 1 < cover.size() ? cover[i + 1] : partner(observed_pool_, u);
      observed_.push_back({u, v});
    }
    if (observed_.size() > n_obs_) fail("not enough observed events to cover every historical/overlap node");
    while (observed_.size() < n_obs_) {
      const std::size_t u = draw(observed_pool_);
      observed_.push_back({u, partner(observed_pool_, u)});
    }
    shuffle(observed_, rng_);
    for (const auto& e : observed_) seen_.insert(key(e.u, e.v));
  }

  void generate_test() {
    const auto n_repeat =
        static_cast<std::size_t>(std::llround(c_.test_repeat_fraction * static_cast<double>(n_test_)));
    const std::size_t n_new = n_test_ - n_repeat;

    std::vector<RawEvent> repeat_candidates;
    std::set<std::size_t> overlap_set(overlap_.begin(), overlap_.end());
    for (auto k : std::set<std::uint64_t>(seen_.begin(), seen_.end())) {
      const std::size_t u = k >> 32, v = k & 0xffffffffu;
      if (overlap_set.count(u) && overlap_set.count(v)) repeat_candidates.push_back({u, v});
    }
    if (n_repeat > 0 && repeat_candidates.empty()) fail("repeat events requested but no overlap-overlap pair was observed");

    std::set<std::size_t> uncovered(overlap_.begin(), overlap_.end());
    auto mark = [&uncovered](const RawEvent& e) {
      uncovered.erase(e.u);
      uncovered.erase(e.v);
    };

    // New pairs: inductive coverage first, then uncovered overlap nodes, then random.
    std::vector<std::size_t> cover = inductive_;
    shuffle(cover, rng_);
    std::vector<RawEvent> fresh;
    for (std::size_t i = 0; i < cover.size(); i += 2) {
      const std::size_t u = cover[i];
      const std::size_t v = i + 1 < cover.size() ? cover[i + 1] : partner(test_pool_, u);
      fresh.push_back({u, v});
      mark(fresh.back());
    }
    if (fresh.size() > n_new) fail("not enough unseen-pair test events to cover every inductive node");

    // Repeats, preferring pairs that bring an overlap node into the test period.
    std::map<std::size_t, std::vector<std::size_t>> candidates_of;
    for (std::size_t i = 0; i < repeat_candidates.size(); ++i) {
      candidates_of[repeat_candidates[i].u].push_back(i);
      candidates_of[repeat_candidates[i].v].push_back(i);
    }
    std::vector<RawEvent> repeats;
    std::vector<std::size_t> want(uncovered.begin(), uncovered.end());
    shuffle(want, rng_);
    for (std::size_t node : want) {
      if (repeats.size() >= n_repeat) break;
      if (!uncovered.count(node)) continue;
      auto it = candidates_of.find(node);
      if (it == candidates_of.end()) continue;
      repeats.push_back(repeat_candidates[it->second[rng_.below(it->second.size())]]);
      mark(repeats.back());
    }
    while (repeats.size() < n_repeat) repeats.push_back(repeat_candidates[rng_.below(repeat_candidates.size())]);

    constexpr std::size_t kAttempts = 10000;
    while (fresh.size() < n_new) {
      bool placed = false;
      for (std::size_t attempt = 0; attempt < kAttempts && !placed; ++attempt) {
        std::size_t u = uncovered.empty() ? draw(test_pool_) : *uncovered.begin();
        std::size_t v = partner(test_pool_, u);
        if (rng_.coin()) std::swap(u, v);
        if (seen_.count(key(u, v))) continue;
        fresh.push_back({u, v});
        mark(fresh.back());
        placed = true;
      }
      if (!placed) fail("could not find an unseen pair for a test event; the observed graph is too dense");
    }

    test_ = std::move(fresh);
    test_.insert(test_.end(), repeats.begin(), repeats.end());
    shuffle(test_, rng_);
  }

  History assemble() {
    HistoryBuilder builder;
    const std::size_t k = c_.events_per_timestamp;
    for (std::size_t m = 0; m < observed_.size(); ++m) {
      builder.add(std::to_string(observed_[m].u), std::to_string(observed_[m].v), static_cast<double>(m / k));
    }
    const std::size_t offset = (n_obs_ - 1) / k + 1;
    for (std::size_t m = 0; m < test_.size(); ++m) {
      builder.add(std::to_string(test_[m].u), std::to_string(test_[m].v), static_cast<double>(offset + m / k));
    }
    return std::move(builder).build();
  }

  SyntheticConfig c_;
  Rng rng_;
  std::size_t n_obs_ = 0;
  std::size_t n_test_ = 0;
  std::vector<std::size_t> historical_, inductive_, overlap_;
  std::vector<std::size_t> observed_pool_, test_pool_;
  std::vector<RawEvent> observed_, test_;
  std::unordered_set<std::uint64_t> seen_;
};

}  // namespace

History generate_synthetic(const SyntheticConfig& config) { return Generator(config).run(); }

}  // namespace dlpeval
