#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "dlpeval/error.hpp"
#include "dlpeval/sampling.hpp"
#include "dlpeval/synthetic.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace dlpeval;
using fixtures::id;
using fixtures::make_history;

namespace {

SplitHistory manual_split(const History& h, std::size_t train) {
  SplitHistory s;
  s.history = &h;
  s.train_end = s.val_end = train;
  s.t_train = h[train].timestamp;
  return s;
}

SamplerSpec spec_of(const std::string& name, std::size_t k, std::uint64_t seed = 0) {
  SamplerSpec s = parse_sampler(name);
  s.k = k;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(Sampler, HistoricalEdgeExcludesPositivePair) {
  // Historical edges {(a,b),(c,d)}, positive (c,d) at test time: only (a,b) remains.
  const History h = make_history({{"a", "b", 1}, {"c", "d", 2}, {"x", "y", 3}});
  const auto cat = EntityCatalog::build(manual_split(h, 2));
  const Event positive{id(h, "c"), id(h, "d"), 3.0, 2};
  const auto set = sample_negatives(spec_of("historical_edge", 20), cat, h, positive);
  ASSERT_EQ(set.negatives.size(), 20u);
  for (const auto& n : set.negatives) {
    EXPECT_EQ(n.source, id(h, "a"));
    EXPECT_EQ(n.destination, id(h, "b"));
    EXPECT_EQ(n.label, "historical_edge");
  }
}

TEST(Sampler, InductiveDestinationSingletonPool) {
  const History h = make_history({{"a", "b", 1}, {"a", "c", 2}, {"a", "x", 3}, {"a", "b", 4}});
  const auto cat = EntityCatalog::build(manual_split(h, 2));
  ASSERT_EQ(cat.nodes_in(NodeCategory::Inductive).size(), 1u);
  const auto set = sample_negatives(spec_of("inductive-destination", 7), cat, h, h[3]);
  ASSERT_EQ(set.negatives.size(), 7u);
  for (const auto& n : set.negatives) {
    EXPECT_EQ(n.source, id(h, "a"));
    EXPECT_EQ(n.destination, id(h, "x"));
  }
}

TEST(Sampler, EmptyPoolRaises) {
  const History h = make_history({{"a", "b", 1}, {"a", "b", 2}});
  const auto cat = EntityCatalog::build(manual_split(h, 1));
  EXPECT_THROW(sample_negatives(spec_of("inductive-edge", 3), cat, h, h[1]), EmptyPoolError);
  EXPECT_THROW(sample_negatives(spec_of("historical-edge", 3), cat, h, h[1]), EmptyPoolError);
  // Two nodes, one observed pair, no self-loops: only (b,a) is never observed.
  const auto never = sample_negatives(spec_of("never-observed", 5), cat, h, h[1]);
  for (const auto& n : never.negatives) {
    EXPECT_EQ(n.source, id(h, "b"));
    EXPECT_EQ(n.destination, id(h, "a"));
  }
}

TEST(Sampler, RandomDestinationIsUniform) {
  // 5 nodes; the source keeps its slot and the positive's destination is
  // excluded, so 4 eligible destinations each with p = 1/4.
  const History h =
      make_history({{"a", "b", 1}, {"c", "d", 2}, {"e", "a", 3}, {"b", "c", 4}, {"d", "e", 5}, {"a", "b", 6}});
  const auto cat = EntityCatalog::build(manual_split(h, 5));
  std::map<NodeId, double> counts;
  const int draws = 1000;
  for (int i = 0; i < draws; ++i) {
    const Event positive{id(h, "a"), id(h, "b"), 6.0 + i, static_cast<Ordinal>(i)};
    const auto set = sample_negatives(spec_of("destination", 1, 99), cat, h, positive);
    ++counts[set.negatives[0].destination];
  }
  ASSERT_EQ(counts.size(), 4u);
  EXPECT_EQ(counts.count(id(h, "b")), 0u);
  const double p = 0.25, sigma = std::sqrt(draws * p * (1 - p));
  for (const auto& [node, c] : counts) EXPECT_NEAR(c, draws * p, 3 * sigma) << node;
}

TEST(SampleRun, CardinalityAndDeterminism) {
  HistoryBuilder b;
  for (int i = 0; i < 66; ++i) b.add("n" + std::to_string(i % 7), "n" + std::to_string((i * 3 + 1) % 7), i);
  const History h = std::move(b).build();
  const auto split = chronological_split(h);
  ASSERT_EQ(split.test().size(), 10u);
  const auto cat = EntityCatalog::build(split);
  const auto run = sample_run({spec_of("destination", 3, 4)}, split, cat);
  ASSERT_EQ(run.sets.size(), 10u);
  for (const auto& s : run.sets) EXPECT_EQ(s.negatives.size(), 3u);
  const auto again = sample_run({spec_of("destination", 3, 4)}, split, cat);
  for (std::size_t i = 0; i < run.sets.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(run.sets[i].negatives[j].destination, again.sets[i].negatives[j].destination);
    }
  }
  SampleRunOptions all;
  all.include_history = true;
  EXPECT_EQ(sample_run({spec_of("destination", 3, 4)}, split, cat, all).sets.size(), h.size());
}

TEST(SampleRun, SkipsEmptyPoolsPerStrategy) {
  const History h = make_history({{"a", "b", 1}, {"a", "c", 2}, {"a", "b", 3}, {"a", "c", 4}});
  const auto split = manual_split(h, 2);
  const auto cat = EntityCatalog::build(split);
  const auto run = sample_run({spec_of("destination", 2), spec_of("inductive-destination", 2)}, split, cat);
  ASSERT_EQ(run.sets.size(), 2u);
  EXPECT_EQ(run.sets[0].negatives.size(), 2u);
  EXPECT_EQ(run.skipped.size(), 2u);
  EXPECT_EQ(run.skipped[0].strategy, "inductive_destination");
  SampleRunOptions abort;
  abort.on_empty_pool = EmptyPoolPolicy::Abort;
  EXPECT_THROW(sample_run({spec_of("inductive-destination", 2)}, split, cat, abort), EmptyPoolError);
  EXPECT_TRUE(sample_run({spec_of("inductive-destination", 2)}, split, cat).sets.empty());
}

TEST(SampleRun, CandidateFileRoundTrip) {
  SyntheticConfig cfg;
  cfg.n_events = 400;
  const History h = generate_synthetic(cfg);
  const auto split = chronological_split(h);
  const auto cat = EntityCatalog::build(split);
  const auto run = sample_run({spec_of("destination", 4), spec_of("historical-edge", 2)}, split, cat);
  const auto dir = fixtures::scratch("candidates");
  write_candidates(dir / "c.csv", run, h);
  const auto back = read_candidates(dir / "c.csv", h);
  ASSERT_EQ(back.size(), run.sets.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].positive, run.sets[i].positive);
    ASSERT_EQ(back[i].negatives.size(), 6u);
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_EQ(back[i].negatives[j].source, run.sets[i].negatives[j].source);
      EXPECT_EQ(back[i].negatives[j].destination, run.sets[i].negatives[j].destination);
      EXPECT_EQ(back[i].negatives[j].label, run.sets[i].negatives[j].label);
    }
  }
}

TEST(SampleRun, SameTimestampExclusion) {
  const History h = make_history({{"a", "b", 1}, {"a", "c", 1}, {"b", "c", 2}, {"a", "b", 3}, {"a", "c", 3}});
  const auto cat = EntityCatalog::build(manual_split(h, 3));
  SamplerSpec s = spec_of("destination", 200);
  s.exclude_same_timestamp_positives = true;
  const auto set = sample_negatives(s, cat, h, h[3]);
  for (const auto& n : set.negatives) EXPECT_NE(n.destination, id(h, "c"));
}

TEST(Sampler, ParseNames) {
  EXPECT_EQ(parse_sampler("historical-edge").strategy, Strategy::HistoricalEdge);
  EXPECT_EQ(parse_sampler("random-edge").strategy, Strategy::NeverObserved);
  EXPECT_EQ(parse_sampler("pair-oi").pair, PairCategory::OverlapInductive);
  EXPECT_EQ(label(parse_sampler("pair_hh")), "pair_historical_to_historical");
  EXPECT_THROW(parse_sampler("bogus"), ValidationError);
}

TEST(Sampler, SpecHashDependsOnSpecAndSplit) {
  SyntheticConfig cfg;
  const History h = generate_synthetic(cfg);
  const auto split = chronological_split(h);
  const auto a = sampler_spec_hash({spec_of("destination", 4)}, {}, split, {});
  EXPECT_EQ(a, sampler_spec_hash({spec_of("destination", 4)}, {}, split, {}));
  EXPECT_NE(a, sampler_spec_hash({spec_of("destination", 5)}, {}, split, {}));
  EXPECT_NE(a, sampler_spec_hash({spec_of("destination", 4, 1)}, {}, split, {}));
  EXPECT_EQ(a.size(), 64u);
}
