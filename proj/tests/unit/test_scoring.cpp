#include <gtest/gtest.h>

#include <random>

#include "dlpeval/error.hpp"
#include "dlpeval/scoring.hpp"
#include "dlpeval/synthetic.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace dlpeval;
using fixtures::id;
using fixtures::make_history;

TEST(EdgeBank, RemembersDirectedPairs) {
  ScorerState s;
  EXPECT_EQ(s.score_edgebank(0, 1, 5), 0.0);
  s.advance({0, 1, 1.0, 0});
  EXPECT_EQ(s.score_edgebank(0, 1, 5), 1.0);
  EXPECT_EQ(s.score_edgebank(1, 0, 5), 0.0);
  EXPECT_EQ(s.seen_pairs(), 1u);
  EXPECT_EQ(s.degree(0), 1u);
  EXPECT_EQ(s.degree(1), 1u);
}

TEST(EdgeBank, WindowAndSymmetrize) {
  EdgeBankOptions opts;
  opts.window = 2.0;
  opts.symmetrize = true;
  ScorerState s(opts);
  s.advance({0, 1, 1.0, 0});
  EXPECT_EQ(s.score_edgebank(1, 0, 3.0), 1.0);
  EXPECT_EQ(s.score_edgebank(0, 1, 3.5), 0.0);
}

TEST(PreferentialAttachment, ProductOfDegrees) {
  ScorerState s;
  // deg_a = 2, deg_b = 3
  s.advance({0, 1, 1, 0});
  s.advance({0, 2, 2, 1});
  EXPECT_EQ(s.score_pa(0, 1, 3), 2u);
  s.advance({1, 2, 3, 2});
  s.advance({3, 1, 4, 3});
  EXPECT_EQ(s.score_pa(0, 1, 5), 6u);
  EXPECT_EQ(s.score_pa(0, 9, 5), 0u);
}

TEST(ScorerState, RepeatedPairAndStaleOrdinal) {
  ScorerState s;
  s.advance({0, 1, 1, 0});
  s.advance({0, 1, 2, 1});
  EXPECT_EQ(s.seen_pairs(), 1u);
  EXPECT_EQ(s.degree(0), 2u);
  EXPECT_EQ(s.degree(1), 2u);
  EXPECT_THROW(s.advance({0, 1, 3, 1}), OrderError);
  EXPECT_THROW(s.advance({0, 1, 1.5, 5}), OrderError);
  EXPECT_THROW(s.score_edgebank(0, 1, 2), OrderError);
}

namespace {

SplitHistory manual_split(const History& h, std::size_t train) {
  SplitHistory s;
  s.history = &h;
  s.train_end = s.val_end = train;
  s.t_train = h[train].timestamp;
  return s;
}

}  // namespace

TEST(ScoreCandidates, SeenPairScoresOne) {
  const History h = make_history({{"a", "b", 1}, {"c", "d", 2}, {"a", "b", 3}});
  const auto split = manual_split(h, 2);
  const std::vector<CandidateSet> sets{{h[2], {{id(h, "c"), id(h, "a"), "x"}}}};
  const auto scored = score_candidates({}, split, sets);
  EXPECT_EQ(scored[0].positive_score, 1.0);
  EXPECT_EQ(scored[0].negative_scores[0], 0.0);
}

TEST(ScoreCandidates, SameTimestampPositivesDoNotSeeEachOther) {
  const History h = make_history({{"x", "y", 1}, {"a", "b", 2}, {"a", "b", 2}});
  const auto split = manual_split(h, 1);
  const std::vector<CandidateSet> sets{{h[1], {}}, {h[2], {}}};
  const auto scored = score_candidates({}, split, sets);
  EXPECT_EQ(scored[0].positive_score, 0.0);
  EXPECT_EQ(scored[1].positive_score, 0.0);
  ScorerChoice pa;
  pa.kind = ScorerKind::PreferentialAttachment;
  EXPECT_EQ(score_candidates(pa, split, sets)[1].positive_score, 0.0);
}

TEST(ScoreCandidates, ExternalTableMissingSlot) {
  const History h = make_history({{"a", "b", 1}, {"c", "d", 2}, {"a", "b", 3}});
  const auto split = manual_split(h, 2);
  const std::vector<CandidateSet> sets{{h[2], {{0, 2, "x"}, {0, 3, "x"}}}};
  ExternalScoreTable t("m", "");
  t.set(2, 0, 0.9);
  t.set(2, 1, 0.1);
  ScorerChoice c;
  c.kind = ScorerKind::External;
  c.external = &t;
  try {
    score_candidates(c, split, sets);
    FAIL();
  } catch (const MissingScoreError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("positive_ordinal=2"), std::string::npos);
    EXPECT_NE(what.find("slot=2"), std::string::npos);
  }
  t.set(2, 2, 0.3);
  c.expected_spec_hash = "abc";
  EXPECT_THROW(score_candidates(c, split, sets), DataError);
  c.expected_spec_hash.clear();
  EXPECT_EQ(score_candidates(c, split, sets)[0].negative_scores[1], 0.3);
}

TEST(ScoreCandidates, RejectsForeignOrUnorderedPositives) {
  const History h = make_history({{"a", "b", 1}, {"c", "d", 2}, {"a", "b", 3}, {"c", "d", 4}});
  const auto split = manual_split(h, 2);
  EXPECT_THROW(score_candidates({}, split, {{h[3], {}}, {h[2], {}}}), DataError);
  Event fake = h[2];
  fake.destination = id(h, "c");
  EXPECT_THROW(score_candidates({}, split, {{fake, {}}}), DataError);
}

TEST(ScoreTable, FileRoundTrip) {
  ExternalScoreTable t("tgn", "deadbeef");
  t.set(5, 0, 0.25);
  t.set(5, 1, 1e-17);
  const auto dir = fixtures::scratch("scores");
  t.write(dir / "s.csv");
  const auto back = ExternalScoreTable::read(dir / "s.csv");
  EXPECT_EQ(back.model(), "tgn");
  EXPECT_EQ(back.spec_hash(), "deadbeef");
  EXPECT_EQ(back.at(5, 1), 1e-17);
}

// Streaming scores equal a from-scratch rebuild over the strict past, and the
// EdgeBank error structure follows from it.
TEST(ScoreCandidates, ReplayEquivalenceAndErrorStructure) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 10; ++trial) {
    SyntheticConfig cfg;
    cfg.n_nodes = 8 + gen() % 20;
    cfg.n_events = 100 + gen() % 300;
    cfg.seed = gen();
    cfg.events_per_timestamp = 1 + gen() % 3;
    const History h = generate_synthetic(cfg);
    const auto split = chronological_split(h);
    std::vector<CandidateSet> sets;
    for (const Event& e : h.events()) {
      CandidateSet s{e, {}};
      for (int i = 0; i < 5; ++i) {
        s.negatives.push_back({static_cast<NodeId>(gen() % h.node_count()),
                               static_cast<NodeId>(gen() % h.node_count()), "r"});
      }
      sets.push_back(s);
    }
    ScorerChoice eb, pa;
    pa.kind = ScorerKind::PreferentialAttachment;
    const auto eb_scored = score_candidates(eb, split, sets);
    const auto pa_scored = score_candidates(pa, split, sets);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const Event& p = sets[i].positive;
      ASSERT_EQ(eb_scored[i].positive_score, oracle::edgebank_replay(h, p.source, p.destination, p.timestamp));
      ASSERT_EQ(pa_scored[i].positive_score,
                static_cast<double>(oracle::pa_replay(h, p.source, p.destination, p.timestamp)));
      for (std::size_t j = 0; j < sets[i].negatives.size(); ++j) {
        const auto& n = sets[i].negatives[j];
        const double expect = oracle::edgebank_replay(h, n.source, n.destination, p.timestamp);
        ASSERT_EQ(eb_scored[i].negative_scores[j], expect);
        ASSERT_EQ(pa_scored[i].negative_scores[j],
                  static_cast<double>(oracle::pa_replay(h, n.source, n.destination, p.timestamp)));
        bool in_past = false;
        for (const Event& e : prefix_view(h, p.timestamp)) in_past |= e.source == n.source && e.destination == n.destination;
        EXPECT_EQ(eb_scored[i].negative_scores[j] == 1.0, in_past);
      }
    }
  }
}

TEST(Oracle, ReplayBasics) {
  const History h = make_history({{"a", "b", 1}, {"a", "c", 2}});
  EXPECT_EQ(oracle::edgebank_replay(h, 0, 1, 0.5), 0.0);
  EXPECT_EQ(oracle::pa_replay(h, 0, 1, 0.5), 0u);
  EXPECT_EQ(oracle::edgebank_replay(h, 0, 1, 1.5), 1.0);
  EXPECT_EQ(oracle::pa_replay(h, id(h, "a"), id(h, "b"), 3), 2u);
}

TEST(PreferentialAttachment, InvariantToUninvolvedNodes) {
  const History h = make_history({{"a", "b", 1}, {"c", "d", 2}, {"e", "f", 3}, {"a", "x", 4}, {"a", "b", 5}});
  const History shuffled = make_history({{"a", "b", 1}, {"e", "f", 2}, {"c", "d", 3}, {"a", "x", 4}, {"a", "b", 5}});
  ScorerChoice pa;
  pa.kind = ScorerKind::PreferentialAttachment;
  const auto s1 = score_candidates(pa, manual_split(h, 4), {{h[4], {}}});
  const auto s2 = score_candidates(pa, manual_split(shuffled, 4), {{shuffled[4], {}}});
  EXPECT_EQ(s1[0].positive_score, 2.0);
  EXPECT_EQ(s1[0].positive_score, s2[0].positive_score);
}
