#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <tuple>

#include "dlpeval/error.hpp"
#include "dlpeval/layout.hpp"
#include "dlpeval/render.hpp"
#include "dlpeval/synthetic.hpp"
#include "fixtures.hpp"

using namespace dlpeval;
using fixtures::id;
using fixtures::make_history;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t data_lines(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n - 1;
}

}  // namespace

TEST(NodeLayout, RowsByFirstThenLastArrival) {
  const History h = make_history({{"a", "b", 1}, {"c", "a", 2}});
  const auto layout = node_layout(h);
  EXPECT_EQ(layout.row_of(id(h, "b")), 0u);
  EXPECT_EQ(layout.row_of(id(h, "a")), 1u);
  EXPECT_EQ(layout.row_of(id(h, "c")), 2u);
  EXPECT_EQ(layout.points.size(), 4u);
}

TEST(NodeLayout, SingleEvent) {
  const History h = make_history({{"a", "b", 1}});
  const auto layout = node_layout(h);
  ASSERT_EQ(layout.points.size(), 2u);
  EXPECT_EQ(layout.points[0].timestamp, 1.0);
  EXPECT_EQ(layout.points[1].timestamp, 1.0);
  EXPECT_NE(layout.points[0].row, layout.points[1].row);
  EXPECT_EQ(layout.axis.rows, 2u);
}

TEST(NodeLayout, IdRelabelingGivesSamePicture) {
  const History h = make_history({{"a", "b", 1}, {"c", "d", 2}, {"b", "c", 3}, {"a", "d", 4}});
  const History renamed = make_history({{"w", "x", 1}, {"y", "z", 2}, {"x", "y", 3}, {"w", "z", 4}});
  const auto p = node_layout(h).points, q = node_layout(renamed).points;
  ASSERT_EQ(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p[i].timestamp, q[i].timestamp);
    EXPECT_EQ(p[i].row, q[i].row);
  }
}

TEST(EdgeLayout, Example) {
  const History h = make_history({{"a", "b", 1}, {"a", "b", 3}, {"c", "d", 2}});
  const auto layout = edge_layout(h);
  EXPECT_EQ(layout.row_of(pair_key(id(h, "a"), id(h, "b"))), 0u);
  EXPECT_EQ(layout.row_of(pair_key(id(h, "c"), id(h, "d"))), 1u);
  std::vector<std::pair<double, std::size_t>> pts;
  for (const auto& p : layout.points) pts.emplace_back(p.timestamp, p.row);
  std::sort(pts.begin(), pts.end());
  const std::vector<std::pair<double, std::size_t>> expected{{1, 0}, {2, 1}, {3, 0}};
  EXPECT_EQ(pts, expected);
}

TEST(EdgeLayout, SingleEdgeAndIdTieBreak) {
  const History one = make_history({{"a", "b", 1}, {"a", "b", 2}});
  for (const auto& p : edge_layout(one).points) EXPECT_EQ(p.row, 0u);
  const History two = make_history({{"c", "d", 1}, {"a", "b", 1}, {"c", "d", 2}, {"a", "b", 2}});
  const auto layout = edge_layout(two);
  EXPECT_EQ(layout.row_of(pair_key(id(two, "c"), id(two, "d"))), 0u);
  EXPECT_EQ(layout.row_of(pair_key(id(two, "a"), id(two, "b"))), 1u);
}

TEST(Layout, RowOrderLawOnRandomHistories) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    HistoryBuilder b;
    for (int i = 0; i < 200; ++i) {
      b.add(std::to_string(gen() % 25), std::to_string(gen() % 25), static_cast<double>(gen() % 40));
    }
    const History h = std::move(b).build();
    std::map<std::uint64_t, std::pair<double, double>> node_span, edge_span;
    auto touch = [](auto& m, std::uint64_t k, double t) {
      auto [it, fresh] = m.try_emplace(k, t, t);
      if (!fresh) it->second.second = t;
    };
    for (const Event& e : h.events()) {
      touch(node_span, e.source, e.timestamp);
      touch(node_span, e.destination, e.timestamp);
      touch(edge_span, pair_key(e.source, e.destination), e.timestamp);
    }
    auto check = [](const PlotLayout& layout, const auto& spans) {
      for (const auto& [a, sa] : spans) {
        for (const auto& [b, sb] : spans) {
          const bool less = std::tie(sa.first, sa.second, a) < std::tie(sb.first, sb.second, b);
          ASSERT_EQ(layout.row_of(a) < layout.row_of(b), less);
        }
      }
    };
    check(node_layout(h), node_span);
    check(edge_layout(h), edge_span);
  }
}

TEST(Render, LosslessAndByteIdentical) {
  SyntheticConfig cfg;
  cfg.n_events = 600;
  const History h = generate_synthetic(cfg);
  const auto split = chronological_split(h);
  auto tna = node_layout(h);
  add_split_markers(tna, split);
  const auto dir = fixtures::scratch("render");
  const auto styles = StyleMap::defaults();
  const auto a = render(tna, styles, nullptr, {}, dir / "a.svg");
  const auto b = render(tna, styles, nullptr, {}, dir / "b.svg");
  EXPECT_EQ(a.points, 2 * h.size());
  EXPECT_EQ(data_lines(a.csv), 2 * h.size());
  EXPECT_EQ(slurp(a.svg), slurp(b.svg));
  const auto tea = render(edge_layout(h), styles, nullptr, {}, dir / "tea.svg");
  EXPECT_EQ(data_lines(tea.csv), h.size());
  EXPECT_NE(slurp(a.svg).find("<svg"), std::string::npos);
}

TEST(Render, DownsampleIsSeededAndOptIn) {
  SyntheticConfig cfg;
  const History h = generate_synthetic(cfg);
  const auto dir = fixtures::scratch("downsample");
  RenderOptions opts;
  opts.max_points = 100;
  const auto a = render(edge_layout(h), StyleMap::defaults(), nullptr, opts, dir / "a.svg");
  const auto b = render(edge_layout(h), StyleMap::defaults(), nullptr, opts, dir / "b.svg");
  EXPECT_EQ(a.points, 100u);
  EXPECT_EQ(slurp(a.csv), slurp(b.csv));
}

TEST(Render, RankOverlayThreshold) {
  const History h = make_history({{"a", "b", 1}, {"a", "c", 2}, {"b", "c", 3}, {"c", "a", 4}});
  const auto layout = edge_layout(h);
  const std::vector<RankRecord> ranks{{1, 150.0, 1000, "x"}, {2, 201.0, 1000, "x"}, {3, 999.0, 1000, "x"}};
  const auto overlay = rank_overlay(ranks);
  RenderOptions opts;
  opts.min_value = 200;
  opts.show_context = false;
  const auto pts = styled_points(layout, &overlay, opts);
  ASSERT_EQ(pts.size(), 2u);
  for (const auto& p : pts) EXPECT_GT(*p.value, 200.0);
  EXPECT_EQ(pts[0].style_key, "rank_201_500");
  const auto dir = fixtures::scratch("rank");
  EXPECT_EQ(render(layout, StyleMap::defaults(), &overlay, opts, dir / "r.svg").points, 2u);
}

TEST(Render, CompetingOverlayColorsByWinner) {
  const History h = make_history({{"a", "b", 1}, {"a", "c", 2}, {"b", "c", 3}});
  const auto layout = node_layout(h);
  const auto overlay = competing_overlay({{1, "historical_edge", {}}, {2, "positive", {}}});
  const auto pts = styled_points(layout, &overlay, {});
  ASSERT_EQ(pts.size(), 6u);
  std::map<std::string, int> keys;
  for (const auto& p : pts) ++keys[p.style_key];
  EXPECT_EQ(keys["context"], 2);
  EXPECT_EQ(keys["historical_edge"], 2);
  EXPECT_EQ(keys["positive"], 2);
  const auto plain = styled_points(layout, nullptr, {});
  for (const auto& p : plain) EXPECT_EQ(p.style_key, kActivityStyle);
}

TEST(Styles, JsonAndPaletteFill) {
  const auto styles = StyleMap::from_json(nlohmann::json::parse(R"({"styles": {"x": {"color": "#123456"}}})"));
  ASSERT_NE(styles.find("x"), nullptr);
  EXPECT_EQ(styles.find("x")->color, "#123456");
  const auto resolved = styles.resolved({"x", "y"});
  ASSERT_NE(resolved.find("y"), nullptr);
  EXPECT_THROW(StyleMap::from_json(nlohmann::json::parse(R"({"styles": {"x": {"color": "blue"}}})")), Error);
  EXPECT_NE(StyleMap::defaults().find("positive"), nullptr);
}

TEST(DegreeScatter, Examples) {
  const History h = make_history({{"a", "b", 1}, {"a", "b", 2}, {"c", "d", 3}, {"a", "b", 4}});
  SplitHistory s;
  s.history = &h;
  s.train_end = s.val_end = 2;
  s.t_train = 3;
  const auto cat = EntityCatalog::build(s);
  const auto single = degree_scatter({{2, 5.0, 10, "x"}}, h, cat, DegreeMode::Edge);
  ASSERT_EQ(single.points.size(), 1u);
  EXPECT_EQ(single.points[0].degree, 0.0);
  EXPECT_TRUE(single.trend.empty());
  const auto both = degree_scatter({{2, 5.0, 10, "x"}, {3, 1.0, 10, "x"}}, h, cat, DegreeMode::Edge);
  EXPECT_EQ(both.points[1].degree, 2.0);
  EXPECT_EQ(both.trend.size(), 2u);
  const auto dest = degree_scatter({{3, 1.0, 10, "x"}}, h, cat, DegreeMode::DestinationNode);
  EXPECT_EQ(dest.points[0].degree, 2.0);
}

TEST(DegreeScatter, MeanRankFallsWithDegree) {
  // Destination d_k receives k events before the probe; the probe's rank is
  // made worse for lower degree, so bin means must decrease.
  HistoryBuilder b;
  double t = 0;
  for (int k = 0; k <= 64; k += (k == 0 ? 1 : k)) {
    for (int i = 0; i < k; ++i) b.add("s" + std::to_string(i), "d" + std::to_string(k), ++t);
  }
  for (int k = 0; k <= 64; k += (k == 0 ? 1 : k)) b.add("probe", "d" + std::to_string(k), ++t);
  b.add("tail", "end", ++t);
  const History h = std::move(b).build();
  SplitHistory s;
  s.history = &h;
  s.val_end = s.train_end = h.size() - 8;
  s.t_train = h[s.val_end].timestamp;
  const auto cat = EntityCatalog::build(s);
  std::vector<RankRecord> ranks;
  for (Ordinal o = s.val_end; o + 1 < h.size(); ++o) {
    const auto deg = cat.temporal_degree(h[o].destination, h[o].timestamp);
    ranks.push_back({o, 100.0 / (1.0 + static_cast<double>(deg)), 100, "x"});
  }
  const auto scatter = degree_scatter(ranks, h, cat, DegreeMode::DestinationNode);
  ASSERT_GE(scatter.trend.size(), 5u);
  for (std::size_t i = 1; i < scatter.trend.size(); ++i) {
    EXPECT_LT(scatter.trend[i].mean_rank, scatter.trend[i - 1].mean_rank);
  }
  const auto dir = fixtures::scratch("scatter");
  const auto out = render_degree_scatter(scatter, {}, dir / "d.svg");
  EXPECT_EQ(data_lines(out.csv), ranks.size());
}
