#include "dlpeval/render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dlpeval/error.hpp"
#include "dlpeval/io.hpp"
#include "dlpeval/rng.hpp"

namespace dlpeval {

namespace {

constexpr const char* kCategorical[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                        "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Linear map of a closed data interval onto pixels; degenerate intervals map to the middle.
struct Scale {
  double lo, hi, px_lo, px_hi;
  double operator()(double v) const {
    if (hi <= lo) return 0.5 * (px_lo + px_hi);
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

struct Frame {
  int width, height;
  double left = 70, right = 190, top = 40, bottom = 50;
  double plot_left() const { return left; }
  double plot_right() const { return width - right; }
  double plot_top() const { return top; }
  double plot_bottom() const { return height - bottom; }
};

void open_svg(std::ostream& out, const Frame& f, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
      << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    out << "<text x=\"" << fixed(f.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(title) << "</text>\n";
  }
}

void draw_axes(std::ostream& out, const Frame& f, const Scale& x, const std::string& x_label,
               const std::string& y_label, const std::vector<std::pair<double, std::string>>& x_ticks) {
  out << "<g stroke=\"#333333\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fixed(f.plot_left()) << "\" y1=\"" << fixed(f.plot_bottom()) << "\" x2=\""
      << fixed(f.plot_right()) << "\" y2=\"" << fixed(f.plot_bottom()) << "\"/>\n"
      << "<line x1=\"" << fixed(f.plot_left()) << "\" y1=\"" << fixed(f.plot_top()) << "\" x2=\"" << fixed(f.plot_left())
      << "\" y2=\"" << fixed(f.plot_bottom()) << "\"/>\n";
  for (const auto& [v, _] : x_ticks) {
    out << "<line x1=\"" << fixed(x(v)) << "\" y1=\"" << fixed(f.plot_bottom()) << "\" x2=\"" << fixed(x(v))
        << "\" y2=\"" << fixed(f.plot_bottom() + 4) << "\"/>\n";
  }
  out << "</g>\n";
  for (const auto& [v, text] : x_ticks) {
    out << "<text x=\"" << fixed(x(v)) << "\" y=\"" << fixed(f.plot_bottom() + 16)
        << "\" text-anchor=\"middle\">" << escape(text) << "</text>\n";
  }
  out << "<text x=\"" << fixed((f.plot_left() + f.plot_right()) / 2) << "\" y=\"" << fixed(f.height - 12.0)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  const double cy = (f.plot_top() + f.plot_bottom()) / 2;
  out << "<text x=\"18\" y=\"" << fixed(cy) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fixed(cy)
      << ")\">" << escape(y_label) << "</text>\n";
}

std::vector<std::pair<double, std::string>> linear_ticks(double lo, double hi, int count = 5) {
  std::vector<std::pair<double, std::string>> ticks;
  if (hi <= lo) {
    ticks.emplace_back(lo, tick_label(lo));
    return ticks;
  }
  for (int i = 0; i <= count; ++i) {
    const double v = lo + (hi - lo) * i / count;
    ticks.emplace_back(v, tick_label(v));
  }
  return ticks;
}

void draw_legend(std::ostream& out, const Frame& f, const StyleMap& styles, const std::vector<std::string>& keys) {
  double y = f.plot_top() + 8;
  const double x = f.plot_right() + 18;
  for (const auto& key : keys) {
    const Style* s = styles.find(key);
    out << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(y) << "\" r=\"4.00\" fill=\"" << s->color << "\"/>\n"
        << "<text x=\"" << fixed(x + 10) << "\" y=\"" << fixed(y + 4) << "\">" << escape(key) << "</text>\n";
    y += 16;
  }
}

std::vector<std::size_t> downsample(std::size_t n, std::size_t cap, std::uint64_t seed) {
  // Selection sampling keeps the original order.
  std::vector<std::size_t> keep;
  keep.reserve(cap);
  Rng rng(seed);
  std::size_t needed = cap;
  for (std::size_t i = 0; i < n && needed > 0; ++i) {
    if (rng.below(n - i) < needed) {
      keep.push_back(i);
      --needed;
    }
  }
  return keep;
}

std::filesystem::path companion_csv(const std::filesystem::path& svg_path) {
  auto p = svg_path;
  p.replace_extension(".csv");
  return p;
}

// Drawing order: background styles first, then the rest alphabetically.
std::vector<std::string> ordered_keys(std::set<std::string> keys) {
  std::vector<std::string> out;
  for (const auto* first : {&kContextStyle, &kActivityStyle}) {
    if (keys.erase(*first)) out.push_back(*first);
  }
  out.insert(out.end(), keys.begin(), keys.end());
  return out;
}

}  // namespace

StyleMap StyleMap::defaults() {
  StyleMap m;
  m.set(kActivityStyle, {"#4e79a7", 1.5});
  m.set(kContextStyle, {"#d9d9d9", 1.2});
  m.set(kPositiveLabel, {"#59a14f", 2.0});
  m.set("destination", {"#76b7b2", 2.0});
  m.set("historical_destination", {"#b07aa1", 2.0});
  m.set("inductive_destination", {"#4e79a7", 2.0});
  m.set("overlap_destination", {"#edc948", 2.0});
  m.set("never_observed", {"#9c755f", 2.0});
  m.set("historical_edge", {"#e15759", 2.0});
  m.set("inductive_edge", {"#f28e2b", 2.0});
  m.set("overlap_edge", {"#ff9da7", 2.0});
  // Sequential (viridis stops) for rank buckets.
  m.set("rank_1", {"#fde725", 2.0});
  m.set("rank_2_10", {"#90d743", 2.0});
  m.set("rank_11_100", {"#35b779", 2.0});
  m.set("rank_101_200", {"#21918c", 2.0});
  m.set("rank_201_500", {"#31688e", 2.0});
  m.set("rank_501_1000", {"#443983", 2.0});
  m.set("rank_gt_1000", {"#440154", 2.0});
  return m;
}

namespace {

bool is_hex_color(const std::string& c) {
  if (c.size() != 4 && c.size() != 7) return false;
  if (c[0] != '#') return false;
  return std::all_of(c.begin() + 1, c.end(), [](char ch) { return std::isxdigit(static_cast<unsigned char>(ch)) != 0; });
}

}  // namespace

StyleMap StyleMap::from_json(const nlohmann::json& j) {
  StyleMap m = defaults();
  try {
    m.default_size_ = j.value("default_size", m.default_size_);
    if (j.contains("styles")) {
      for (const auto& [key, value] : j.at("styles").items()) {
        Style s;
        if (const Style* base = m.find(key)) s = *base;
        s.color = value.value("color", s.color.empty() ? std::string(kCategorical[0]) : s.color);
        s.size = value.value("size", m.default_size_);
        if (!is_hex_color(s.color)) {
          throw ValidationError("style '" + key + "': color must be #rgb or #rrggbb, got '" + s.color + "'");
        }
        if (!(s.size > 0.0)) throw ValidationError("style '" + key + "': size must be positive");
        m.set(key, s);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed style configuration: ") + e.what());
  }
  return m;
}

StyleMap StyleMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open style file " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("style file " + path.string() + " is not valid JSON: " + e.what());
  }
}

const Style* StyleMap::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

StyleMap StyleMap::resolved(const std::vector<std::string>& keys) const {
  StyleMap m = *this;
  std::set<std::string> missing;
  for (const auto& k : keys) {
    if (!find(k)) missing.insert(k);
  }
  std::size_t i = 0;
  for (const auto& k : missing) m.set(k, {kCategorical[i++ % std::size(kCategorical)], default_size_});
  return m;
}

Overlay competing_overlay(const std::vector<CompetingLabel>& labels) {
  Overlay o;
  for (const auto& l : labels) o[l.positive_ordinal] = {l.label, std::nullopt};
  return o;
}

std::string rank_bucket(double rank) {
  if (rank <= 1.0) return "rank_1";
  if (rank <= 10.0) return "rank_2_10";
  if (rank <= 100.0) return "rank_11_100";
  if (rank <= 200.0) return "rank_101_200";
  if (rank <= 500.0) return "rank_201_500";
  if (rank <= 1000.0) return "rank_501_1000";
  return "rank_gt_1000";
}

Overlay rank_overlay(const std::vector<RankRecord>& ranks) {
  Overlay o;
  for (const auto& r : ranks) o[r.positive_ordinal] = {rank_bucket(r.rank), r.rank};
  return o;
}

std::vector<PlotPoint> styled_points(const PlotLayout& layout, const Overlay* overlay, const RenderOptions& options) {
  if (overlay == nullptr || overlay->empty()) {
    return layout.points;
  }
  if (!layout.points.empty()) {
    Ordinal max_ordinal = 0;
    for (const auto& p : layout.points) max_ordinal = std::max(max_ordinal, p.ordinal);
    if (overlay->rbegin()->first > max_ordinal) {
      throw DataError("overlay key " + std::to_string(overlay->rbegin()->first) + " does not resolve to a plotted event");
    }
  }
  std::vector<PlotPoint> out;
  out.reserve(layout.points.size());
  for (const auto& p : layout.points) {
    auto it = overlay->find(p.ordinal);
    if (it == overlay->end()) {
      if (options.show_context) out.push_back({p.timestamp, p.row, p.ordinal, kContextStyle, std::nullopt});
      continue;
    }
    const auto& entry = it->second;
    if (options.min_value && (!entry.value || *entry.value <= *options.min_value)) continue;
    out.push_back({p.timestamp, p.row, p.ordinal, entry.label, entry.value});
  }
  return out;
}

RenderResult render(const PlotLayout& layout, const StyleMap& styles, const Overlay* overlay,
                    const RenderOptions& options, const std::filesystem::path& svg_path) {
  auto points = styled_points(layout, overlay, options);
  if (options.max_points && points.size() > *options.max_points) {
    std::vector<PlotPoint> kept;
    for (std::size_t i : downsample(points.size(), *options.max_points, options.downsample_seed)) {
      kept.push_back(std::move(points[i]));
    }
    points = std::move(kept);
  }

  std::set<std::string> key_set;
  bool has_values = false;
  for (const auto& p : points) {
    key_set.insert(p.style_key);
    has_values = has_values || p.value.has_value();
  }
  const auto keys = ordered_keys(key_set);
  const StyleMap resolved = styles.resolved(keys);

  const Frame frame{options.width, options.height};
  const Scale x{layout.axis.t_min, layout.axis.t_max, frame.plot_left() + 5, frame.plot_right() - 5};
  const double rows = static_cast<double>(std::max<std::size_t>(layout.axis.rows, 1));
  auto y = [&](std::size_t row) {
    return frame.plot_bottom() - (static_cast<double>(row) + 0.5) / rows * (frame.plot_bottom() - frame.plot_top());
  };

  ensure_parent_directory(svg_path);
  std::ofstream svg(svg_path, std::ios::binary);
  if (!svg) throw DataError("cannot write " + svg_path.string());
  open_svg(svg, frame, options.title);
  if (options.max_points && layout.points.size() > *options.max_points) {
    svg << "<!-- downsampled to " << *options.max_points << " points, seed " << options.downsample_seed << " -->\n";
  }
  draw_axes(svg, frame, x, "time", layout.kind == EntityKind::Node ? "node (arrival rank)" : "edge (arrival rank)",
            linear_ticks(layout.axis.t_min, layout.axis.t_max));

  for (const auto& key : keys) {
    const Style* s = resolved.find(key);
    svg << "<g fill=\"" << s->color << "\" data-style=\"" << escape(key) << "\">\n";
    const std::string r = fixed(s->size);
    for (const auto& p : points) {
      if (p.style_key != key) continue;
      svg << "<circle cx=\"" << fixed(x(p.timestamp)) << "\" cy=\"" << fixed(y(p.row)) << "\" r=\"" << r << "\"/>\n";
    }
    svg << "</g>\n";
  }
  for (const auto& m : layout.axis.markers) {
    svg << "<line x1=\"" << fixed(x(m.timestamp)) << "\" y1=\"" << fixed(frame.plot_top()) << "\" x2=\""
        << fixed(x(m.timestamp)) << "\" y2=\"" << fixed(frame.plot_bottom())
        << "\" stroke=\"#000000\" stroke-dasharray=\"4 3\"/>\n"
        << "<text x=\"" << fixed(x(m.timestamp) + 3) << "\" y=\"" << fixed(frame.plot_top() + 10) << "\">"
        << escape(m.label) << "</text>\n";
  }
  draw_legend(svg, frame, resolved, keys);
  svg << "</svg>\n";

  RenderResult result{svg_path, companion_csv(svg_path), points.size()};
  std::ofstream csv_out(result.csv, std::ios::binary);
  if (!csv_out) throw DataError("cannot write " + result.csv.string());
  csv_out << "timestamp,row,style_key" << (has_values ? ",value" : "") << '\n';
  for (const auto& p : points) {
    csv_out << csv::format_number(p.timestamp) << ',' << p.row << ',' << p.style_key;
    if (has_values) csv_out << ',' << (p.value ? csv::format_number(*p.value) : "");
    csv_out << '\n';
  }
  return result;
}

DegreeMode parse_degree_mode(const std::string& text) {
  if (text == "destination" || text == "node" || text == "destination-node") return DegreeMode::DestinationNode;
  if (text == "edge") return DegreeMode::Edge;
  throw ValidationError("unknown degree mode '" + text + "' (expected destination or edge)");
}

DegreeScatter degree_scatter(const std::vector<RankRecord>& ranks, const History& history,
                             const EntityCatalog& catalog, DegreeMode mode) {
  DegreeScatter out;
  out.mode = mode;
  out.points.reserve(ranks.size());
  for (const auto& r : ranks) {
    if (r.positive_ordinal >= history.size()) {
      throw DataError("rank record for ordinal " + std::to_string(r.positive_ordinal) + " has no matching event");
    }
    const Event& e = history[r.positive_ordinal];
    const std::size_t degree = mode == DegreeMode::DestinationNode
                                   ? catalog.temporal_degree(e.destination, e.timestamp)
                                   : catalog.edge_degree(e.source, e.destination, e.timestamp);
    out.points.push_back({r.positive_ordinal, static_cast<double>(degree), r.rank});
  }
  if (out.points.size() < 2) return out;

  std::map<int, std::pair<double, std::size_t>> bins;
  for (const auto& p : out.points) {
    const int bin = p.degree < 1.0 ? 0 : static_cast<int>(std::floor(std::log2(p.degree))) + 1;
    auto& [sum, count] = bins[bin];
    sum += p.rank;
    ++count;
  }
  for (const auto& [bin, acc] : bins) {
    const double lo = bin == 0 ? 0.0 : std::ldexp(1.0, bin - 1);
    const double hi = bin == 0 ? 1.0 : std::ldexp(1.0, bin);
    out.trend.push_back({lo, hi, acc.first / static_cast<double>(acc.second), acc.second});
  }
  return out;
}

RenderResult render_degree_scatter(const DegreeScatter& scatter, const ScatterOptions& options,
                                   const std::filesystem::path& svg_path) {
  auto tx = [&](double d) { return options.log_x ? std::log10(1.0 + d) : d; };
  double x_max = 0.0, y_max = 1.0;
  for (const auto& p : scatter.points) {
    x_max = std::max(x_max, tx(p.degree));
    y_max = std::max(y_max, p.rank);
  }
  Frame frame{options.width, options.height};
  frame.right = 40;
  const Scale x{0.0, x_max, frame.plot_left() + 5, frame.plot_right() - 5};
  const Scale y{1.0, y_max, frame.plot_bottom() - 5, frame.plot_top() + 5};

  std::vector<std::pair<double, std::string>> ticks;
  if (options.log_x) {
    for (double d = 0; tx(d) <= x_max + 1e-12; d = d == 0 ? 1 : d * 10) ticks.emplace_back(tx(d), tick_label(d));
  } else {
    ticks = linear_ticks(0.0, x_max);
  }

  ensure_parent_directory(svg_path);
  std::ofstream svg(svg_path, std::ios::binary);
  if (!svg) throw DataError("cannot write " + svg_path.string());
  open_svg(svg, frame, options.title);
  const std::string x_label = std::string(scatter.mode == DegreeMode::DestinationNode ? "destination node degree"
                                                                                       : "edge degree") +
                              (options.log_x ? " (log scale, 1+degree)" : "");
  draw_axes(svg, frame, x, x_label, "prediction rank", ticks);
  svg << "<text x=\"" << fixed(frame.plot_left() - 6) << "\" y=\"" << fixed(y(1.0) + 4)
      << "\" text-anchor=\"end\">1</text>\n"
      << "<text x=\"" << fixed(frame.plot_left() - 6) << "\" y=\"" << fixed(y(y_max) + 4) << "\" text-anchor=\"end\">"
      << tick_label(y_max) << "</text>\n";
  svg << "<g fill=\"#4e79a7\" fill-opacity=\"0.5\">\n";
  for (const auto& p : scatter.points) {
    svg << "<circle cx=\"" << fixed(x(tx(p.degree))) << "\" cy=\"" << fixed(y(p.rank)) << "\" r=\"2.00\"/>\n";
  }
  svg << "</g>\n";
  if (!scatter.trend.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#e15759\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < scatter.trend.size(); ++i) {
      const auto& b = scatter.trend[i];
      const double mid = b.degree_lo == 0.0 ? 0.0 : std::sqrt(b.degree_lo * b.degree_hi);
      svg << (i ? " " : "") << fixed(x(tx(mid))) << ',' << fixed(y(b.mean_rank));
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";

  RenderResult result{svg_path, companion_csv(svg_path), scatter.points.size()};
  std::ofstream csv_out(result.csv, std::ios::binary);
  if (!csv_out) throw DataError("cannot write " + result.csv.string());
  csv_out << "positive_ordinal,degree,rank\n";
  for (const auto& p : scatter.points) {
    csv_out << p.ordinal << ',' << csv::format_number(p.degree) << ',' << csv::format_number(p.rank) << '\n';
  }
  return result;
}

}  // namespace dlpeval
