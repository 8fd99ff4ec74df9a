#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dlpeval/layout.hpp"
#include "dlpeval/metrics.hpp"
#include "dlpeval/taxonomy.hpp"

namespace dlpeval {

struct Style {
  std::string color;
  double size = 1.5;
};

/// Style key -> color and marker size.
///
/// Keys missing at render time are filled from the categorical palette in
/// sorted-key order, so the resolved map always covers the point cloud.
class StyleMap {
 public:
  /// Pinned palette for activity, candidate labels and rank buckets.
  static StyleMap defaults();
  /// {"styles": {"key": {"color": "#rrggbb", "size": 1.5}}, "default_size": 1.5}
  static StyleMap from_json(const nlohmann::json& j);
  static StyleMap load(const std::filesystem::path& path);

  void set(const std::string& key, Style style) { entries_[key] = std::move(style); }
  const Style* find(const std::string& key) const;
  double default_size() const { return default_size_; }

  /// Copy extended with palette entries for every key in `keys`.
  StyleMap resolved(const std::vector<std::string>& keys) const;
  const std::map<std::string, Style>& entries() const { return entries_; }

 private:
  std::map<std::string, Style> entries_;
  double default_size_ = 1.5;
};

struct OverlayEntry {
  std::string label;
  std::optional<double> value;
};

/// Per-event restyling keyed by positive ordinal.
using Overlay = std::map<Ordinal, OverlayEntry>;

inline const std::string kContextStyle = "context";

/// Winner labels of the competing-events view.
Overlay competing_overlay(const std::vector<CompetingLabel>& labels);
/// Rank buckets as style keys, with the rank as value.
Overlay rank_overlay(const std::vector<RankRecord>& ranks);
std::string rank_bucket(double rank);

struct RenderOptions {
  std::string title;
  /// Keep only overlaid points whose value exceeds this.
  std::optional<double> min_value;
  /// Draw events without an overlay entry in the context style.
  bool show_context = true;
  /// Uniformly subsample down to this many points (off when unset).
  std::optional<std::size_t> max_points;
  std::uint64_t downsample_seed = 0;
  int width = 1000;
  int height = 600;
};

struct RenderResult {
  std::filesystem::path svg;
  std::filesystem::path csv;
  std::size_t points = 0;
};

/// Applies the overlay and filters, then writes the SVG and a companion CSV
/// (`timestamp,row,style_key[,value]`) next to it.
RenderResult render(const PlotLayout& layout, const StyleMap& styles, const Overlay* overlay,
                    const RenderOptions& options, const std::filesystem::path& svg_path);

/// The styled point list render() would draw, before downsampling.
std::vector<PlotPoint> styled_points(const PlotLayout& layout, const Overlay* overlay, const RenderOptions& options);

enum class DegreeMode { DestinationNode, Edge };

DegreeMode parse_degree_mode(const std::string& text);

struct ScatterPoint {
  Ordinal ordinal = 0;
  double degree = 0.0;
  double rank = 1.0;
};

struct TrendBin {
  double degree_lo = 0.0;  // inclusive
  double degree_hi = 0.0;  // exclusive
  double mean_rank = 0.0;
  std::size_t count = 0;
};

struct DegreeScatter {
  DegreeMode mode = DegreeMode::DestinationNode;
  std::vector<ScatterPoint> points;
  std::vector<TrendBin> trend;  // empty for fewer than two points
};

/// Rank of each positive against the degree of its destination (or of its
/// edge) at prediction time. Trend bins are [0,1), [1,2), [2,4), [4,8), ...
DegreeScatter degree_scatter(const std::vector<RankRecord>& ranks, const History& history,
                             const EntityCatalog& catalog, DegreeMode mode);

struct ScatterOptions {
  std::string title;
  bool log_x = true;
  int width = 800;
  int height = 500;
};

/// Writes the scatter SVG and a `positive_ordinal,degree,rank` CSV next to it.
RenderResult render_degree_scatter(const DegreeScatter& scatter, const ScatterOptions& options,
                                   const std::filesystem::path& svg_path);

}  // namespace dlpeval
