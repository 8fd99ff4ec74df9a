#pragma once

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include "dlpeval/events.hpp"

namespace fixtures {

using Row = std::tuple<std::string, std::string, double>;

inline dlpeval::History make_history(const std::vector<Row>& rows) {
  dlpeval::HistoryBuilder b;
  for (const auto& [u, v, t] : rows) b.add(u, v, t);
  return std::move(b).build();
}

inline dlpeval::NodeId id(const dlpeval::History& h, const std::string& raw) { return h.find_node(raw).value(); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dlpeval_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
