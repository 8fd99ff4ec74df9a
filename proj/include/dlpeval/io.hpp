#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dlpeval/events.hpp"

namespace dlpeval {

struct IngestOptions {
  /// Keep columns past the third as opaque per-event strings.
  bool keep_attributes = true;
  /// Append the reversed copy (v,u,t) of every non-loop event, for undirected logs.
  bool symmetrize = false;
  char delimiter = ',';
};

/// Reads `source,destination,timestamp[,attr...]` with a header line.
History load_events(const std::filesystem::path& path, const IngestOptions& options = {});
History read_events(std::istream& in, const std::string& name, const IngestOptions& options = {});

/// Writes the stream back in the ingestion format using raw ids.
void write_events(std::ostream& out, const History& history);
void write_events(const std::filesystem::path& path, const History& history);

/// Per dense node id; empty string when the node has no label.
using NodeAttributes = std::vector<std::string>;

/// Reads `node_id,label`. Rows naming nodes absent from the history are ignored.
NodeAttributes load_node_attributes(const std::filesystem::path& path, const History& history);

namespace csv {

std::vector<std::string_view> split(std::string_view line, char delimiter = ',');
std::string_view trim(std::string_view s);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

double parse_double(std::string_view field, const std::string& where, std::size_t line);
std::uint64_t parse_uint(std::string_view field, const std::string& where, std::size_t line);

/// Reads all lines of a CSV, checking the header columns match `expected`.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};
Table read_table(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

}  // namespace csv

void ensure_parent_directory(const std::filesystem::path& path);

}  // namespace dlpeval
