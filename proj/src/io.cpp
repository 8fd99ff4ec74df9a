#include "dlpeval/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "dlpeval/error.hpp"

namespace dlpeval {

namespace csv {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error(ErrorKind::Internal, "number formatting failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view field, const std::string& where, std::size_t line) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw ParseError(where, line, "not a finite number: '" + std::string(field) + "'");
  }
  return value;
}

std::uint64_t parse_uint(std::string_view field, const std::string& where, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(where, line, "not a non-negative integer: '" + std::string(field) + "'");
  }
  return value;
}

Table read_table(const std::filesystem::path& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      for (auto f : fields) table.header.emplace_back(f);
      if (table.header.size() < expected_header.size() ||
          !std::equal(expected_header.begin(), expected_header.end(), table.header.begin())) {
        std::string want;
        for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
        throw ParseError(path.string(), line_no, "expected header '" + want + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(table.header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    std::vector<std::string> row;
    row.reserve(fields.size());
    for (auto f : fields) row.emplace_back(f);
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw DataError(path.string() + ": empty file");
  return table;
}

}  // namespace csv

History read_events(std::istream& in, const std::string& name, const IngestOptions& options) {
  HistoryBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line, options.delimiter);
    if (!have_header) {
      if (fields.size() < 3) {
        throw ParseError(name, line_no, "header needs at least source,destination,timestamp");
      }
      columns = fields.size();
      if (options.keep_attributes) {
        std::vector<std::string> names;
        for (std::size_t i = 3; i < fields.size(); ++i) names.emplace_back(fields[i]);
        builder.set_attribute_names(std::move(names));
      }
      have_header = true;
      continue;
    }
    if (fields.size() < 3) {
      throw ParseError(name, line_no, "expected source,destination,timestamp");
    }
    if (fields.size() != columns) {
      throw ParseError(name, line_no,
                       "expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(name, line_no, "empty node id");
    const double t = csv::parse_double(fields[2], name, line_no);
    if (t < 0.0) throw ParseError(name, line_no, "negative timestamp " + std::string(fields[2]));

    std::vector<std::string> attrs;
    if (options.keep_attributes) {
      for (std::size_t i = 3; i < fields.size(); ++i) attrs.emplace_back(fields[i]);
    }
    const std::string u(fields[0]);
    const std::string v(fields[1]);
    if (options.symmetrize && u != v) {
      builder.add(u, v, t, attrs);
      builder.add(v, u, t, std::move(attrs));
    } else {
      builder.add(u, v, t, std::move(attrs));
    }
  }
  if (builder.size() == 0) throw DataError(name + ": empty file (no events)");
  return std::move(builder).build();
}

History load_events(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open event file " + path.string());
  return read_events(in, path.string(), options);
}

void write_events(std::ostream& out, const History& history) {
  out << "source,destination,timestamp";
  for (const auto& name : history.attribute_names()) out << ',' << name;
  out << '\n';
  for (const Event& e : history.events()) {
    out << history.raw_id(e.source) << ',' << history.raw_id(e.destination) << ','
        << csv::format_number(e.timestamp);
    for (const auto& a : history.attributes(e.ordinal)) out << ',' << a;
    out << '\n';
  }
}

void write_events(const std::filesystem::path& path, const History& history) {
  ensure_parent_directory(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_events(out, history);
}

NodeAttributes load_node_attributes(const std::filesystem::path& path, const History& history) {
  const auto table = csv::read_table(path, {"node_id", "label"});
  NodeAttributes labels(history.node_count());
  for (const auto& row : table.rows) {
    if (auto node = history.find_node(row[0])) labels[*node] = row[1];
  }
  return labels;
}

void ensure_parent_directory(const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace dlpeval
