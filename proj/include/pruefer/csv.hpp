#pragma once

// Shared pieces of the CSV formats: `# key=value` metadata lines, a header
// row, then comma-separated rows with doubles at 17 significant digits.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pruefer/error.hpp"

namespace pruefer {

inline constexpr std::string_view generator_version = "1.0.0";

using Metadata = std::map<std::string, std::string>;

namespace csv {

[[nodiscard]] inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[nodiscard]] inline double parse_double(std::string_view text, std::size_t line) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw IoError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

[[nodiscard]] inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline void write_metadata(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [key, value] : entries) out << "# " << key << '=' << value << '\n';
}

/// A parsed file: metadata, the column names, and the numeric rows.
struct Document {
  Metadata metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// `# event ...` style lines that are not key=value pairs, kept verbatim
  std::vector<std::string> comments;
};

[[nodiscard]] inline Document read(std::istream& in, std::size_t min_columns) {
  Document doc;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body(line);
      body.remove_prefix(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      const auto eq = body.find('=');
      if (eq != std::string_view::npos && body.find(' ') > eq) {
        doc.metadata[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
      } else {
        doc.comments.emplace_back(body);
      }
      continue;
    }
    const auto fields = split(line);
    if (!header_seen) {
      for (const auto f : fields) doc.columns.emplace_back(f);
      if (doc.columns.size() < min_columns) {
        throw IoError("line " + std::to_string(lineno) + ": expected at least " + std::to_string(min_columns) +
                      " columns in header");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != doc.columns.size()) {
      throw IoError("line " + std::to_string(lineno) + ": expected " + std::to_string(doc.columns.size()) +
                    " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto f : fields) row.push_back(parse_double(f, lineno));
    doc.rows.push_back(std::move(row));
  }
  if (!header_seen) throw IoError("missing header row");
  return doc;
}

[[nodiscard]] inline const std::string& require(const Metadata& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw IoError("missing metadata key '" + key + "'");
  return it->second;
}

[[nodiscard]] inline double require_double(const Metadata& m, const std::string& key) {
  return parse_double(require(m, key), 0);
}

}  // namespace csv
}  // namespace pruefer
