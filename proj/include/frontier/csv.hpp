#pragma once

// Observation CSV: header row "x1,...,xp,y", one observation per line,
// decimal point, no thousands separators. Negative, non-finite and
// non-numeric cells and ragged rows are rejected with line/column.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "frontier/core.hpp"
#include "frontier/error.hpp"

namespace frontier {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline Error parse_error(std::size_t line, std::size_t column, const std::string& msg) {
  return Error(ErrorCode::ParseError,
               "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
}

}  // namespace detail

inline Dataset parse_csv_text(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::size_t lineno = 0;
  std::size_t columns = 0;
  std::vector<Observation> obs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++lineno;
    line = detail::trim(line);
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(detail::trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                     : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (columns == 0) {
      if (cells.size() < 2) throw detail::parse_error(lineno, 1, "header needs at least one input and one output column");
      columns = cells.size();
      continue;
    }
    if (cells.size() != columns) {
      throw detail::parse_error(lineno, std::min(cells.size(), columns) + 1,
                                "expected " + std::to_string(columns) + " fields, found " +
                                    std::to_string(cells.size()));
    }
    Observation o;
    o.x.reserve(columns - 1);
    for (std::size_t c = 0; c < columns; ++c) {
      const auto cell = cells[c];
      double v = 0.0;
      const auto* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      if (cell.empty() || ec != std::errc() || ptr != end) {
        throw detail::parse_error(lineno, c + 1, "not a number: '" + std::string(cell) + "'");
      }
      if (!std::isfinite(v)) throw detail::parse_error(lineno, c + 1, "value must be finite");
      if (v < 0.0) throw detail::parse_error(lineno, c + 1, "value must be >= 0");
      if (c + 1 < columns) {
        o.x.push_back(v);
      } else {
        o.y = v;
      }
    }
    obs.push_back(std::move(o));
  }
  if (columns == 0) throw detail::parse_error(1, 1, "missing header row");
  if (obs.empty()) throw detail::parse_error(lineno, 1, "no observations");
  return Dataset(std::move(obs));
}

inline Dataset parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_text(buf.str());
}

/// Serializes with round-trip precision (%.17g).
inline std::string dataset_to_csv(const Dataset& ds) {
  std::string out;
  for (std::size_t j = 0; j < ds.input_dim(); ++j) out += "x" + std::to_string(j + 1) + ",";
  out += "y\n";
  char buf[32];
  for (const auto& o : ds) {
    for (double v : o.x) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", o.y);
    out += buf;
  }
  return out;
}

}  // namespace frontier
