#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rankdb/error.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

namespace csv_detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Splits one record; double quotes protect commas, "" is a literal quote.
inline std::vector<std::string> split_record(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? cell : trim(cell));
      cell.clear();
      was_quoted = false;
    } else {
      cell += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote", lineno, line.size() + 1);
  out.push_back(was_quoted ? cell : trim(cell));
  return out;
}

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline AttrType parse_type(const std::string& suffix, std::size_t col) {
  if (suffix == "str") return AttrType::str;
  if (suffix == "int") return AttrType::integer;
  if (suffix == "dec") return AttrType::decimal;
  throw ParseError("unknown attribute type '" + suffix + "'", 1, col);
}

}  // namespace csv_detail

/// Reads a table. Header: `#,name:type,...` with type one of str|int|dec.
/// Score 0 rows and repeated tuples are rejected.
inline RankedTable read_csv(std::istream& in, const ChainPtr& chain) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<Attribute> columns;
  bool have_header = false;
  struct Row {
    Tuple tuple;
    Score score;
    std::size_t line;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (csv_detail::trim(line).empty()) continue;
    auto cells = csv_detail::split_record(line, lineno);
    if (!have_header) {
      if (cells.empty() || cells[0] != "#") throw ParseError("first header column must be '#'", lineno, 1);
      for (std::size_t i = 1; i < cells.size(); ++i) {
        auto colon = cells[i].rfind(':');
        if (colon == std::string::npos || colon == 0) {
          throw ParseError("header '" + cells[i] + "' needs a name:type form", lineno, i + 1);
        }
        columns.push_back({cells[i].substr(0, colon), csv_detail::parse_type(cells[i].substr(colon + 1), i + 1), {}});
      }
      have_header = true;
      continue;
    }
    if (cells.size() != columns.size() + 1) {
      throw ParseError("expected " + std::to_string(columns.size() + 1) + " fields, found " +
                           std::to_string(cells.size()),
                       lineno, 1);
    }
    Score s = chain->bottom();
    try {
      s = chain->parse(cells[0]);
    } catch (const Error& e) {
      throw ParseError(e.message(), lineno, 1);
    }
    if (s.is_bottom()) throw ParseError("rows with score 0 are not stored; omit the row", lineno, 1);
    std::vector<Tuple::Cell> tuple;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      try {
        tuple.emplace_back(columns[i].name, parse_value(cells[i + 1], columns[i].type));
      } catch (const Error& e) {
        throw ParseError(e.message(), lineno, i + 2);
      }
    }
    rows.push_back({Tuple(std::move(tuple)), s, lineno});
  }
  if (!have_header) throw ParseError("missing header", lineno + 1, 1);
  Scheme scheme(columns);
  RankedTable::Entries entries;
  for (auto& [t, s, line] : rows) {
    if (!entries.emplace(t, s).second) throw ParseError("duplicate tuple " + t.str(), line, 1);
  }
  return RankedTable(std::move(scheme), chain, std::move(entries));
}

inline RankedTable read_csv_file(const std::string& path, const ChainPtr& chain) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::invalid_argument, "cannot open '" + path + "'");
  try {
    return read_csv(in, chain);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

inline RankedTable read_csv_text(const std::string& text, const ChainPtr& chain) {
  std::istringstream in(text);
  return read_csv(in, chain);
}

/// Writes rows in descending score, canonical order within ties. With
/// `exact` the scores round-trip; otherwise they print at 3 decimals.
inline void write_csv(std::ostream& out, const RankedTable& d, bool exact) {
  out << "#";
  for (const auto& a : d.scheme().attributes()) out << "," << csv_detail::quote(a.name + ":" + type_suffix(a.type));
  out << "\n";
  for (const auto& [t, s] : d.sorted_rows()) {
    out << s.str(exact);
    for (const auto& [name, v] : t.cells()) out << "," << csv_detail::quote(value_str(v));
    out << "\n";
  }
}

inline std::string to_csv(const RankedTable& d, bool exact) {
  std::ostringstream out;
  write_csv(out, d, exact);
  return out.str();
}

}  // namespace rankdb
