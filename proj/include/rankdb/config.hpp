#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rankdb/condition.hpp"
#include "rankdb/csv.hpp"
#include "rankdb/error.hpp"
#include "rankdb/expr.hpp"
#include "rankdb/order_map.hpp"
#include "rankdb/planner.hpp"

namespace rankdb {

namespace config_detail {

inline std::string trim(std::string_view s) { return csv_detail::trim(s); }

inline ChainPtr parse_chain(const std::string& text, std::size_t lineno) {
  if (text == "rational01") return ScoreChain::rational_unit();
  if (text.rfind("symbolic(", 0) == 0 && text.back() == ')') {
    std::string body = text.substr(9, text.size() - 10);
    std::vector<std::string> levels;
    std::size_t start = 0;
    for (;;) {
      std::size_t lt = body.find('<', start);
      levels.push_back(trim(body.substr(start, lt == std::string::npos ? std::string::npos : lt - start)));
      if (lt == std::string::npos) break;
      start = lt + 1;
    }
    for (const auto& l : levels) {
      if (l.empty()) throw ParseError("empty chain level", lineno, 1);
    }
    return ScoreChain::symbolic(levels);
  }
  throw ParseError("unknown chain '" + text + "'", lineno, 1);
}

inline MapProperties parse_properties(const std::string& text, std::size_t lineno) {
  MapProperties p;
  std::stringstream in(text);
  std::string tag;
  while (std::getline(in, tag, ',')) {
    tag = trim(tag);
    if (tag == "preserving") {
      p.preserving = true;
    } else if (tag == "reflecting") {
      p.reflecting = true;
    } else if (tag == "embedding") {
      p.preserving = p.reflecting = true;
    } else if (tag == "isomorphism") {
      p = MapProperties::iso();
    } else if (tag == "fixed_bottom") {
      p.fixed_bottom = true;
    } else if (tag == "fixed_top") {
      p.fixed_top = true;
    } else if (!tag.empty()) {
      throw ParseError("unknown map property '" + tag + "'", lineno, 1);
    }
  }
  return p;
}

// Splits "a -> b, (c, d] -> e" into entries, keeping bracketed commas.
inline std::vector<std::string> split_entries(const std::string& body) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : body) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

inline std::pair<std::string, std::string> split_arrow(const std::string& entry, std::size_t lineno) {
  auto arrow = entry.rfind("->");
  if (arrow == std::string::npos) throw ParseError("expected 'input -> output' in '" + entry + "'", lineno, 1);
  return {trim(entry.substr(0, arrow)), trim(entry.substr(arrow + 2))};
}

}  // namespace config_detail

/// Parses a map definition such as `piecewise{0 -> 0, (0, 0.5] -> 0.5} [preserving]`
/// or `expr{ x <= 0.5 ? sqrt(x)/sqrt(2) : 2*(x-0.5)^2 + 0.5 } [isomorphism]`.
inline OrderMap parse_order_map(const std::string& text, const ChainPtr& chain, std::size_t lineno = 1) {
  using namespace config_detail;
  auto open = text.find('{');
  auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ParseError("expected kind{...}", lineno, 1);
  }
  std::string kind = trim(text.substr(0, open));
  std::string body = text.substr(open + 1, close - open - 1);
  std::string rest = trim(text.substr(close + 1));
  MapProperties props;
  if (!rest.empty()) {
    if (rest.front() != '[' || rest.back() != ']') throw ParseError("expected [properties] after the map", lineno, close + 2);
    props = parse_properties(rest.substr(1, rest.size() - 2), lineno);
  }
  auto value = [&](const std::string& s) { return chain->parse(s).value(); };
  try {
    if (kind == "expr") return OrderMap::analytic(chain, ExprParser::parse_all(body), props);
    if (kind == "linear" || kind == "graph") {
      std::vector<std::pair<Rational, Rational>> pts;
      for (const auto& e : split_entries(body)) {
        auto [in, out] = split_arrow(e, lineno);
        pts.emplace_back(value(in), value(out));
      }
      return kind == "linear" ? OrderMap::linear(chain, pts, props) : OrderMap::graph(chain, pts, props);
    }
    if (kind == "piecewise") {
      std::optional<Rational> at_bottom;
      std::vector<OrderMap::Piece> pieces;
      for (const auto& e : split_entries(body)) {
        auto [in, out] = split_arrow(e, lineno);
        if (!in.empty() && in.front() == '(') {
          if (in.back() != ']') throw ParseError("pieces are half-open intervals (lo, hi]", lineno, 1);
          auto comma = in.find(',');
          if (comma == std::string::npos) throw ParseError("expected (lo, hi]", lineno, 1);
          pieces.push_back({value(trim(in.substr(1, comma - 1))), value(trim(in.substr(comma + 1, in.size() - comma - 2))),
                            value(out)});
        } else {
          Rational x = value(in);
          if (x != chain->bottom_value()) throw ParseError("single points are only allowed at bottom", lineno, 1);
          at_bottom = value(out);
        }
      }
      return OrderMap::piecewise(chain, at_bottom, pieces, props);
    }
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), lineno, e.column());
  } catch (const Error& e) {
    throw ParseError(e.message(), lineno, 1);
  }
  throw ParseError("unknown map kind '" + kind + "'", lineno, 1);
}

/// Reads `catalog.conf` text into `cat` (chain, maps, conditions).
///   chain rational01 | chain symbolic(none < low < high)
///   map f = <map definition>
///   cond name = <expression>
inline void parse_catalog_conf(const std::string& text, Catalog& cat) {
  using namespace config_detail;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::size_t, std::string>> maps, conds;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto space = t.find_first_of(" \t");
    std::string kw = t.substr(0, space);
    std::string rest = space == std::string::npos ? "" : trim(t.substr(space));
    if (kw == "chain") {
      cat.chain = parse_chain(rest, lineno);
    } else if (kw == "map") {
      maps.emplace_back(lineno, rest);
    } else if (kw == "cond") {
      conds.emplace_back(lineno, rest);
    } else {
      throw ParseError("unknown directive '" + kw + "'", lineno, 1);
    }
  }
  auto name_and_body = [](const std::string& s, std::size_t ln) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'name = definition'", ln, 1);
    std::string name = trim(s.substr(0, eq));
    if (name.empty()) throw ParseError("missing name", ln, 1);
    return std::make_pair(name, trim(s.substr(eq + 1)));
  };
  for (const auto& [ln, s] : maps) {
    auto [name, body] = name_and_body(s, ln);
    cat.maps.insert_or_assign(name, parse_order_map(body, cat.chain, ln).named(name));
  }
  for (const auto& [ln, s] : conds) {
    auto [name, body] = name_and_body(s, ln);
    try {
      cat.conditions.insert_or_assign(name, RestrictionCondition::parse(body, cat.chain, cat.maps).named(name));
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), ln, e.column());
    }
  }
}

/// Loads a catalog directory: optional `catalog.conf`, and each `NAME.csv`
/// as table NAME.
inline Catalog load_catalog(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(Errc::invalid_argument, "catalog directory '" + dir + "' not found");
  Catalog cat;
  fs::path conf = fs::path(dir) / "catalog.conf";
  if (fs::exists(conf)) {
    std::ifstream in(conf);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      parse_catalog_conf(buf.str(), cat);
    } catch (const Error& e) {
      throw Error(e.code(), conf.string() + ": " + e.message());
    }
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) cat.add_table(p.stem().string(), read_csv_file(p.string(), cat.chain));
  return cat;
}

/// Serializes chain, maps and named conditions back to catalog.conf form.
inline std::string write_catalog_conf(const Catalog& cat) {
  std::string out = "chain " + cat.chain->describe() + "\n";
  for (const auto& [name, m] : cat.maps) out += "map " + name + " = " + m.str() + "\n";
  for (const auto& [name, c] : cat.conditions) {
    if (!c.is_expression()) continue;
    std::string body = c.expr()->str();
    for (const auto& f : c.post_maps()) body = f.name() + "(" + body + ")";
    out += "cond " + name + " = " + body + "\n";
  }
  return out;
}

}  // namespace rankdb
