#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "figure_suite.hpp"
#include "rankdb/rankdb.hpp"

#ifndef RANKDB_DATA_DIR
#define RANKDB_DATA_DIR "data"
#endif

namespace rankdb::cli {

namespace fs = std::filesystem;

inline Catalog open_catalog(const std::string& dir) {
  if (dir.empty()) return Catalog{};
  return load_catalog(dir);
}

inline int cmd_eval(const std::string& query, const std::string& catalog_dir, bool exact, std::ostream& out) {
  Catalog cat = open_catalog(catalog_dir);
  write_csv(out, evaluate(parse_query(query, &cat), cat), exact);
  return 0;
}

inline int cmd_equiv(const std::string& a_path, const std::string& b_path, const std::string& catalog_dir,
                     std::ostream& out) {
  ChainPtr chain = open_catalog(catalog_dir).chain;
  RankedTable a = read_csv_file(a_path, chain);
  RankedTable b = read_csv_file(b_path, chain);
  InclusionResult ab = ordinally_included(a, b);
  InclusionResult ba = ordinally_included(b, a);
  if (ab.holds && ba.holds) {
    out << "EQUIVALENT\n";
    out << "isomorphism: " << witness_isomorphism(a, b).str() << "\n";
  } else if (ab.holds) {
    out << "INCLUDED\n";
    out << "map: " << canonical_map(a, b).str() << "\n";
    out << "evidence: reverse inclusion fails at " << ba.witness->str() << "\n";
  } else {
    out << "NEITHER\n";
    out << "evidence: " << ab.witness->str() << "\n";
    if (ba.holds) out << "note: the second table is ordinally included in the first\n";
  }
  return 0;
}

inline int cmd_transform(const std::string& map_name, const std::vector<std::string>& tables,
                         const std::string& catalog_dir, const std::string& out_dir, bool exact, std::ostream& out) {
  Catalog cat = open_catalog(catalog_dir);
  auto it = cat.maps.find(map_name);
  if (it == cat.maps.end()) throw Error(Errc::unknown_name, "no map named '" + map_name + "'");
  const OrderMap& f = it->second;
  std::vector<std::string> names = tables;
  if (names.empty()) {
    for (const auto& [name, t] : cat.tables) names.push_back(name);
  }
  Catalog next = cat;
  for (const auto& name : names) next.tables.insert_or_assign(name, compose_table(cat.table(name), f));
  for (auto& [name, c] : next.conditions) c = c.then(f);

  if (out_dir.empty()) {
    for (const auto& name : names) {
      out << "# " << name << "\n";
      write_csv(out, next.table(name), exact);
    }
    return 0;
  }
  fs::create_directories(out_dir);
  for (const auto& [name, t] : next.tables) {
    std::ofstream file(fs::path(out_dir) / (name + ".csv"));
    write_csv(file, t, true);
  }
  std::ofstream(fs::path(out_dir) / "catalog.conf") << write_catalog_conf(next);
  out << "wrote " << next.tables.size() << " tables to " << out_dir << "\n";
  return 0;
}

inline int cmd_topk(std::size_t k, const std::string& query, const std::string& catalog_dir, bool exact,
                    std::ostream& out) {
  Catalog cat = open_catalog(catalog_dir);
  NormalizeResult norm = normalize_to_join_chain(parse_query(query, &cat), cat);
  if (!norm.is_join_chain()) {
    std::string where;
    for (const auto& p : norm.offending) where += (where.empty() ? "" : ", ") + p;
    throw Error(Errc::unsupported, "query is not a join chain after rewriting; blocked at " + where);
  }
  std::vector<SortedSource> sources;
  Scheme scheme;
  for (const auto& leaf : join_chain_leaves(norm.expr)) {
    sources.emplace_back(evaluate(leaf, cat));
    scheme = scheme.unite(sources.back().scheme());
  }
  TopKResult r = top_k(sources, k);
  TableBuilder b(scheme, cat.chain);
  for (const auto& [t, s] : r.rows) b.put(t, s);
  write_csv(out, std::move(b).build(), exact);
  out << "sorted accesses: " << r.sorted_accesses << "\n";
  out << "random accesses: " << r.random_accesses << "\n";
  return 0;
}

inline int cmd_plan(const std::string& query, const std::string& catalog_dir, std::ostream& out) {
  Catalog cat = open_catalog(catalog_dir);
  Query e = parse_query(query, &cat);
  infer_scheme(e, cat);
  OptimizeResult r = optimize(e, cat);
  out << "before:\n" << to_tree(e) << "after:\n" << to_tree(r.expr);
  out << "rules:";
  if (r.applied.empty()) out << " none";
  for (const auto& rule : r.applied) out << " " << rule;
  out << "\n";
  return 0;
}

inline int cmd_calc(const std::string& formula, const std::string& catalog_dir, bool exact, std::ostream& out) {
  Catalog cat = open_catalog(catalog_dir);
  Structure m = structure_from_catalog(cat);
  write_csv(out, table_of(m, parse_formula(formula)), exact);
  return 0;
}

inline int cmd_verify(const std::string& data_dir, std::ostream& out) {
  auto checks = figures::run_figure_suite(figures::load_fixtures(data_dir));
  int failed = 0;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) {
      out << ": " << c.detail;
      ++failed;
    }
    out << "\n";
  }
  out << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

/// Entry point shared by the `rankdb` binary and the CLI tests. `args`
/// excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-aware queries over CSV tables with graded scores", "rankdb"};
  app.require_subcommand(1);

  std::string catalog_dir;
  bool exact = false;
  std::string query, formula, a_path, b_path, map_name, out_dir, data_dir = RANKDB_DATA_DIR;
  std::vector<std::string> tables;
  std::size_t k = 0;

  auto add_catalog = [&](CLI::App* sub) {
    sub->add_option("--catalog", catalog_dir, "Directory with NAME.csv tables and an optional catalog.conf");
  };
  auto add_exact = [&](CLI::App* sub) { sub->add_flag("--exact", exact, "Print exact rational scores"); };

  auto* eval = app.add_subcommand("eval", "Evaluate a query and print the result table");
  eval->add_option("query", query, "Query text")->required();
  add_catalog(eval);
  add_exact(eval);

  auto* equiv = app.add_subcommand("equiv", "Compare two tables by the order of their scores");
  equiv->add_option("first", a_path, "CSV file")->required();
  equiv->add_option("second", b_path, "CSV file")->required();
  add_catalog(equiv);

  auto* transform = app.add_subcommand("transform", "Apply a named order map to tables and conditions");
  transform->add_option("--map", map_name, "Map name from catalog.conf")->required();
  transform->add_option("tables", tables, "Tables to transform (default: all)");
  transform->add_option("--out", out_dir, "Write a transformed catalog directory");
  add_catalog(transform);
  add_exact(transform);

  auto* topk = app.add_subcommand("topk", "Best k tuples of a join-chain query");
  topk->add_option("k", k, "Number of tuples")->required()->check(CLI::PositiveNumber);
  topk->add_option("query", query, "Query text")->required();
  add_catalog(topk);
  add_exact(topk);

  auto* plan = app.add_subcommand("plan", "Show a query before and after rewriting");
  plan->add_option("query", query, "Query text")->required();
  add_catalog(plan);

  auto* calc = app.add_subcommand("calc", "Evaluate a formula over the catalog tables");
  calc->add_option("formula", formula, "Formula text")->required();
  add_catalog(calc);
  add_exact(calc);

  auto* verify = app.add_subcommand("verify", "Run the housing example reproduction checks");
  verify->add_option("--data", data_dir, "Data directory holding housing/ and fixtures/");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (eval->parsed()) return cmd_eval(query, catalog_dir, exact, out);
    if (equiv->parsed()) return cmd_equiv(a_path, b_path, catalog_dir, out);
    if (transform->parsed()) return cmd_transform(map_name, tables, catalog_dir, out_dir, exact, out);
    if (topk->parsed()) return cmd_topk(k, query, catalog_dir, exact, out);
    if (plan->parsed()) return cmd_plan(query, catalog_dir, out);
    if (calc->parsed()) return cmd_calc(formula, catalog_dir, exact, out);
    if (verify->parsed()) return cmd_verify(data_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace rankdb::cli
