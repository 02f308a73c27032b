// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "figure_suite.hpp"
#include "support/properties.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome from_check(const rankdb::figures::Check& c) { return {c.passed, c.detail}; }

Outcome from_reports(const std::vector<testsupport::Report>& reports) {
  std::size_t trials = 0;
  for (const auto& r : reports) trials += r.trials;
  if (testsupport::all_ok(reports)) return {true, std::to_string(trials) + " trials, 0 failures"};
  std::string detail = testsupport::summary(reports);
  if (!detail.empty() && detail.back() == '\n') detail.pop_back();
  return {false, detail};
}

Outcome within(Outcome o, double elapsed, double limit) {
  if (o.passed && elapsed >= limit) {
    return {false, "took " + std::to_string(elapsed) + " s, limit " + std::to_string(limit) + " s"};
  }
  return o;
}

}  // namespace

int main() {
  using namespace rankdb::figures;
  Fixtures fx = load_fixtures(RANKDB_DATA_DIR);

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "join of the housing tables",
       [&] {
         auto t0 = Clock::now();
         return within(from_check(check_join(fx)), seconds_since(t0), 1.0);
       }},
      {2, "order transformation of the projected join",
       [&] {
         auto t0 = Clock::now();
         return within(from_check(check_transformed_projection(fx)), seconds_since(t0), 1.0);
       }},
      {3, "product aggregation reorders tuples", [&] { return from_check(check_product_contrast(fx)); }},
      {4, "restriction with and without transformed condition", [&] { return from_check(check_restriction(fx)); }},
      {5, "subsethood and similarity scores", [&] { return from_check(check_subsethood(fx)); }},
      {6, "ordinal inclusion, equivalence and canonical map", [&] { return from_check(check_ordinal(fx)); }},
      {7, "invariance under order isomorphisms",
       [&] {
         auto t0 = Clock::now();
         auto reports = testsupport::invariance_suite(500);
         return within(from_reports(reports), seconds_since(t0), 30.0);
       }},
      {8, "score chain laws", [&] { return from_reports(testsupport::chain_law_suite(64, 20000)); }},
      {9, "rewrite laws and calculus translations",
       [&] {
         auto reports = testsupport::rewrite_suite(200);
         auto calc = testsupport::calculus_suite(200);
         reports.insert(reports.end(), calc.begin(), calc.end());
         return from_reports(reports);
       }},
      {10, "top-k against brute force", [&] { return from_reports(testsupport::topk_suite(300, 100)); }},
      {11, "intersection differs from double difference", [&] { return from_check(check_double_negation(fx)); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.passed ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << std::endl;
    if (!o.passed) ++failed;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
