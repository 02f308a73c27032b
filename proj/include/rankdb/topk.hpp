#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankdb/algebra.hpp"
#include "rankdb/error.hpp"
#include "rankdb/table.hpp"

namespace rankdb {

/// A table exposed through sorted access (descending score, canonical order
/// within ties) and random access keyed on a projection.
class SortedSource {
 public:
  explicit SortedSource(RankedTable table) : table_(std::move(table)), rows_(table_.sorted_rows()) {}

  const RankedTable& table() const noexcept { return table_; }
  const Scheme& scheme() const noexcept { return table_.scheme(); }
  std::size_t size() const noexcept { return rows_.size(); }
  const std::pair<Tuple, Score>& row(std::size_t i) const { return rows_.at(i); }

  /// Rows whose projection on `attrs` equals `key`.
  const std::vector<std::size_t>& matching(const std::vector<std::string>& attrs, const Tuple& key) const {
    auto& idx = indexes_[attrs];
    if (idx.empty() && !rows_.empty()) {
      for (std::size_t i = 0; i < rows_.size(); ++i) idx[rows_[i].first.project(attrs)].push_back(i);
    }
    static const std::vector<std::size_t> none;
    auto it = idx.find(key);
    return it == idx.end() ? none : it->second;
  }

 private:
  RankedTable table_;
  std::vector<std::pair<Tuple, Score>> rows_;
  mutable std::map<std::vector<std::string>, std::map<Tuple, std::vector<std::size_t>>> indexes_;
};

struct TopKResult {
  std::vector<std::pair<Tuple, Score>> rows;
  std::size_t sorted_accesses = 0;
  std::size_t random_accesses = 0;
};

namespace topk_detail {

inline void check(const std::vector<SortedSource>& sources, std::size_t k) {
  if (k < 1) throw Error(Errc::invalid_argument, "k must be at least 1");
  if (sources.empty()) throw Error(Errc::invalid_argument, "no sources");
  for (const auto& s : sources) require_same_chain(*s.table().chain(), *sources.front().table().chain());
  Scheme all;
  for (const auto& s : sources) all = all.unite(s.scheme());
}

inline void sort_and_cut(std::vector<std::pair<Tuple, Score>>& rows, std::size_t k) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return b.second < a.second;
    return a.first < b.first;
  });
  if (rows.size() > k) rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end());
}

}  // namespace topk_detail

/// Reference answer: materialize the whole join, sort, truncate.
inline TopKResult brute_force_top_k(const std::vector<SortedSource>& sources, std::size_t k) {
  topk_detail::check(sources, k);
  RankedTable acc = sources.front().table();
  for (std::size_t i = 1; i < sources.size(); ++i) acc = natural_join(acc, sources[i].table());
  TopKResult out;
  out.rows.assign(acc.entries().begin(), acc.entries().end());
  topk_detail::sort_and_cut(out.rows, k);
  return out;
}

/// Threshold evaluation of the k best tuples of the join of all sources,
/// aggregating by minimum. Sources are read round-robin in sorted order; every
/// newly seen row is completed to full join tuples by random access. Unseen
/// join tuples cannot score above the minimum of the last scores read, so the
/// scan stops once k candidates beat that bound, or when a source runs out
/// (then every join tuple has already been completed).
inline TopKResult top_k(const std::vector<SortedSource>& sources, std::size_t k) {
  topk_detail::check(sources, k);
  const std::size_t n = sources.size();
  ChainPtr chain = sources.front().table().chain();
  TopKResult out;
  std::map<Tuple, Score> candidates;
  std::vector<std::size_t> next(n, 0);
  std::vector<Score> last(n, chain->top());

  // Joins a freshly read row of source `seen_in` with matching rows of all other sources.
  auto complete = [&](std::size_t seen_in, const Tuple& row, const Score& score) {
    struct Partial {
      Tuple tuple;
      Score score;
    };
    std::vector<Partial> frontier{{row, score}};
    Scheme scheme = sources[seen_in].scheme();
    for (std::size_t j = 0; j < n && !frontier.empty(); ++j) {
      if (j == seen_in) continue;
      auto shared = scheme.intersect(sources[j].scheme()).names();
      std::vector<Partial> grown;
      for (const auto& p : frontier) {
        ++out.random_accesses;
        for (std::size_t idx : sources[j].matching(shared, p.tuple.project(shared))) {
          const auto& [t, s] = sources[j].row(idx);
          grown.push_back({join_tuples(p.tuple, t), meet(p.score, s)});
        }
      }
      frontier = std::move(grown);
      scheme = scheme.unite(sources[j].scheme());
    }
    for (auto& p : frontier) candidates.insert_or_assign(std::move(p.tuple), p.score);
  };

  auto kth_score = [&]() -> std::optional<Score> {
    if (candidates.size() < k) return std::nullopt;
    std::vector<Score> scores;
    for (const auto& c : candidates) scores.push_back(c.second);
    std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k - 1), scores.end(),
                     [](const Score& a, const Score& b) { return b < a; });
    return scores[k - 1];
  };

  for (bool done = false; !done;) {
    for (std::size_t i = 0; i < n; ++i) {
      if (next[i] == sources[i].size()) {
        done = true;
        break;
      }
      const auto& [t, s] = sources[i].row(next[i]++);
      ++out.sorted_accesses;
      last[i] = s;
      complete(i, t, s);
      Score threshold = infimum(last, chain->top());
      auto kth = kth_score();
      // Strict: an unseen tuple tying the k-th score could still win the tie.
      if (kth && *kth > threshold) {
        done = true;
        break;
      }
    }
  }
  out.rows.assign(candidates.begin(), candidates.end());
  topk_detail::sort_and_cut(out.rows, k);
  return out;
}

}  // namespace rankdb
