#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rankdb/error.hpp"
#include "rankdb/rational.hpp"

namespace rankdb {

class Score;

/// A bounded totally ordered set of scores.
///
/// Two carriers exist: the rational unit interval [0,1] (exact rationals) and
/// a finite symbolic chain whose levels are declared in ascending order. Scores
/// of different chains never compare; mixing them raises
/// Errc::incompatible_chain.
class ScoreChain : public std::enable_shared_from_this<ScoreChain> {
 public:
  enum class Kind { rational_unit, symbolic };

  static std::shared_ptr<const ScoreChain> rational_unit() {
    static const std::shared_ptr<const ScoreChain> instance(new ScoreChain(Kind::rational_unit, {}));
    return instance;
  }

  static std::shared_ptr<const ScoreChain> symbolic(std::vector<std::string> levels) {
    if (levels.size() < 2) throw Error(Errc::invalid_argument, "a symbolic chain needs at least two levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (std::size_t j = i + 1; j < levels.size(); ++j) {
        if (levels[i] == levels[j]) throw Error(Errc::invalid_argument, "duplicate chain level '" + levels[i] + "'");
      }
    }
    return std::shared_ptr<const ScoreChain>(new ScoreChain(Kind::symbolic, std::move(levels)));
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::string>& levels() const noexcept { return levels_; }

  bool same_as(const ScoreChain& other) const noexcept {
    return this == &other || (kind_ == other.kind_ && levels_ == other.levels_);
  }

  /// Internal carrier value of the least and greatest element.
  Rational bottom_value() const noexcept { return Rational(0); }
  Rational top_value() const noexcept {
    return kind_ == Kind::rational_unit ? Rational(1)
                                        : Rational(static_cast<std::int64_t>(levels_.size()) - 1);
  }

  Score bottom() const;
  Score top() const;
  Score make(const Rational& value) const;
  Score parse(std::string_view text) const;

  /// `places` applies to the rational carrier only; symbolic levels print by name.
  std::string format(const Rational& value, bool exact, int places = 3) const {
    if (kind_ == Kind::symbolic) return levels_.at(static_cast<std::size_t>(value.num()));
    return exact ? value.to_string() : value.to_decimal(places);
  }

  std::string describe() const {
    if (kind_ == Kind::rational_unit) return "rational01";
    std::string out = "symbolic(";
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (i) out += " < ";
      out += levels_[i];
    }
    return out + ")";
  }

 private:
  ScoreChain(Kind kind, std::vector<std::string> levels) : kind_(kind), levels_(std::move(levels)) {}

  Kind kind_;
  std::vector<std::string> levels_;
};

using ChainPtr = std::shared_ptr<const ScoreChain>;

inline void require_same_chain(const ScoreChain& a, const ScoreChain& b) {
  if (!a.same_as(b)) {
    throw Error(Errc::incompatible_chain, a.describe() + " vs " + b.describe());
  }
}

/// An element of a ScoreChain. Values are immutable; comparisons are exact.
class Score {
 public:
  Score(ChainPtr chain, Rational value) : chain_(std::move(chain)), value_(value) {}

  const ChainPtr& chain() const noexcept { return chain_; }
  const Rational& value() const noexcept { return value_; }

  bool is_bottom() const noexcept { return value_ == chain_->bottom_value(); }
  bool is_top() const noexcept { return value_ == chain_->top_value(); }

  std::string str(bool exact = true) const { return chain_->format(value_, exact); }

  friend std::strong_ordering compare(const Score& a, const Score& b) {
    if (a.chain_ != b.chain_) require_same_chain(*a.chain_, *b.chain_);
    return a.value_ <=> b.value_;
  }
  friend bool operator==(const Score& a, const Score& b) { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Score& a, const Score& b) { return compare(a, b); }

  friend std::ostream& operator<<(std::ostream& os, const Score& s) { return os << s.str(true); }

 private:
  ChainPtr chain_;
  Rational value_;
};

inline Score ScoreChain::bottom() const { return Score(shared_from_this(), bottom_value()); }
inline Score ScoreChain::top() const { return Score(shared_from_this(), top_value()); }

inline Score ScoreChain::make(const Rational& value) const {
  if (value < bottom_value() || value > top_value()) {
    throw Error(Errc::domain, "score " + value.to_string() + " outside " + describe());
  }
  if (kind_ == Kind::symbolic && !value.is_integer()) {
    throw Error(Errc::domain, "symbolic scores are level indices");
  }
  return Score(shared_from_this(), value);
}

inline Score ScoreChain::parse(std::string_view text) const {
  if (kind_ == Kind::symbolic) {
    auto it = std::find(levels_.begin(), levels_.end(), text);
    if (it == levels_.end()) throw Error(Errc::domain, "unknown chain level '" + std::string(text) + "'");
    return Score(shared_from_this(), Rational(static_cast<std::int64_t>(it - levels_.begin())));
  }
  return make(Rational::parse(text));
}

// Connectives of the chain. All of them reject operands from different chains.

inline Score meet(const Score& a, const Score& b) { return b < a ? b : a; }

inline Score join_sup(const Score& a, const Score& b) { return a < b ? b : a; }

/// a -> b: top when a <= b, otherwise b.
inline Score residuum(const Score& a, const Score& b) { return a <= b ? a.chain()->top() : b; }

/// a (-) b: bottom when a <= b, otherwise a.
inline Score abjunction(const Score& a, const Score& b) { return a <= b ? a.chain()->bottom() : a; }

inline Score negation(const Score& a) { return a.is_bottom() ? a.chain()->top() : a.chain()->bottom(); }

inline Score biresiduum(const Score& a, const Score& b) { return a == b ? a.chain()->top() : meet(a, b); }

/// Minimum of a non-empty range of scores; `fallback` for an empty one.
template <class Range>
Score infimum(const Range& scores, Score fallback) {
  std::optional<Score> best;
  for (const Score& s : scores) {
    if (!best || s < *best) best = s;
  }
  return best ? *best : fallback;
}

}  // namespace rankdb
