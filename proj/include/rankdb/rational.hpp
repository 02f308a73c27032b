#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "rankdb/error.hpp"

namespace rankdb {

/// Exact rational number with a normalized 64-bit numerator/denominator pair.
/// Intermediate products use 128-bit arithmetic; a result that does not fit
/// back into 64 bits raises Errc::overflow instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }

  /// Parses `12`, `-0.937`, `3/8` exactly.
  static Rational parse(std::string_view text) {
    auto fail = [&] { return Error(Errc::parse, "not a number: '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
      negative = text[0] == '-';
      pos = 1;
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      Rational n = parse_unsigned_decimal(text.substr(pos, slash - pos), fail);
      Rational d = parse_unsigned_decimal(text.substr(slash + 1), fail);
      if (d.num_ == 0) throw Error(Errc::domain, "zero denominator in '" + std::string(text) + "'");
      Rational r = n / d;
      return negative ? -r : r;
    }
    Rational r = parse_unsigned_decimal(text.substr(pos), fail);
    return negative ? -r : r;
  }

  /// Nearest multiple of 10^-places to `x` (ties away from zero).
  static Rational from_double(double x, int places) {
    if (!std::isfinite(x)) throw Error(Errc::domain, "non-finite value");
    std::int64_t scale = pow10(places);
    long double scaled = std::round(static_cast<long double>(x) * scale);
    if (std::fabs(scaled) > 9.0e18L) throw Error(Errc::overflow, "value too large to quantize");
    return Rational(static_cast<std::int64_t>(scaled), scale);
  }

  /// Rounds to a multiple of 10^-places (ties away from zero), exactly.
  Rational round_to(int places) const {
    std::int64_t scale = pow10(places);
    __int128 scaled = static_cast<__int128>(num_) * scale;
    __int128 q = scaled / den_;
    __int128 r = scaled % den_;
    if (r < 0) r = -r;
    if (2 * r >= den_) q += (scaled < 0 ? -1 : 1);
    return Rational(narrow(q), scale);
  }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Exact textual form: terminating decimals print as decimals, others as `n/d`.
  std::string to_string() const {
    std::int64_t d = den_;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
    return to_decimal(std::max(twos, fives), /*trim=*/true);
  }

  /// Fixed-point rendering with `places` digits, rounding ties away from zero.
  std::string to_decimal(int places, bool trim = false) const {
    Rational r = round_to(places);
    std::int64_t scale = pow10(places);
    __int128 scaled = static_cast<__int128>(r.num_) * (scale / r.den_);
    bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string whole = std::to_string(static_cast<std::int64_t>(scaled / scale));
    std::string frac;
    if (places > 0) {
      frac = std::to_string(static_cast<std::int64_t>(scaled % scale));
      frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
    }
    if (trim) {
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
    }
    std::string out = negative ? "-" + whole : whole;
    if (!frac.empty()) out += "." + frac;
    return out;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(Errc::domain, "division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

  static std::int64_t pow10(int places) {
    if (places < 0 || places > 18) throw Error(Errc::invalid_argument, "bad decimal places");
    std::int64_t p = 1;
    for (int i = 0; i < places; ++i) p *= 10;
    return p;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;

  static std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw Error(Errc::overflow, "rational component exceeds 64 bits");
    return static_cast<std::int64_t>(v);
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num_ = narrow(n);
    r.den_ = narrow(d);
    return r;
  }

  void assign(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(Errc::domain, "zero denominator");
    *this = from_wide(num, den);
  }

  template <class Fail>
  static Rational parse_unsigned_decimal(std::string_view s, Fail&& fail) {
    if (s.empty()) throw fail();
    __int128 n = 0;
    __int128 d = 1;
    bool seen_point = false;
    bool seen_digit = false;
    for (char c : s) {
      if (c == '.') {
        if (seen_point) throw fail();
        seen_point = true;
      } else if (c >= '0' && c <= '9') {
        seen_digit = true;
        n = n * 10 + (c - '0');
        if (seen_point) d *= 10;
        if (n > INT64_MAX || d > INT64_MAX) throw Error(Errc::overflow, "too many digits");
      } else {
        throw fail();
      }
    }
    if (!seen_digit) throw fail();
    return from_wide(n, d);
  }
};

}  // namespace rankdb
