#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "xp/error.hpp"

namespace xp {

/// Exact rational in lowest terms with a positive denominator.
///
/// Arithmetic is carried out in 128-bit intermediates and throws
/// ErrorCode::Overflow when a reduced result does not fit in 64 bits.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Largest integer not exceeding the value.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if ((num_ % den_ != 0) && (num_ < 0)) --q;
    return q;
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }
  Rational reciprocal() const {
    if (num_ == 0) throw Error(ErrorCode::Overflow, "reciprocal of zero");
    return from_wide(den_, num_);
  }

  Rational operator-() const {
    if (num_ == INT64_MIN) throw Error(ErrorCode::Overflow, "negation");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    using W = __int128;
    return from_wide(W(a.num_) * b.den_ + W(b.num_) * a.den_, W(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    using W = __int128;
    return from_wide(W(a.num_) * b.den_ - W(b.num_) * a.den_, W(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    using W = __int128;
    return from_wide(W(a.num_) * b.num_, W(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    using W = __int128;
    if (b.num_ == 0) throw Error(ErrorCode::Overflow, "division by zero");
    return from_wide(W(a.num_) * b.den_, W(a.den_) * b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    using W = __int128;
    W lhs = W(a.num_) * b.den_;
    W rhs = W(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// "num/den", or just "num" for integers.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "a", "-a", "a/b"; decimals are rejected.
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    auto parse_int = [&](std::string_view s) -> std::int64_t {
      s = trim(s);
      if (s.empty()) throw Error(ErrorCode::ParseError, "empty integer in '" + std::string(text) + "'");
      std::size_t i = 0;
      bool neg = false;
      if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
      }
      if (i == s.size()) throw Error(ErrorCode::ParseError, "bad integer '" + std::string(s) + "'");
      __int128 v = 0;
      for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
          throw Error(ErrorCode::ParseError, "not an exact rational: '" + std::string(text) + "'");
        v = v * 10 + (s[i] - '0');
        if (v > INT64_MAX) throw Error(ErrorCode::Overflow, "integer too large in '" + std::string(text) + "'");
      }
      return static_cast<std::int64_t>(neg ? -v : v);
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
  }

 private:
  static Rational from_wide(__int128 num, __int128 den) {
    if (den == 0) throw Error(ErrorCode::Overflow, "zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    if (num > INT64_MAX || num < -INT64_MAX || den > INT64_MAX)
      throw Error(ErrorCode::Overflow, "rational exceeds 64-bit range");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  void assign(std::int64_t num, std::int64_t den) { *this = from_wide(num, den); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace xp
