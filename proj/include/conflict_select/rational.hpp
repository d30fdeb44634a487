#pragma once

/**
 * @file rational.hpp
 * @brief Exact rational numbers for polarization metrics.
 *
 * Values are kept in lowest terms with a positive denominator, so equality
 * is structural. Intermediate products are formed in a 128-bit integer and
 * narrowed back after reduction; a result that does not fit the storage type
 * raises std::overflow_error instead of wrapping.
 */

#include <compare>
#include <concepts>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace conflict_select {

template <std::signed_integral Int>
class basic_rational {
  using wide = __int128;
  static_assert(sizeof(Int) <= 8, "wide intermediate must hold a product of two Int");

 public:
  constexpr basic_rational() = default;
  constexpr basic_rational(Int n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  constexpr basic_rational(Int n, Int d) { assign(n, d); }

  constexpr Int numerator() const { return num_; }
  constexpr Int denominator() const { return den_; }

  constexpr bool is_zero() const { return num_ == 0; }
  constexpr bool is_integer() const { return den_ == 1; }

  explicit constexpr operator double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  constexpr long double to_long_double() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }

  constexpr basic_rational operator-() const { return from_wide(-wide{num_}, den_); }

  friend constexpr basic_rational operator+(const basic_rational& x, const basic_rational& y) {
    return from_wide(wide{x.num_} * y.den_ + wide{y.num_} * x.den_, wide{x.den_} * y.den_);
  }
  friend constexpr basic_rational operator-(const basic_rational& x, const basic_rational& y) {
    return from_wide(wide{x.num_} * y.den_ - wide{y.num_} * x.den_, wide{x.den_} * y.den_);
  }
  friend constexpr basic_rational operator*(const basic_rational& x, const basic_rational& y) {
    // Cross-reduce first so that products of already-reduced operands rarely widen.
    const Int g1 = gcd_abs(x.num_, y.den_);
    const Int g2 = gcd_abs(y.num_, x.den_);
    return from_wide(wide{x.num_ / g1} * (y.num_ / g2), wide{x.den_ / g2} * (y.den_ / g1));
  }
  friend constexpr basic_rational operator/(const basic_rational& x, const basic_rational& y) {
    if (y.num_ == 0) throw std::domain_error("rational division by zero");
    return x * basic_rational(y.den_, y.num_);
  }

  constexpr basic_rational& operator+=(const basic_rational& y) { return *this = *this + y; }
  constexpr basic_rational& operator-=(const basic_rational& y) { return *this = *this - y; }
  constexpr basic_rational& operator*=(const basic_rational& y) { return *this = *this * y; }
  constexpr basic_rational& operator/=(const basic_rational& y) { return *this = *this / y; }

  friend constexpr bool operator==(const basic_rational&, const basic_rational&) = default;
  friend constexpr std::strong_ordering operator<=>(const basic_rational& x, const basic_rational& y) {
    return wide{x.num_} * y.den_ <=> wide{y.num_} * x.den_;
  }

  constexpr basic_rational abs() const { return num_ < 0 ? -*this : *this; }

  /// "p/q", or "p" for integers.
  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static constexpr Int gcd_abs(Int a, Int b) {
    wide x = a < 0 ? -wide{a} : wide{a};
    wide y = b < 0 ? -wide{b} : wide{b};
    while (y != 0) {
      const wide t = x % y;
      x = y;
      y = t;
    }
    return x == 0 ? Int{1} : static_cast<Int>(x);
  }

  static constexpr basic_rational from_wide(wide n, wide d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    wide x = n < 0 ? -n : n;
    wide y = d;
    while (y != 0) {
      const wide t = x % y;
      x = y;
      y = t;
    }
    if (x > 1) {
      n /= x;
      d /= x;
    }
    constexpr wide lo = std::numeric_limits<Int>::min();
    constexpr wide hi = std::numeric_limits<Int>::max();
    if (n <= lo || n > hi || d > hi) throw std::overflow_error("rational value exceeds storage range");
    basic_rational r;
    r.num_ = static_cast<Int>(n);
    r.den_ = static_cast<Int>(d);
    return r;
  }

  constexpr void assign(Int n, Int d) { *this = from_wide(n, d); }

  Int num_ = 0;
  Int den_ = 1;
};

template <std::signed_integral Int>
constexpr basic_rational<Int> pow(basic_rational<Int> base, unsigned exponent) {
  basic_rational<Int> result{1};
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent != 0) base *= base;
  }
  return result;
}

template <std::signed_integral Int>
std::ostream& operator<<(std::ostream& os, const basic_rational<Int>& r) {
  return os << r.str();
}

using Rational = basic_rational<std::int64_t>;

}  // namespace conflict_select
