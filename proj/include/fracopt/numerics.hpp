#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <concepts>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace fracopt {

enum class Arith { Rational, Float };

// Arbitrary-precision rational, always gcd-normalized with positive denominator.
class Rational {
 public:
  Rational() = default;
  template <std::integral I>
  Rational(I value) : v_(static_cast<long>(value)) {}
  Rational(long num, long den);
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  // Accepts "p", "p/q" and exact decimals such as "-1.25" or "3e-2".
  static Rational parse(std::string_view text);

  const mpq_class& get() const { return v_; }
  std::string str() const { return v_.get_str(); }
  double to_double() const { return v_.get_d(); }
  int sign() const { return sgn(v_); }
  Rational abs() const { return Rational(mpq_class(::abs(v_))); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class v_;
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr Arith mode = Arith::Rational;
  static Rational parse(std::string_view s) { return Rational::parse(s); }
  static std::string format(const Rational& x) { return x.str(); }
  static double to_double(const Rational& x) { return x.to_double(); }
  static Rational abs(const Rational& x) { return x.abs(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr Arith mode = Arith::Float;
  static double parse(std::string_view s);
  static std::string format(double x);
  static double to_double(double x) { return x; }
  static double abs(double x) { return std::fabs(x); }
};

template <class S>
concept Scalar = requires(const S& a, const S& b) {
  { ScalarTraits<S>::exact } -> std::convertible_to<bool>;
  { a + b } -> std::convertible_to<S>;
  { a * b } -> std::convertible_to<S>;
  { a / b } -> std::convertible_to<S>;
  { a < b } -> std::convertible_to<bool>;
};

template <Scalar S>
std::string format_scalar(const S& x) { return ScalarTraits<S>::format(x); }

template <Scalar S>
S parse_scalar(std::string_view s) { return ScalarTraits<S>::parse(s); }

struct Tolerance {
  double eps_zero = 1e-9;
  double eps_cmp = 1e-9;
};

enum class Sign { Neg = -1, Zero = 0, Pos = 1 };

template <Scalar S>
Sign sign(const S& x, const Tolerance& tol = {}) {
  if constexpr (ScalarTraits<S>::exact) {
    int s = x.sign();
    return s < 0 ? Sign::Neg : (s > 0 ? Sign::Pos : Sign::Zero);
  } else {
    double ax = std::fabs(static_cast<double>(x));
    if (ax <= tol.eps_zero * std::max(1.0, ax)) return Sign::Zero;
    return x < 0 ? Sign::Neg : Sign::Pos;
  }
}

// Tolerance-aware ordering; exact for rationals.
template <Scalar S>
struct Compare {
  Tolerance tol;

  bool lt(const S& a, const S& b) const {
    if constexpr (ScalarTraits<S>::exact) {
      return a < b;
    } else {
      double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
      return a < b - tol.eps_cmp * scale;
    }
  }
  bool gt(const S& a, const S& b) const { return lt(b, a); }
  bool le(const S& a, const S& b) const { return !lt(b, a); }
  bool ge(const S& a, const S& b) const { return !lt(a, b); }
  bool eq(const S& a, const S& b) const { return !lt(a, b) && !lt(b, a); }
};

// Finite scalar or +infinity. Negative infinity never appears in labels.
template <Scalar S>
class ExtScalar {
 public:
  ExtScalar(S value) : value_(std::move(value)) {}
  template <std::integral I>
  ExtScalar(I value) : value_(S(value)) {}

  static ExtScalar infinity() { return ExtScalar(); }

  bool is_finite() const { return value_.has_value(); }
  bool is_infinite() const { return !value_.has_value(); }
  const S& value() const {
    if (!value_) throw std::logic_error("value() on +inf");
    return *value_;
  }
  std::string str() const { return value_ ? format_scalar(*value_) : "inf"; }

  friend bool operator==(const ExtScalar& a, const ExtScalar& b) { return a.value_ == b.value_; }

 private:
  ExtScalar() = default;
  std::optional<S> value_;
};

template <Scalar S>
ExtScalar<S> ext_add_mul(const S& c, const S& gamma, const ExtScalar<S>& y) {
  if (y.is_infinite()) return ExtScalar<S>::infinity();
  return ExtScalar<S>(c + gamma * y.value());
}

template <Scalar S>
bool ext_less(const ExtScalar<S>& a, const ExtScalar<S>& b, const Compare<S>& cmp) {
  if (a.is_infinite()) return false;
  if (b.is_infinite()) return true;
  return cmp.lt(a.value(), b.value());
}

template <Scalar S>
bool ext_equal(const ExtScalar<S>& a, const ExtScalar<S>& b, const Compare<S>& cmp) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return cmp.eq(a.value(), b.value());
}

template <Scalar S>
const ExtScalar<S>& ext_min(const ExtScalar<S>& a, const ExtScalar<S>& b, const Compare<S>& cmp) {
  return ext_less(b, a, cmp) ? b : a;
}

// a - b for two extended values; inf - inf and finite - inf are program errors.
template <Scalar S>
ExtScalar<S> ext_sub(const ExtScalar<S>& a, const S& b) {
  if (a.is_infinite()) return a;
  return ExtScalar<S>(a.value() - b);
}

template <Scalar S>
S ext_difference(const ExtScalar<S>& a, const ExtScalar<S>& b) {
  if (a.is_infinite() || b.is_infinite()) throw std::logic_error("difference of infinite labels");
  return a.value() - b.value();
}

}  // namespace fracopt
