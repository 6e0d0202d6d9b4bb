#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace partable {

/// Exact rational number kept in lowest terms with a positive denominator.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(int value) : num_(value), den_(1) {}   // NOLINT(google-explicit-constructor)
  Rational(mpz_class num, mpz_class den);

  /// Parses "p" or "p/q" (optional leading '-'). Throws std::invalid_argument.
  static Rational parse(const std::string& text);

  const mpz_class& num() const { return num_; }
  const mpz_class& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }
  int sign() const { return sgn(num_); }

  /// Integer value if it fits in a long.
  std::optional<long> to_long() const;
  double to_double() const;
  std::string str() const;

  Rational abs() const { return {::abs(num_), den_}; }
  Rational reciprocal() const;
  /// Largest integer <= *this.
  mpz_class floor() const;
  /// Integer power; throws std::domain_error for 0^negative.
  Rational pow(long exponent) const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return {-num_, den_}; }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  std::size_t hash() const;

private:
  void normalize();

  mpz_class num_;
  mpz_class den_;
};

/// Exact k-th root of a nonnegative integer, if it exists.
std::optional<mpz_class> exact_root(const mpz_class& value, unsigned long k);

}  // namespace partable
