#include "partable/rational.hpp"

#include <functional>
#include <stdexcept>

namespace partable {

Rational::Rational(mpz_class num, mpz_class den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw std::domain_error("rational with zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
  if (g != 1 && g != 0) {
    num_ /= g;
    den_ /= g;
  }
  if (num_ == 0) den_ = 1;
}

Rational Rational::parse(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return {mpz_class(text, 10), mpz_class(1)};
    return {mpz_class(text.substr(0, slash), 10), mpz_class(text.substr(slash + 1), 10)};
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a rational literal: " + text);
  }
}

std::optional<long> Rational::to_long() const {
  if (den_ != 1 || !num_.fits_slong_p()) return std::nullopt;
  return num_.get_si();
}

double Rational::to_double() const {
  mpq_class q(num_, den_);
  return q.get_d();
}

std::string Rational::str() const {
  if (den_ == 1) return num_.get_str();
  return num_.get_str() + "/" + den_.get_str();
}

Rational Rational::reciprocal() const {
  if (num_ == 0) throw std::domain_error("reciprocal of zero");
  return {den_, num_};
}

mpz_class Rational::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
  return q;
}

Rational Rational::pow(long exponent) const {
  if (exponent == 0) return 1;
  if (exponent < 0) return reciprocal().pow(-exponent);
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), num_.get_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(d.get_mpz_t(), den_.get_mpz_t(), static_cast<unsigned long>(exponent));
  return {n, d};
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return {a.num_ * b.num_, a.den_ * b.den_};
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  return {a.num_ * b.den_, a.den_ * b.num_};
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  int c = cmp(a.num_ * b.den_, b.num_ * a.den_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::size_t Rational::hash() const {
  std::hash<std::string> h;
  return h(num_.get_str(16)) * 31 + h(den_.get_str(16));
}

std::optional<mpz_class> exact_root(const mpz_class& value, unsigned long k) {
  if (value < 0 || k == 0) return std::nullopt;
  mpz_class root;
  if (mpz_root(root.get_mpz_t(), value.get_mpz_t(), k) != 0) return root;
  return std::nullopt;
}

}  // namespace partable
