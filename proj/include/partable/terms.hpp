#pragma once

#include <compare>
#include <vector>

#include "partable/expr.hpp"
#include "partable/rational.hpp"

namespace partable {

/// One `base^exponent` factor of a monomial. `base` is canonical and never a
/// product; `exponent` is canonical.
struct Factor {
  Expr base;
  Expr exponent;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// `coeff * prod(factors)`; factors sorted by base, bases unique.
struct Term {
  Rational coeff;
  std::vector<Factor> factors;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Fully expanded sum of terms, sorted by monomial, monomials unique,
/// coefficients nonzero. The empty sum is zero.
using Sum = std::vector<Term>;

std::strong_ordering compare_monomials(const std::vector<Factor>& a,
                                       const std::vector<Factor>& b);

/// Distributes products over sums and multiplies out positive integer powers
/// of sums, recursively canonicalizing function arguments and exponents.
Sum expand(const Expr& e);

/// Rebuilds the canonical expression of an expanded sum, grouping terms that
/// share the same non-polynomial kernel: `x^2*sin(x) - 3*x*sin(x)` becomes
/// `(x^2 - 3*x)*sin(x)`.
Expr collect(const Sum& s);

Sum add(const Sum& a, const Sum& b);
Sum multiply(const Sum& a, const Sum& b);
Sum scale(const Sum& s, const Rational& k);

/// A factor counts as polynomial when its base is a symbol and its exponent a
/// positive integer.
bool is_polynomial_factor(const Factor& f);

Expr factor_expr(const Factor& f);
Expr monomial_expr(const Term& t);

}  // namespace partable
