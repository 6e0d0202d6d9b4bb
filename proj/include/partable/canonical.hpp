#pragma once

#include <compare>
#include <optional>
#include <string_view>
#include <vector>

#include "partable/expr.hpp"
#include "partable/rational.hpp"

namespace partable {

/// Canonical normal form. Idempotent, exact, and total. Two expressions that
/// agree as polynomials over their kernels (functions, non-natural powers)
/// canonicalize to the same tree. No trigonometric or logarithmic identities
/// are applied.
Expr canonicalize(const Expr& e);

/// canonicalize(a - b) == 0.
bool equals(const Expr& a, const Expr& b);

/// The rational k with a == k*b, if one exists.
std::optional<Rational> constant_ratio(const Expr& a, const Expr& b, std::string_view var);

/// Replaces every occurrence of `sym` and canonicalizes.
Expr substitute(const Expr& e, std::string_view sym, const Expr& replacement);

struct ComplexityScore {
  std::size_t node_count = 0;
  long max_poly_degree = 0;
  long score = 0;

  friend bool operator==(const ComplexityScore&, const ComplexityScore&) = default;
};

/// score = node_count + 4 * max_poly_degree.
ComplexityScore complexity_score(const Expr& e, std::string_view var);

/// Degree in `var` if `e` is a polynomial in `var` (other symbols are
/// treated as constants).
std::optional<long> polynomial_degree(const Expr& e, std::string_view var);

/// Coefficients c_k (free of `var`) with e == sum c_k var^k, lowest degree first.
std::optional<std::vector<Expr>> polynomial_coefficients(const Expr& e, std::string_view var);

/// Leading rational coefficient of a canonical expression (1 when absent).
Rational leading_coefficient(const Expr& e);
/// `e` with its leading rational coefficient removed.
Expr strip_coefficient(const Expr& e);

}  // namespace partable
