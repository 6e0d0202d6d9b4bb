#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "partable/expr.hpp"

namespace partable {

/// Exact symbolic derivative, canonicalized.
Expr differentiate(const Expr& e, std::string_view var);

/// Names of the base antiderivative rules.
enum class Rule {
  constant,
  power,
  recip,
  exp_linear,
  sin_linear,
  cos_linear,
  shifted_power,
  linear_over_quadratic,
  atan_rule,
  sum_split,
  const_factor,
};

std::string_view rule_name(Rule r);

struct RuleHit {
  Expr antiderivative;
  Rule rule;
};

/// Looks `e` up in the base rule table. No constant of integration is added.
///
/// Covered: constants; var^q (q != -1); 1/var; exp, sin, cos of a linear
/// argument; (a*var + b)^q including q = -1; (c*var + d)/(var^2 + p*var + q)
/// with p^2 - 4q < 0, after dividing out higher-degree numerators; and sums
/// and constant multiples of all of these. An empty result means the caller
/// has to fall back on integration by parts.
std::optional<RuleHit> antiderivative(const Expr& e, std::string_view var);

class NoAntiderivative : public std::runtime_error {
public:
  explicit NoAntiderivative(const std::string& what) : std::runtime_error(what) {}
};

/// antiderivative(e) + pin, where `pin` is a caller-chosen constant of
/// integration (free of `var`). Throws NoAntiderivative on a rule-table miss
/// and std::invalid_argument if `pin` depends on `var`.
Expr antiderivative_with_constant(const Expr& e, std::string_view var, const Expr& pin);

/// sqrt(r) for r >= 0 as rational * squarefree^(1/2).
Expr sqrt_rational(const Rational& r);

namespace testing {

/// While alive, every result of the named base rule is doubled. Fault
/// injection for exercising the failure paths of callers.
class ScopedRuleFault {
public:
  explicit ScopedRuleFault(Rule r);
  ~ScopedRuleFault();
  ScopedRuleFault(const ScopedRuleFault&) = delete;
  ScopedRuleFault& operator=(const ScopedRuleFault&) = delete;

private:
  int previous_;
};

}  // namespace testing

}  // namespace partable
