#include "partable/calculus.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <stdexcept>

#include "partable/canonical.hpp"
#include "partable/terms.hpp"

namespace partable {

namespace {

std::atomic<int> g_faulty_rule{-1};

Expr deriv(const Expr& e, std::string_view var);

Expr deriv_raw(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case Kind::constant: return Expr(0);
    case Kind::symbol: return Expr(e.name() == var ? 1 : 0);
    case Kind::sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.operands()) {
        if (!free_of(t, var)) terms.push_back(deriv(t, var));
      }
      return Expr::add(std::move(terms));
    }
    case Kind::product: {
      const auto& ops = e.operands();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (free_of(ops[i], var)) continue;
        std::vector<Expr> f = ops;
        f[i] = deriv(ops[i], var);
        terms.push_back(Expr::mul(std::move(f)));
      }
      return Expr::add(std::move(terms));
    }
    case Kind::power: {
      const Expr& b = e.base();
      const Expr& x = e.exponent();
      if (free_of(x, var)) {
        Expr lowered = Expr::pow(b, Expr::add({x, Expr(-1)}));
        return Expr::mul({x, lowered, deriv(b, var)});
      }
      Expr log_b = Expr::fun(Func::ln, b);
      if (free_of(b, var)) return Expr::mul({e, log_b, deriv(x, var)});
      // b^x * (x' ln b + x b'/b)
      return Expr::mul({e, Expr::add({Expr::mul({deriv(x, var), log_b}),
                                      Expr::mul({x, deriv(b, var), Expr::pow(b, Expr(-1))})})});
    }
    case Kind::function: {
      const Expr& a = e.arg();
      Expr da = deriv(a, var);
      switch (e.func()) {
        case Func::ln: return Expr::mul({da, Expr::pow(a, Expr(-1))});
        case Func::exp: return Expr::mul({e, da});
        case Func::sin: return Expr::mul({Expr::fun(Func::cos, a), da});
        case Func::cos: return Expr::mul({Expr(-1), Expr::fun(Func::sin, a), da});
        case Func::atan:
          return Expr::mul({da, Expr::pow(Expr::add({Expr(1), Expr::pow(a, Expr(2))}), Expr(-1))});
      }
    }
  }
  throw std::logic_error("differentiate: unknown node");
}

Expr deriv(const Expr& e, std::string_view var) {
  if (free_of(e, var)) return Expr(0);
  return deriv_raw(e, var);
}

Expr emit(Rule r, Expr g) {
  if (g_faulty_rule.load() == static_cast<int>(r)) return g * Expr(2);
  return g;
}

struct Linear {
  Expr a;  // nonzero, free of var
  Expr b;
};

std::optional<Linear> linear_in(const Expr& e, std::string_view var) {
  auto c = polynomial_coefficients(e, var);
  if (!c || c->size() != 2 || (*c)[1].is_zero()) return std::nullopt;
  return Linear{(*c)[1], (*c)[0]};
}

// Rational coefficients of a quadratic in var, lowest first, or nothing.
std::optional<std::vector<Rational>> rational_quadratic(const Expr& e, std::string_view var) {
  auto c = polynomial_coefficients(e, var);
  if (!c || c->size() != 3) return std::nullopt;
  std::vector<Rational> out;
  for (const auto& k : *c) {
    if (!k.is_const()) return std::nullopt;
    out.push_back(k.value());
  }
  return out;
}

struct Piece {
  Expr value;
  Rule rule;
};

// Antiderivative of a coefficient-free monomial (the var-dependent factors).
std::optional<Piece> monomial_rule(const std::vector<Factor>& fs, const Expr& var_expr,
                                   std::string_view var) {
  if (fs.empty()) return Piece{emit(Rule::constant, var_expr), Rule::constant};
  if (fs.size() != 1) return std::nullopt;
  const Expr& b = fs.front().base;
  const Expr& q = fs.front().exponent;

  if (b.is_symbol(var)) {
    if (!q.is_const()) return std::nullopt;
    if (q.value() == Rational(-1)) {
      return Piece{emit(Rule::recip, apply(Func::ln, var_expr)), Rule::recip};
    }
    Expr q1 = Expr(q.value() + Rational(1));
    return Piece{emit(Rule::power, power(var_expr, q1) / q1), Rule::power};
  }

  if (b.is(Kind::sum)) {
    if (!q.is_const()) return std::nullopt;
    auto lin = linear_in(b, var);
    if (!lin) return std::nullopt;
    if (q.value() == Rational(-1)) {
      return Piece{emit(Rule::shifted_power, apply(Func::ln, b) / lin->a), Rule::shifted_power};
    }
    Expr q1 = Expr(q.value() + Rational(1));
    return Piece{emit(Rule::shifted_power, power(b, q1) / (lin->a * q1)), Rule::shifted_power};
  }

  if (b.is(Kind::function) && q.is_one()) {
    auto lin = linear_in(b.arg(), var);
    if (!lin) return std::nullopt;
    const Expr& u = b.arg();
    switch (b.func()) {
      case Func::exp: return Piece{emit(Rule::exp_linear, b / lin->a), Rule::exp_linear};
      case Func::sin:
        return Piece{emit(Rule::sin_linear, -apply(Func::cos, u) / lin->a), Rule::sin_linear};
      case Func::cos:
        return Piece{emit(Rule::cos_linear, apply(Func::sin, u) / lin->a), Rule::cos_linear};
      default: return std::nullopt;
    }
  }
  return std::nullopt;
}

// N(x)/Q(x), Q = x^2 + p x + q irreducible. numerator[k] is the coefficient of x^k.
std::optional<Piece> over_quadratic(std::vector<Rational> numerator, const Expr& Q,
                                    std::string_view var) {
  auto qc = rational_quadratic(Q, var);
  if (!qc) return std::nullopt;
  Rational lead = (*qc)[2];
  Rational p = (*qc)[1] / lead;
  Rational q = (*qc)[0] / lead;
  Rational disc = p * p - Rational(4) * q;
  if (!disc.is_negative()) return std::nullopt;
  for (auto& n : numerator) n /= lead;

  // Long division by the monic quadratic.
  std::vector<Rational> quotient(numerator.size() > 2 ? numerator.size() - 2 : 0);
  for (std::size_t k = numerator.size(); k-- > 2;) {
    Rational c = numerator[k];
    if (c.is_zero()) continue;
    quotient[k - 2] = c;
    numerator[k] = Rational();
    numerator[k - 1] -= c * p;
    numerator[k - 2] -= c * q;
  }
  numerator.resize(2);
  const Rational& c = numerator[1];
  const Rational& d = numerator[0];

  Expr x = sym(std::string(var));
  Expr out(0);
  for (std::size_t k = 0; k < quotient.size(); ++k) {
    if (quotient[k].is_zero()) continue;
    Rational k1(static_cast<long>(k + 1));
    out = out + Expr(quotient[k] / k1) * power(x, Expr(k1));
  }
  if (!c.is_zero()) out = out + Expr(c / Rational(2)) * apply(Func::ln, Q);
  Rational k = d - c * p / Rational(2);
  if (!k.is_zero()) {
    Expr s = sqrt_rational(-disc / Rational(4));
    out = out + Expr(k) / s * apply(Func::atan, (x + Expr(p / Rational(2))) / s);
  }
  bool atan_only = quotient.empty() && c.is_zero();
  Rule r = atan_only ? Rule::atan_rule : Rule::linear_over_quadratic;
  return Piece{emit(r, out), r};
}

// c*(var + r)^n with r depending on other symbols, e.g. x - t in t. Splitting
// the expanded sum would integrate to a different primitive; keeping the
// shifted form gives the one that vanishes at var = -r.
std::optional<Piece> symbolic_shift_power(const Expr& e, const Expr& var_expr, std::string_view var) {
  auto c = polynomial_coefficients(e, var);
  if (!c || c->size() < 2) return std::nullopt;
  bool symbolic = std::any_of(c->begin(), c->end(), [](const Expr& k) { return !k.is_const(); });
  const Expr& lead = c->back();
  if (!symbolic || !lead.is_const()) return std::nullopt;
  long n = static_cast<long>(c->size()) - 1;
  Expr r = (*c)[n - 1] / (Expr(n) * lead);
  Expr L = var_expr + r;
  if (!equals(e, lead * power(L, Expr(n)))) return std::nullopt;
  return Piece{emit(Rule::shifted_power, lead * power(L, Expr(n + 1)) / Expr(n + 1)), Rule::shifted_power};
}

}  // namespace

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::constant: return "constant";
    case Rule::power: return "power";
    case Rule::recip: return "recip";
    case Rule::exp_linear: return "exp_linear";
    case Rule::sin_linear: return "sin_linear";
    case Rule::cos_linear: return "cos_linear";
    case Rule::shifted_power: return "shifted_power";
    case Rule::linear_over_quadratic: return "linear_over_quadratic";
    case Rule::atan_rule: return "atan_rule";
    case Rule::sum_split: return "sum_split";
    case Rule::const_factor: return "const_factor";
  }
  return "?";
}

Expr differentiate(const Expr& e, std::string_view var) {
  return canonicalize(deriv(canonicalize(e), var));
}

std::optional<RuleHit> antiderivative(const Expr& e, std::string_view var) {
  Expr var_expr = sym(std::string(var));
  Sum s = expand(e);
  if (s.empty()) return RuleHit{Expr(0), Rule::constant};
  if (auto shifted = symbolic_shift_power(e, var_expr, var)) return RuleHit{shifted->value, shifted->rule};

  Expr total(0);
  std::size_t pieces = 0;
  Rule only = Rule::constant;
  bool scaled = false;

  // Terms of the form c * x^k / Q(x), grouped by Q.
  std::map<Expr, std::vector<Rational>> over_q;

  for (const Term& t : s) {
    std::vector<Factor> inner;
    std::vector<Factor> outer;
    for (const auto& f : t.factors) {
      (free_of(f.base, var) && free_of(f.exponent, var) ? outer : inner).push_back(f);
    }
    // x^k * Q^-1
    const Factor* quad = nullptr;
    long k = 0;
    bool quad_shape = outer.empty();
    for (const auto& f : inner) {
      if (f.base.is(Kind::sum) && f.exponent == Expr(-1) && rational_quadratic(f.base, var)) {
        if (quad) quad_shape = false;
        quad = &f;
      } else if (is_polynomial_factor(f)) {
        k = *f.exponent.value().to_long();
      } else {
        quad_shape = false;
      }
    }
    if (quad && quad_shape) {
      auto& num = over_q[quad->base];
      if (num.size() <= static_cast<std::size_t>(k)) num.resize(k + 1);
      num[k] += t.coeff;
      continue;
    }

    auto piece = monomial_rule(inner, var_expr, var);
    if (!piece) return std::nullopt;
    Term scale{t.coeff, outer};
    Expr mult = monomial_expr(scale);
    total = total + mult * piece->value;
    ++pieces;
    only = piece->rule;
    scaled = !mult.is_one();
  }

  for (auto& [Q, num] : over_q) {
    auto piece = over_quadratic(num, Q, var);
    if (!piece) return std::nullopt;
    total = total + piece->value;
    ++pieces;
    only = piece->rule;
    scaled = false;
  }

  Rule r = pieces > 1 ? Rule::sum_split : scaled ? Rule::const_factor : only;
  return RuleHit{total, r};
}

Expr antiderivative_with_constant(const Expr& e, std::string_view var, const Expr& pin) {
  if (!free_of(pin, var)) {
    throw std::invalid_argument("constant of integration depends on " + std::string(var));
  }
  auto hit = antiderivative(e, var);
  if (!hit) throw NoAntiderivative("no rule for the integrand");
  return hit->antiderivative + pin;
}

Expr sqrt_rational(const Rational& r) {
  if (r.is_negative()) throw std::domain_error("sqrt of a negative rational");
  mpz_class m = r.num() * r.den();
  mpz_class f = 1;
  mpz_class g = 1;
  for (mpz_class p = 2; p * p <= m && p < 1000000; ++p) {
    while (m % (p * p) == 0) {
      m /= p * p;
      f *= p;
    }
    if (m % p == 0) {
      m /= p;
      g *= p;
    }
  }
  if (auto root = exact_root(m, 2)) {
    f *= *root;
  } else {
    g *= m;
  }
  Expr out(Rational(f, r.den()));
  if (g != 1) out = out * power(Expr(Rational(g, 1)), Expr(Rational(1, 2)));
  return out;
}

namespace testing {

ScopedRuleFault::ScopedRuleFault(Rule r) : previous_(g_faulty_rule.exchange(static_cast<int>(r))) {}
ScopedRuleFault::~ScopedRuleFault() { g_faulty_rule.store(previous_); }

}  // namespace testing

}  // namespace partable
