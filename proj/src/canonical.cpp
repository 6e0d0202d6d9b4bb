#include "partable/canonical.hpp"

#include <algorithm>
#include <map>

#include "partable/terms.hpp"

namespace partable {

Expr canonicalize(const Expr& e) {
  if (e.is_canonical()) return e;
  return collect(expand(e));
}

bool equals(const Expr& a, const Expr& b) {
  if (a.is_canonical() && b.is_canonical() && a == b) return true;
  return add(expand(a), scale(expand(b), -1)).empty();
}

std::optional<Rational> constant_ratio(const Expr& a, const Expr& b, std::string_view /*var*/) {
  Sum sb = expand(b);
  if (sb.empty()) return std::nullopt;
  Sum sa = expand(a);
  if (sa.empty()) return Rational(0);
  auto it = std::find_if(sa.begin(), sa.end(), [&](const Term& t) {
    return compare_monomials(t.factors, sb.front().factors) == 0;
  });
  if (it == sa.end()) return std::nullopt;
  Rational k = it->coeff / sb.front().coeff;
  if (!add(sa, scale(sb, -k)).empty()) return std::nullopt;
  return k;
}

namespace {

Expr replace(const Expr& e, std::string_view sym, const Expr& replacement) {
  switch (e.kind()) {
    case Kind::constant: return e;
    case Kind::symbol: return e.name() == sym ? replacement : e;
    case Kind::function: return Expr::fun(e.func(), replace(e.arg(), sym, replacement));
    case Kind::power:
      return Expr::pow(replace(e.base(), sym, replacement), replace(e.exponent(), sym, replacement));
    case Kind::product:
    case Kind::sum: {
      std::vector<Expr> ops;
      ops.reserve(e.operands().size());
      for (const auto& op : e.operands()) ops.push_back(replace(op, sym, replacement));
      return e.is(Kind::sum) ? Expr::add(std::move(ops)) : Expr::mul(std::move(ops));
    }
  }
  return e;
}

long max_poly_degree(const Expr& e, std::string_view var) {
  if (auto d = polynomial_degree(e, var)) return *d;
  long best = 0;
  for (const auto& op : e.operands()) best = std::max(best, max_poly_degree(op, var));
  return best;
}

}  // namespace

Expr substitute(const Expr& e, std::string_view sym, const Expr& replacement) {
  return canonicalize(replace(e, sym, replacement));
}

std::optional<long> polynomial_degree(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case Kind::constant: return 0;
    case Kind::symbol: return e.name() == var ? 1 : 0;
    case Kind::sum: {
      long best = 0;
      for (const auto& op : e.operands()) {
        auto d = polynomial_degree(op, var);
        if (!d) return std::nullopt;
        best = std::max(best, *d);
      }
      return best;
    }
    case Kind::product: {
      long total = 0;
      for (const auto& op : e.operands()) {
        auto d = polynomial_degree(op, var);
        if (!d) return std::nullopt;
        total += *d;
      }
      return total;
    }
    case Kind::power: {
      if (free_of(e, var)) return 0;
      const Expr& x = e.exponent();
      if (!x.is_const() || !x.value().is_integer() || x.value().is_negative()) return std::nullopt;
      auto n = x.value().to_long();
      auto d = polynomial_degree(e.base(), var);
      if (!n || !d) return std::nullopt;
      return *n * *d;
    }
    case Kind::function:
      if (free_of(e, var)) return 0;
      return std::nullopt;
  }
  return std::nullopt;
}

ComplexityScore complexity_score(const Expr& e, std::string_view var) {
  ComplexityScore s;
  s.node_count = e.node_count();
  s.max_poly_degree = max_poly_degree(e, var);
  s.score = static_cast<long>(s.node_count) + 4 * s.max_poly_degree;
  return s;
}

std::optional<std::vector<Expr>> polynomial_coefficients(const Expr& e, std::string_view var) {
  std::map<long, Sum> by_degree;
  for (const auto& t : expand(e)) {
    long degree = 0;
    Term rest{t.coeff, {}};
    for (const auto& f : t.factors) {
      if (f.base.is_symbol(var)) {
        if (!is_polynomial_factor(f)) return std::nullopt;
        degree = *f.exponent.value().to_long();
      } else if (!free_of(f.base, var) || !free_of(f.exponent, var)) {
        return std::nullopt;
      } else {
        rest.factors.push_back(f);
      }
    }
    by_degree[degree] = add(by_degree[degree], Sum{rest});
  }
  long top = by_degree.empty() ? 0 : by_degree.rbegin()->first;
  std::vector<Expr> out(static_cast<std::size_t>(top + 1), Expr(0));
  for (const auto& [d, s] : by_degree) out[static_cast<std::size_t>(d)] = collect(s);
  return out;
}

Rational leading_coefficient(const Expr& e) {
  if (e.is_const()) return e.value();
  if (e.is(Kind::product) && e.operands().front().is_const()) return e.operands().front().value();
  return 1;
}

Expr strip_coefficient(const Expr& e) {
  if (e.is_const()) return e.is_zero() ? e : Expr(1);
  if (e.is(Kind::product) && e.operands().front().is_const()) {
    std::vector<Expr> rest(e.operands().begin() + 1, e.operands().end());
    if (rest.size() == 1) return rest.front();
    return Expr::mul(std::move(rest)).mark_canonical();
  }
  return e;
}

}  // namespace partable
