#pragma once

// Random expression generators shared by the property tests. Seeds are fixed
// so every run sees the same cases.

#include <random>
#include <string>
#include <vector>

#include "partable/expr.hpp"

namespace gen {

using partable::Expr;
using partable::Func;
using partable::Rational;

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

  Rational rational(int range = 5, int max_den = 4) {
    return Rational(mpz_class(uniform(-range, range)), mpz_class(uniform(1, max_den)));
  }
  Rational nonzero_rational(int range = 5, int max_den = 4) {
    for (;;) {
      Rational r = rational(range, max_den);
      if (!r.is_zero()) return r;
    }
  }

  // a*x + b with a != 0.
  Expr linear(const std::string& var = "x") {
    return Expr::add({Expr::mul({Expr(nonzero_rational(3, 3)), Expr::symbol(var)}), Expr(rational(3, 2))});
  }

  Expr polynomial(int max_degree, const std::string& var = "x") {
    std::vector<Expr> terms;
    for (int k = 0; k <= max_degree; ++k) {
      Rational c = rational(4, 3);
      if (c.is_zero()) continue;
      terms.push_back(Expr::mul({Expr(c), Expr::pow(Expr::symbol(var), Expr(k))}));
    }
    if (terms.empty()) return Expr(1);
    return Expr::add(std::move(terms));
  }

  // Raw (uncanonicalized) tree over x and the whitelist. Stays finite on (0.1, 3).
  Expr raw(int depth) {
    if (depth <= 0 || uniform(0, 4) == 0) return leaf();
    switch (uniform(0, 6)) {
      case 0:
      case 1: return Expr::add({raw(depth - 1), raw(depth - 1)});
      case 2:
      case 3: return Expr::mul({raw(depth - 1), raw(depth - 1)});
      case 4: return Expr::pow(raw(depth - 1), Expr(uniform(0, 3)));
      case 5: return Expr::pow(Expr::symbol("x"), Expr(rational(3, 2)));
      default: {
        static const Func fs[] = {Func::sin, Func::cos, Func::exp, Func::atan};
        if (uniform(0, 3) == 0) return Expr::fun(Func::ln, Expr::mul({Expr(uniform(1, 3)), Expr::symbol("x")}));
        return Expr::fun(fs[uniform(0, 3)], small(depth - 1));
      }
    }
  }

  // Something whose magnitude stays modest, safe under exp.
  Expr small(int depth) {
    if (depth <= 0 || coin()) return linear();
    return Expr::fun(coin() ? Func::sin : Func::cos, linear());
  }

  Expr leaf() {
    switch (uniform(0, 3)) {
      case 0: return Expr(rational());
      case 1: return Expr::pow(Expr::symbol("x"), Expr(uniform(-2, 3)));
      default: return Expr::symbol("x");
    }
  }

  // sin(ax), cos(ax) or exp(ax), rational a
  Expr kernel() {
    Expr ax = Expr::mul({Expr(nonzero_rational(3, 3)), Expr::symbol("x")});
    switch (uniform(0, 2)) {
      case 0: return Expr::fun(Func::sin, ax);
      case 1: return Expr::fun(Func::cos, ax);
      default: return Expr::fun(Func::exp, ax);
    }
  }

  // Integrands tabular IBP is known to finish.
  Expr solvable() {
    Expr x = Expr::symbol("x");
    auto scaled = [&](int range, int den) { return Expr::mul({Expr(nonzero_rational(range, den)), x}); };
    auto trig = [&](Expr arg) { return Expr::fun(coin() ? Func::sin : Func::cos, std::move(arg)); };
    switch (uniform(0, 5)) {
      case 0: return Expr::mul({polynomial(3), kernel()});
      case 1: return Expr::mul({polynomial(2), Expr::pow(Expr::fun(Func::ln, x), Expr(uniform(1, 3)))});
      case 2: return Expr::mul({Expr::fun(Func::exp, scaled(3, 2)), trig(scaled(3, 2))});
      case 3: return Expr::mul({trig(Expr::mul({Expr(uniform(1, 4)), x})), trig(Expr::mul({Expr(uniform(5, 8)), x}))});
      case 4: return Expr::mul({Expr::pow(x, Expr(uniform(0, 3))), Expr::fun(Func::atan, x)});
      default: return Expr::mul({polynomial(2), Expr::fun(Func::exp, x), Expr::fun(Func::sin, x)});
    }
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

}  // namespace gen
