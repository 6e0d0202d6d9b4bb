#include "partable/registry.hpp"

#include <cstdio>
#include <functional>

#include "partable/canonical.hpp"
#include "partable/ibp.hpp"
#include "partable/parser.hpp"
#include "partable/render.hpp"
#include "partable/showcase.hpp"

namespace partable {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

ItemResult closed_form(std::string id, const char* integrand, const char* want, long recursive = -1) {
  ItemResult r{std::move(id), false, ""};
  try {
    auto tr = auto_integrate(make_problem(parse(integrand)));
    bool ok = equals(tr.antiderivative, parse(want)) && verify(tr).passed;
    if (recursive >= 0) ok = ok && static_cast<long>(tr.recursive_tables()) == recursive;
    r.passed = ok;
    r.detail = render(tr.final_antiderivative);
  } catch (const std::exception& e) {
    r.detail = e.what();
  }
  return r;
}

Expr ln_power_form(int n) {
  Expr sum(0);
  Rational coeff(1);
  for (int k = n; k >= 0; --k) {
    Rational c = ((n - k) % 2 == 0) ? coeff : -coeff;
    sum = sum + Expr(c) * sym("x") * power(apply(Func::ln, sym("x")), Expr(k));
    coeff = coeff * Rational(k);
  }
  return canonicalize(sum);
}

}  // namespace

std::vector<ItemResult> run_examples() {
  std::vector<ItemResult> out;
  out.push_back(closed_form("ln", "ln(x)", "x*ln(x) - x"));
  out.push_back(closed_form("exp3x_sin2x", "exp(3*x)*sin(2*x)", "exp(3*x)/13*(3*sin(2*x) - 2*cos(2*x))"));
  out.push_back(closed_form("poly_sin", "(x^2-3*x)*sin(x)", "(3*x-x^2)*cos(x) + (2*x-3)*sin(x) + 2*cos(x)"));
  out.push_back(closed_form("sin2x_cos5x", "sin(2*x)*cos(5*x)", "(5/21)*sin(2*x)*sin(5*x) + (2/21)*cos(2*x)*cos(5*x)"));
  out.push_back(closed_form("poly_ln2", "(3*x^2-x)*ln(x)^2",
                            "(x^3 - x^2/2)*ln(x)^2 + (x^2/2 - 2*x^3/3)*ln(x) + 2*x^3/9 - x^2/4", 1));

  for (int n = 1; n <= 6; ++n) {
    ItemResult r{"ln_power.n" + std::to_string(n), false, ""};
    try {
      auto tr = auto_integrate(make_problem(power(apply(Func::ln, sym("x")), Expr(n))));
      r.passed = equals(tr.antiderivative, ln_power_form(n)) && verify(tr).passed;
      r.detail = render(tr.final_antiderivative);
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    out.push_back(r);
  }

  for (int n : {2, 4, 6})
    for (double x : {0.5, 1.3, 2.0}) {
      char id[48];
      std::snprintf(id, sizeof id, "taylor.sin.n%d.x%.1f", n, x);
      ItemResult r{id, false, ""};
      try {
        double err = taylor_check(parse("sin(t)"), Rational(0), n, x);
        r.passed = err < 1e-8;
        r.detail = "error " + sci(err);
      } catch (const std::exception& e) {
        r.detail = e.what();
      }
      out.push_back(r);
    }

  for (int x : {10, 20, 50})
    for (int n = 1; n <= 4; ++n) {
      ItemResult r{"asymptotic.x" + std::to_string(x) + ".n" + std::to_string(n), false, ""};
      try {
        double err = asymptotic_identity_check(x, n);
        r.passed = err < 1e-8;
        r.detail = "error " + sci(err);
      } catch (const std::exception& e) {
        r.detail = e.what();
      }
      out.push_back(r);
    }

  for (const auto& c : run_corpus())
    out.push_back(ItemResult{"corpus." + c.id, c.passed, c.detail + " (error " + sci(c.max_error) + ")"});
  return out;
}

}  // namespace partable
