#include "doctest.h"

#include <cmath>
#include <json.hpp>

#include "gen.hpp"
#include "partable/canonical.hpp"
#include "partable/parser.hpp"
#include "partable/render.hpp"
#include "partable/showcase.hpp"

using namespace partable;

namespace {

Expr P(const char* s) { return parse(s); }

// e^x E1(x), independent of our quadrature
double f_oracle(double x) { return -std::exp(x) * std::expint(-x); }

double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }

}  // namespace

TEST_CASE("quad") {
  auto r = quad(P("(1-s)^3*s"), "s", 0, 1);
  CHECK(r.value == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r.error_estimate >= 0);
  CHECK(r.evaluations >= 33);

  CHECK(quad(P("0"), "s", 0, 1).value == 0);
  CHECK(quad(P("s^2"), "s", 1, 0).value == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  CHECK(quad(P("s"), "s", 2, 2).value == 0);

  double f10 = quad(P("exp(x-t)/t"), "t", 10, infinity, 1e-10, {{"x", 10}}).value;
  CHECK(f10 > 0);
  CHECK(f10 < 0.1);
  CHECK(std::abs(f10 - f_oracle(10)) < 1e-9);
  CHECK(std::abs(quad(P("exp(-t)"), "t", 0, infinity).value - 1) < 1e-10);

  CHECK_THROWS_AS(quad(P("1/(s-1/2)"), "s", 0, 1), NonFinite);
  CHECK_THROWS_AS(quad(P("sin(1000000*s)"), "s", 0, 10, 1e-15), NoConvergence);
  CHECK_THROWS_AS(quad(P("s"), "s", 0, 1, 0), std::invalid_argument);
}

TEST_CASE("definite") {
  Expr e1 = apply(Func::exp, Expr(1));
  Expr v = definite(make_problem(P("ln(x)")), Expr(1), e1);
  CHECK(std::abs(evaluate(v, {}) - 1) < 1e-12);

  CHECK(definite(make_problem(P("exp(x^2)")), Expr(0), Expr(0)).is_zero());

  v = definite(make_problem(P("(1-s)^3*s"), "s"), Expr(0), Expr(1));
  CHECK(equals(v, Expr(Rational(1, 20))));
  CHECK(std::abs(quad(P("(1-s)^3*s"), "s", 0, 1).value - 0.05) < 1e-10);

  // symbolic and numeric oracles agree wherever both apply
  gen::Gen g(17);
  for (int k = 0; k < 40; ++k) {
    Expr a(g.rational(2, 2));
    Expr b(g.rational(2, 2));
    Expr kern = g.coin() ? apply(Func::sin, Expr(g.nonzero_rational(2, 2)) * sym("x"))
                         : apply(Func::exp, Expr(g.nonzero_rational(2, 2)) * sym("x"));
    auto p = make_problem(g.polynomial(2) * kern);
    if (free_of(p.integrand, "x")) continue;
    Expr d = definite(p, a, b);
    auto q = quad(p.integrand, "x", evaluate(a, {}), evaluate(b, {}));
    CHECK(std::abs(evaluate(d, {}) - q.value) <= std::max(1e-9, 10 * q.error_estimate));
  }
}

TEST_CASE("taylor examples") {
  auto r = taylor(P("sin(t)"), Rational(0), 3);
  CHECK(equals(r.polynomial, P("x - x^3/6")));
  CHECK(equals(r.remainder_integrand, P("sin(t)*(x-t)^3/6")));
  CHECK(!free_of(r.remainder_integrand, "t"));

  r = taylor(P("exp(t)"), Rational(0), 2);
  CHECK(equals(r.polynomial, P("1 + x + x^2/2")));

  r = taylor(P("cos(t)"), Rational(0), 0);
  CHECK(equals(r.polynomial, P("1")));
  CHECK(equals(r.remainder_integrand, P("-sin(t)")));

  // the dv column of the pinned table
  r = taylor(P("sin(t)"), Rational(0), 4);
  REQUIRE(r.table.rows.size() == 5);
  CHECK(equals(r.table.rows[0].dv, P("-1")));
  CHECK(equals(r.table.rows[1].dv, P("x-t")));
  CHECK(equals(r.table.rows[2].dv, P("-(x-t)^2/2")));
  CHECK(equals(r.table.rows[3].dv, P("(x-t)^3/6")));
  CHECK(equals(r.table.rows[4].dv, P("-(x-t)^4/24")));
  CHECK(step_invariant_holds(r.table));
}

TEST_CASE("taylor coefficients and boundary terms") {
  // exp about 1: coefficients are e/j!
  auto r = taylor(P("exp(t)"), Rational(1), 4);
  for (double x : {0.3, 1.0, 1.7}) {
    double want = 0;
    for (int j = 0; j <= 4; ++j) want += std::exp(1.0) * std::pow(x - 1, j) / fact(j);
    CHECK(evaluate(r.polynomial, {{"x", x}}) == doctest::Approx(want).epsilon(1e-13));
  }
  auto deg = polynomial_degree(r.polynomial, "x");
  REQUIRE(deg);
  CHECK(*deg <= 4);

  for (const char* f : {"sin(t)", "cos(t)", "exp(2*t)", "ln(t+2)", "atan(t)", "t^5 - t"})
    for (int n = 1; n <= 5; ++n) {
      auto tr = taylor(P(f), Rational(1, 2), n);
      CHECK_MESSAGE(substitute(partial_sum(tr.table), "t", sym("x")).is_zero(), f << " n=" << n);
      CHECK(canonicalize(substitute(partial_sum(tr.table), "t", sym("x"))) == Expr(0));
    }
}

TEST_CASE("taylor_check") {
  CHECK(taylor_check(P("sin(t)"), Rational(0), 4, 1.3) < 1e-8);
  CHECK(taylor_check(P("exp(t)"), Rational(0), 3, 0.7) < 1e-8);
  CHECK(taylor_check(P("cos(t)"), Rational(1, 3), 5, 1.0 / 3) < 1e-12);
  for (int n : {2, 4, 6})
    for (double x : {0.5, 1.3, 2.0}) CHECK(taylor_check(P("sin(t)"), Rational(0), n, x) < 1e-8);
  CHECK(taylor_check(P("ln(t)"), Rational(1), 3, 1.5) < 1e-8);
}

TEST_CASE("asymptotic identity") {
  CHECK(equals(asymptotic_partial_sum(3), P("1/x - 1/x^2 + 2/x^3")));
  CHECK(equals(asymptotic_partial_sum(4), P("1/x - 1/x^2 + 2/x^3 - 6/x^4")));
  auto t = asymptotic_table(3);
  CHECK(equals(t.rows[3].u, P("-6/t^4")));

  CHECK(asymptotic_identity_check(10, 3) < 1e-8);
  CHECK(asymptotic_identity_check(50, 1) < 1e-10);
  double f50 = asymptotic_f(50);
  CHECK(std::abs(f50 - 1.0 / 50) < 1.0 / 2500);
  CHECK(std::abs(f50 - f_oracle(50)) < 1e-10);
  CHECK(std::abs(f50 - 1.0 / 50 + 1.0 / 2500) < 2 * 2.0 / (50.0 * 50 * 50));

  // partial sums improve with n at fixed large x
  double e1 = std::abs(asymptotic_f(10) - evaluate(asymptotic_partial_sum(1), {{"x", 10}}));
  double e4 = std::abs(asymptotic_f(10) - evaluate(asymptotic_partial_sum(4), {{"x", 10}}));
  CHECK(e4 < e1);

  for (double x : {10.0, 20.0, 50.0}) {
    for (int n = 1; n <= 4; ++n) {
      CHECK(asymptotic_identity_check(x, n) < 1e-8);
      double r = asymptotic_remainder(x, n);
      CHECK((n % 2 == 0 ? r > 0 : r < 0));
    }
  }
}

TEST_CASE("exercise corpus") {
  auto items = run_corpus();
  CHECK(items.size() == 12 + 2 + 9);
  for (const auto& it : items) CHECK_MESSAGE(it.passed, it.id << ": " << it.detail);
  for (std::size_t k = 1; k < items.size(); ++k) CHECK(items[k - 1].id < items[k].id);

  auto text = corpus_text(items);
  CHECK(text == corpus_text(run_corpus()));
  CHECK(text.find("beta.n3.b2 PASS") != std::string::npos);

  auto j = nlohmann::json::parse(corpus_json(items));
  CHECK(j.size() == items.size());
  CHECK(j[0].contains("max_error"));

  // beta identity at n = 3, b = 2 and x sin x, both by hand
  Expr v = definite(make_problem(P("(1-s)^3*s"), "s"), Expr(0), Expr(1));
  CHECK(equals(canonicalize(Expr(9) * v), Expr(Rational(9, 20))));
  auto tr = auto_integrate(make_problem(P("x*sin(x)")));
  CHECK(equals(tr.antiderivative, P("sin(x) - x*cos(x)")));
}
