#include "partable/showcase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include <json.hpp>

#include "partable/calculus.hpp"
#include "partable/canonical.hpp"
#include "partable/parser.hpp"
#include "partable/render.hpp"

namespace partable {

namespace {

constexpr int max_depth = 50;
constexpr int min_depth = 4;  // at least 16 panels before accepting

class Simpson {
public:
  Simpson(std::function<double(double)> f, double tol) : f_(std::move(f)), tol_(tol) {}

  QuadResult run(double a, double b) {
    double fa = eval(a), fb = eval(b), fm = eval((a + b) / 2);
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    QuadResult r;
    r.value = adapt(a, b, fa, fm, fb, whole, tol_, 0);
    r.error_estimate = err_;
    r.evaluations = evals_;
    return r;
  }

private:
  double eval(double s) {
    if (++evals_ > quad_budget) throw NoConvergence("quadrature evaluation budget exhausted");
    double v = f_(s);
    if (!std::isfinite(v)) throw NonFinite("integrand is not finite at " + std::to_string(s));
    return v;
  }

  double adapt(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    double m = (a + b) / 2;
    double flm = eval((a + m) / 2), frm = eval((m + b) / 2);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    double delta = left + right - whole;
    if (depth >= min_depth && std::abs(delta) <= 15 * tol) {
      err_ += std::abs(delta) / 15;
      return left + right + delta / 15;
    }
    if (depth >= max_depth) throw NoConvergence("quadrature panel could not be refined further");
    return adapt(a, m, fa, flm, fm, left, tol / 2, depth + 1) + adapt(m, b, fm, frm, fb, right, tol / 2, depth + 1);
  }

  std::function<double(double)> f_;
  double tol_;
  long evals_ = 0;
  double err_ = 0;
};

Expr X() { return sym("x"); }
Expr T() { return sym("t"); }

Rational factorial(int n) {
  Rational r(1);
  for (int k = 2; k <= n; ++k) r = r * Rational(k);
  return r;
}

}  // namespace

QuadResult quad(const Expr& e, std::string_view var, double a, double b, double tol, const Bindings& env) {
  if (!(tol > 0)) throw std::invalid_argument("quad tolerance must be positive");
  if (std::isnan(a) || std::isnan(b) || std::isinf(a)) throw std::invalid_argument("quad bounds must be a finite start");
  if (a == b) return QuadResult{};
  Bindings local = env;
  auto& slot = local[std::string(var)];
  auto f = [&](double t) {
    slot = t;
    return evaluate(e, local);
  };
  if (std::isinf(b)) {
    if (b < 0) throw std::invalid_argument("quad: lower infinite bound unsupported");
    auto g = [&](double s) {
      if (s >= 1) return 0.0;  // the integrand is assumed to decay
      double w = 1 - s;
      return f(a + s / w) / (w * w);
    };
    return Simpson(g, tol).run(0, 1);
  }
  if (b < a) {
    QuadResult r = Simpson(f, tol).run(b, a);
    r.value = -r.value;
    return r;
  }
  return Simpson(f, tol).run(a, b);
}

Expr definite(const IntegralProblem& p, const Expr& a, const Expr& b, const Policy& policy) {
  if (equals(a, b)) return Expr(0);
  auto tr = auto_integrate(p, policy);
  const Expr& F = tr.antiderivative;
  return canonicalize(substitute(F, p.var, b) - substitute(F, p.var, a));
}

TaylorResult taylor(const Expr& f, const Rational& a, int n) {
  if (n < 0) throw std::invalid_argument("taylor order must be non-negative");
  Expr fp = differentiate(f, "t");
  Expr u = canonicalize(-fp);
  Expr dv(-1);

  // pins that turn each integration into (-1)^(k+1) (x-t)^k / k!
  std::vector<Expr> pins;
  Expr cell = dv;
  for (int k = 1; k <= n; ++k) {
    Expr want = canonicalize(Expr(Rational(k % 2 == 0 ? -1 : 1) / factorial(k)) * power(X() - T(), Expr(k)));
    Expr got = antiderivative_with_constant(cell, "t", Expr(0));
    Expr pin = canonicalize(want - got);
    if (!free_of(pin, "t")) throw std::logic_error("taylor pin depends on t");
    pins.push_back(pin);
    cell = want;
  }

  TaylorResult r;
  r.a = a;
  r.n = n;
  IntegralProblem p{canonicalize(u * dv), "t"};
  Table t = new_table(p, Split{u, dv}, pins);
  for (int k = 0; k < n; ++k) t = step(t);

  Expr S = partial_sum(t);
  Expr at_x = canonicalize(substitute(S, "t", X()));
  Expr at_a = canonicalize(substitute(S, "t", Expr(a)));
  Expr fa = canonicalize(substitute(f, "t", Expr(a)));
  r.polynomial = canonicalize(fa + at_x - at_a);
  if (n == 0) {
    r.remainder_integrand = canonicalize(fp);
  } else {
    Residual res = residual(t);
    r.remainder_integrand = canonicalize(Expr(res.sign) * res.integrand);
  }
  r.table = std::move(t);
  r.dv_cells = {"-1"};
  r.dv_cells_latex = {"-1"};
  for (int k = 1; k <= n; ++k) {
    std::string sign = k % 2 == 0 ? "-" : "";
    std::string K = std::to_string(k);
    if (k == 1) {
      r.dv_cells.push_back("x - t");
      r.dv_cells_latex.push_back("x - t");
    } else {
      r.dv_cells.push_back(sign + "(x - t)^" + K + "/" + K + "!");
      r.dv_cells_latex.push_back(sign + "\\frac{(x - t)^{" + K + "}}{" + K + "!}");
    }
  }
  return r;
}

std::string render_taylor_table(const TaylorResult& r, Format format) {
  std::string out;
  if (format == Format::latex) {
    out += "\\begin{array}{c|c|c}\n";
    for (std::size_t k = 0; k < r.table.rows.size(); ++k) {
      const auto& row = r.table.rows[k];
      out += std::string(row.sign > 0 ? "+" : "-") + " & " + render(row.u, format) + " & " + r.dv_cells_latex[k] +
             " \\\\\n";
    }
    return out + "\\end{array}\n";
  }
  std::size_t w = 0;
  std::vector<std::string> us;
  for (const auto& row : r.table.rows) {
    us.push_back(render(row.u, format));
    w = std::max(w, us.back().size());
  }
  for (std::size_t k = 0; k < us.size(); ++k) {
    const auto& row = r.table.rows[k];
    std::string sign = row.sign > 0 ? "+" : (format == Format::unicode ? "\u2212" : "-");
    out += sign + "  " + us[k] + std::string(w - us[k].size() + 2, ' ') + r.dv_cells[k] + "\n";
  }
  return out;
}

double taylor_check(const Expr& f, const Rational& a, int n, double x) {
  TaylorResult r = taylor(f, a, n);
  double fx = evaluate(f, {{"t", x}});
  double px = evaluate(r.polynomial, {{"x", x}});
  double rem = quad(r.remainder_integrand, "t", a.to_double(), x, 1e-10, {{"x", x}}).value;
  return std::abs(fx - px - rem);
}

Table asymptotic_table(int n) {
  if (n < 1) throw std::invalid_argument("asymptotic order must be positive");
  Expr kernel = apply(Func::exp, X() - T());
  IntegralProblem p = make_problem(kernel / T(), "t");
  Table t = new_table(p, Split{power(T(), Expr(-1)), kernel});
  for (int k = 0; k < n; ++k) t = step(t);
  return t;
}

Expr asymptotic_partial_sum(int n) {
  // [S_n] from x to infinity: the upper end vanishes with e^(x-t)
  Table t = asymptotic_table(n);
  return canonicalize(-substitute(partial_sum(t), "t", X()));
}

double asymptotic_f(double x) {
  return quad(apply(Func::exp, X() - T()) / T(), "t", x, infinity, 1e-10, {{"x", x}}).value;
}

double asymptotic_remainder(double x, int n) {
  Table t = asymptotic_table(n);
  Residual r = residual(t);
  Expr signed_residual = canonicalize(Expr(r.sign) * r.integrand);
  return quad(signed_residual, "t", x, infinity, 1e-10, {{"x", x}}).value;
}

double asymptotic_identity_check(double x, int n) {
  double f = asymptotic_f(x);
  double partial = evaluate(asymptotic_partial_sum(n), {{"x", x}});
  return std::abs(f - partial - asymptotic_remainder(x, n));
}

std::vector<CorpusItem> run_corpus() {
  std::vector<CorpusItem> items;
  auto integrate_item = [&](std::string id, const Expr& e) {
    CorpusItem item;
    item.id = std::move(id);
    try {
      auto tr = auto_integrate(make_problem(e));
      auto rep = verify(tr);
      item.passed = rep.passed;
      item.max_error = rep.max_rel_error;
      item.detail = render(tr.final_antiderivative);
    } catch (const std::exception& err) {
      item.detail = err.what();
    }
    items.push_back(std::move(item));
  };

  for (int n = 1; n <= 4; ++n)
    for (int a = 1; a <= 3; ++a)
      integrate_item("xn_sin.n" + std::to_string(n) + ".a" + std::to_string(a),
                     power(X(), Expr(n)) * apply(Func::sin, Expr(a) * X()));
  integrate_item("x2_exp_sin", parse("x^2*exp(x)*sin(x)"));
  integrate_item("ln_quadratic", parse("ln(x^2+4*x+7)"));

  for (int n = 1; n <= 3; ++n)
    for (int b = 1; b <= 3; ++b) {
      CorpusItem item;
      item.id = "beta.n" + std::to_string(n) + ".b" + std::to_string(b);
      try {
        Expr s = sym("s");
        Expr integrand = power(Expr(1) - s, Expr(n)) * power(s, Expr(b - 1));
        Expr value = definite(make_problem(integrand, "s"), Expr(0), Expr(1));
        Rational nb(1), den(1);
        for (int k = 0; k < b; ++k) nb = nb * Rational(n);
        for (int k = 0; k <= n; ++k) den = den * Rational(b + k);
        Rational want = factorial(n) * nb / den;
        Expr lhs = canonicalize(Expr(nb) * value);
        double numeric = nb.to_double() * quad(integrand, "s", 0, 1).value;
        item.max_error = std::abs(numeric - want.to_double());
        item.passed = equals(lhs, Expr(want)) && item.max_error < 1e-9;
        item.detail = render(lhs) + " vs " + want.str();
      } catch (const std::exception& err) {
        item.detail = err.what();
      }
      items.push_back(std::move(item));
    }

  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  return items;
}

std::string corpus_text(const std::vector<CorpusItem>& items) {
  std::string out;
  char buf[64];
  for (const auto& it : items) {
    std::snprintf(buf, sizeof buf, "%.3e", it.max_error);
    out += it.id + " " + (it.passed ? "PASS" : "FAIL") + " " + buf + "\n";
  }
  return out;
}

std::string corpus_json(const std::vector<CorpusItem>& items) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& it : items)
    arr.push_back({{"id", it.id}, {"status", it.passed ? "pass" : "fail"}, {"max_error", it.max_error},
                   {"detail", it.detail}});
  return arr.dump();
}

}  // namespace partable
