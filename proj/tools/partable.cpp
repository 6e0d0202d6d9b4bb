// partable: tabular integration by parts from the command line.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "partable/calculus.hpp"
#include "partable/http.hpp"
#include "partable/parser.hpp"
#include "partable/registry.hpp"
#include "partable/render.hpp"
#include "partable/service.hpp"
#include "partable/showcase.hpp"

using namespace partable;

namespace {

enum Exit { ok = 0, failed = 1, parse_failed = 2, exhausted = 3, unverified = 4 };

struct Globals {
  std::string format = "ascii";
  bool json = false;
  Format fmt() const { return *format_from_name(format); }
};

// Prints the message and a caret line under the offending span.
int report_parse_error(const std::string& what, const std::string& text, const ParseError& e) {
  auto span = e.span();
  std::cerr << "error: cannot parse " << what << ": " << e.what() << "\n  " << text << "\n  "
            << std::string(span.start, ' ') << std::string(std::max<std::size_t>(1, span.end - span.start), '^')
            << "\n";
  return parse_failed;
}

std::optional<Expr> parse_arg(const std::string& what, const std::string& text, int& code) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    code = report_parse_error(what, text, e);
    return std::nullopt;
  }
}

void collect_tables(const DerivationTrace& tr, json& out) {
  if (tr.table) {
    json t = table_json(*tr.table);
    if (tr.outcome) t["outcome"] = describe_outcome(*tr.outcome);
    out.push_back(t);
  }
  for (const auto& c : tr.children) collect_tables(c, out);
}

struct IntegrateArgs {
  std::string expr;
  std::string var = "x";
  std::string u, dv;
  bool trace = false;
  bool no_retry = false;
  std::string verify_mode = "auto";
  std::optional<std::size_t> max_rows, max_recursion, split_attempts;
};

int run_integrate(const IntegrateArgs& a, const Globals& g) {
  int code = ok;
  auto integrand = parse_arg("integrand", a.expr, code);
  if (!integrand) return code;
  IntegralProblem p = make_problem(*integrand, a.var);

  Policy policy;
  if (a.max_rows) policy.max_rows = *a.max_rows;
  if (a.max_recursion) policy.max_recursion = *a.max_recursion;
  policy.split_attempts = a.split_attempts;
  policy.retry = !a.no_retry;
  if (!a.u.empty()) {
    auto u = parse_arg("--u", a.u, code);
    if (!u) return code;
    policy.forced_u = *u;
  } else if (!a.dv.empty()) {
    auto dv = parse_arg("--dv", a.dv, code);
    if (!dv) return code;
    policy.forced_u = split_from_dv(p, *dv).u;
  }

  DerivationTrace tr;
  try {
    tr = auto_integrate(p, policy);
  } catch (const Exhausted& e) {
    if (g.json) {
      json tables = json::array();
      for (const auto& at : e.attempts()) {
        json t = table_json(at.table);
        t["reason"] = at.reason;
        if (at.outcome) t["outcome"] = describe_outcome(*at.outcome);
        tables.push_back(t);
      }
      std::cout << json{{"error", e.what()}, {"attempts", tables}}.dump(2) << "\n";
    } else {
      if (a.trace) std::cout << render_attempts(e.attempts(), g.fmt());
      std::cerr << "error: " << e.what() << "\n";
    }
    return exhausted;
  }

  auto rep = verify(tr);
  bool passed = rep.passed;
  if (a.verify_mode == "symbolic") passed = rep.symbolic;
  if (a.verify_mode == "numeric") passed = rep.points > 0 && rep.max_rel_error < 1e-9;

  if (g.json) {
    json tables = json::array();
    collect_tables(tr, tables);
    json out = {{"integrand", render(p.integrand)},
                {"var", p.var},
                {"antiderivative", render(tr.final_antiderivative)},
                {"latex", render(tr.final_antiderivative, Format::latex)},
                {"constant", tr.constant},
                {"recursive_tables", tr.recursive_tables()},
                {"verification",
                 {{"symbolic", rep.symbolic}, {"max_rel_error", rep.max_rel_error}, {"passed", passed}}},
                {"tables", tables}};
    if (a.trace) out["trace"] = render_trace(tr, g.fmt());
    std::cout << out.dump(2) << "\n";
  } else {
    if (a.trace) std::cout << render_trace(tr, g.fmt());
    else std::cout << render(tr.final_antiderivative, g.fmt()) << "\n";
  }
  if (!passed) {
    std::cerr << "error: verification failed (difference " << render(rep.difference) << ")\n";
    return unverified;
  }
  return ok;
}

int run_examples_cmd(const Globals& g, const std::string& fault) {
  std::optional<testing::ScopedRuleFault> guard;
  if (!fault.empty()) {
    bool found = false;
    for (Rule r : {Rule::constant, Rule::power, Rule::recip, Rule::exp_linear, Rule::sin_linear, Rule::cos_linear,
                   Rule::shifted_power, Rule::linear_over_quadratic, Rule::atan_rule}) {
      if (rule_name(r) == fault) {
        guard.emplace(r);
        found = true;
      }
    }
    if (!found) {
      std::cerr << "error: unknown rule " << fault << "\n";
      return failed;
    }
  }
  auto items = run_examples();
  bool all = true;
  json arr = json::array();
  for (const auto& it : items) {
    all = all && it.passed;
    if (g.json) arr.push_back({{"id", it.id}, {"status", it.passed ? "PASS" : "FAIL"}, {"detail", it.detail}});
    else std::cout << (it.passed ? "PASS " : "FAIL ") << it.id << "  " << it.detail << "\n";
  }
  if (g.json) std::cout << arr.dump(2) << "\n";
  return all ? ok : failed;
}

int run_taylor(const std::string& f_text, const std::string& a_text, int n, std::optional<double> x,
               const Globals& g) {
  int code = ok;
  auto f = parse_arg("f", f_text, code);
  if (!f) return code;
  auto a = parse_arg("center", a_text, code);
  if (!a) return code;
  if (!a->is_const()) {
    std::cerr << "error: the center must be a rational number\n";
    return failed;
  }
  if (n < 0) {
    std::cerr << "error: order must be non-negative\n";
    return failed;
  }
  TaylorResult r = taylor(*f, a->value(), n);
  std::optional<double> err;
  if (x) err = taylor_check(*f, a->value(), n, *x);
  if (g.json) {
    json out = {{"f", render(*f)},
                {"a", a->value().str()},
                {"n", n},
                {"polynomial", render(r.polynomial)},
                {"polynomial_latex", render(r.polynomial, Format::latex)},
                {"remainder_integrand", render(r.remainder_integrand)},
                {"table", table_json(r.table)},
                {"dv_cells", r.dv_cells},
                {"dv_cells_latex", r.dv_cells_latex}};
    if (err) out["check"] = {{"x", *x}, {"error", *err}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << render_taylor_table(r, g.fmt());
    std::cout << "polynomial: " << render(r.polynomial, g.fmt()) << "\n";
    std::cout << "remainder: " << render(r.remainder_integrand, g.fmt()) << "\n";
    if (err) std::printf("check at x = %g: error %.3e\n", *x, *err);
  }
  return err && *err >= 1e-8 ? failed : ok;
}

int run_asymptotic(double x, int n, const Globals& g) {
  if (!(x > 0) || n < 1) {
    std::cerr << "error: need x > 0 and n >= 1\n";
    return failed;
  }
  Expr partial = asymptotic_partial_sum(n);
  double f = asymptotic_f(x);
  double p = evaluate(partial, {{"x", x}});
  double rem = asymptotic_remainder(x, n);
  double err = std::abs(f - p - rem);
  if (g.json) {
    std::cout << json{{"x", x},           {"n", n},           {"partial_sum", render(partial)},
                      {"f", f},           {"partial_value", p}, {"remainder", rem},
                      {"error", err},     {"table", table_json(asymptotic_table(n))}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << render_table(asymptotic_table(n), g.fmt());
    std::cout << "partial sum: " << render(partial, g.fmt()) << "\n";
    std::printf("f(x) = %.15g\npartial sum = %.15g\nremainder = %.15g\nidentity error = %.3e\n", f, p, rem, err);
  }
  return err < 1e-8 ? ok : failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular integration by parts"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"ascii", "unicode", "latex"}))
      ->capture_default_str();
  app.add_flag("--json", g.json, "Machine-readable output");

  IntegrateArgs ia;
  auto* integ = app.add_subcommand("integrate", "Integrate an expression");
  integ->fallthrough();
  integ->add_option("expr", ia.expr, "Integrand")->required();
  integ->add_option("--var", ia.var, "Variable of integration")->capture_default_str();
  auto* u_opt = integ->add_option("--u", ia.u, "Force u for the first table");
  integ->add_option("--dv", ia.dv, "Force dv for the first table")->excludes(u_opt);
  integ->add_flag("--trace", ia.trace, "Print every table");
  integ->add_flag("--no-retry", ia.no_retry, "Do not fall back on other splits when the forced one fails");
  integ->add_option("--verify-mode", ia.verify_mode, "auto, symbolic or numeric")
      ->check(CLI::IsMember({"auto", "symbolic", "numeric"}))
      ->capture_default_str();
  integ->add_option("--max-rows", ia.max_rows);
  integ->add_option("--max-recursion", ia.max_recursion);
  integ->add_option("--split-attempts", ia.split_attempts);

  std::string fault;
  auto* ex = app.add_subcommand("examples", "Reproduce every worked result");
  ex->fallthrough();
  ex->add_option("--inject-fault", fault, "Corrupt one rule-table entry (testing)")->group("");

  std::string f_text, a_text;
  int order = 0;
  std::optional<double> sample;
  auto* tay = app.add_subcommand("taylor", "Taylor polynomial of f(t) about a");
  tay->fallthrough();
  tay->add_option("f", f_text, "Function of t")->required();
  tay->add_option("a", a_text, "Center (rational)")->required();
  tay->add_option("n", order, "Order")->required();
  tay->add_option("--x", sample, "Check the remainder identity at this x");

  double ax = 0;
  int an = 1;
  auto* asy = app.add_subcommand("asymptotic", "Check the exact expansion of int_x^inf e^(x-t)/t dt");
  asy->fallthrough();
  asy->add_option("x", ax)->required();
  asy->add_option("n", an)->required();

  std::string host = "127.0.0.1";
  int port = default_port;
  std::string log_dir;
  auto* serve = app.add_subcommand("serve", "Run the JSON session service");
  serve->fallthrough();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--log-dir", log_dir, "Append action logs here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*integ) return run_integrate(ia, g);
    if (*ex) return run_examples_cmd(g, fault);
    if (*tay) return run_taylor(f_text, a_text, order, sample, g);
    if (*asy) return run_asymptotic(ax, an, g);
    if (*serve) {
      Service::Options opt;
      if (!log_dir.empty()) opt.log_dir = log_dir;
      Service svc(opt);
      HttpServer server(svc);
      std::cerr << "listening on " << host << ":" << port << "\n";
      return server.listen(host, port) ? ok : failed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failed;
  }
  return failed;
}
