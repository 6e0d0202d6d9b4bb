#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "partable/eval.hpp"
#include "partable/ibp.hpp"

namespace partable {

struct QuadResult {
  double value = 0;
  double error_estimate = 0;
  long evaluations = 0;
};

class QuadError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class NonFinite : public QuadError {
public:
  using QuadError::QuadError;
};
class NoConvergence : public QuadError {
public:
  using QuadError::QuadError;
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();
inline constexpr long quad_budget = 1'000'000;

/// Adaptive Simpson over [a, b]. b = infinity maps t = a + s/(1-s) onto [0, 1)
/// and assumes the integrand decays. `env` binds every other symbol.
QuadResult quad(const Expr& e, std::string_view var, double a, double b, double tol = 1e-10,
                const Bindings& env = {});

/// F(b) - F(a) with F from auto_integrate (constant dropped).
Expr definite(const IntegralProblem& p, const Expr& a, const Expr& b, const Policy& policy = {});

struct TaylorResult {
  Rational a;
  int n = 0;
  Expr polynomial;           // in x
  Expr remainder_integrand;  // in t and x
  Table table;               // pinned table, var t
  /// dv column written the textbook way, "x - t", "-(x - t)^2/2!", ...
  std::vector<std::string> dv_cells;
  std::vector<std::string> dv_cells_latex;
};

/// Pinned table with the textbook dv column.
std::string render_taylor_table(const TaylorResult& r, Format format = Format::ascii);

/// Taylor polynomial of f (an expression in t) about a, built from the
/// table u = -f'(t), dv = -1 with pins making the dv column (x-t)^k/k! up to sign.
TaylorResult taylor(const Expr& f, const Rational& a, int n);

/// |f(x) - P(x) - int_a^x remainder dt|
double taylor_check(const Expr& f, const Rational& a, int n, double x);

/// Engine table for int t^-1 e^(x-t) dt with u = 1/t, after n steps.
Table asymptotic_table(int n);
/// Partial sum sum_{k<=n} (-1)^(k-1) (k-1)!/x^k read off the table's boundary terms.
Expr asymptotic_partial_sum(int n);
/// |f(x) - partial sum - (-1)^n n! int_x^inf t^(-n-1) e^(x-t) dt|, all quadratures numeric.
double asymptotic_identity_check(double x, int n);
/// The remainder term on its own: (-1)^n n! int_x^inf t^(-n-1) e^(x-t) dt.
double asymptotic_remainder(double x, int n);
/// f(x) = int_x^inf t^-1 e^(x-t) dt by quadrature.
double asymptotic_f(double x);

struct CorpusItem {
  std::string id;
  bool passed = false;
  double max_error = 0;
  std::string detail;
};

/// x^n sin(ax), x^2 e^x sin x, ln(x^2+4x+7) and the beta-integral identity, sorted by id.
std::vector<CorpusItem> run_corpus();
std::string corpus_text(const std::vector<CorpusItem>& items);
std::string corpus_json(const std::vector<CorpusItem>& items);

}  // namespace partable
