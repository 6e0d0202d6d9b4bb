#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "partable/calculus.hpp"
#include "partable/canonical.hpp"
#include "partable/expr.hpp"
#include "partable/render.hpp"

namespace partable {

struct IntegralProblem {
  Expr integrand;
  std::string var = "x";
};

/// Builds a problem, canonicalizing the integrand.
IntegralProblem make_problem(const Expr& integrand, std::string var = "x");

struct Split {
  Expr u;
  Expr dv;  // the integrand of dv, i.e. v0
};

struct TableRow {
  int index = 1;
  int sign = 1;
  Expr u;
  Expr dv;
};

struct Table {
  IntegralProblem problem;
  Split split;
  std::vector<TableRow> rows;
  /// pins[k] is the constant added by the k-th integration (k = 0 builds row 2).
  std::optional<std::vector<Expr>> pin_schedule;

  const TableRow& last() const { return rows.back(); }
};

enum class OutcomeKind { zero_row, direct, self_similar, simpler, harder, unknown };

std::string_view outcome_name(OutcomeKind k);

struct Outcome {
  OutcomeKind kind = OutcomeKind::unknown;
  Expr residual_antiderivative;  // direct
  Rational c;                    // self_similar
  /// self_similar only: signed residual - c * integrand. Zero when the residual
  /// is an exact copy; otherwise a strictly simpler leftover integral.
  Expr remainder;
  IntegralProblem subproblem;  // simpler
  int sign = 1;                // simpler: residual sign
  ComplexityScore original_score;
  ComplexityScore residual_score;
  std::string diagnostic;

  bool is(OutcomeKind k) const { return kind == k; }
};

class IbpError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class SplitMismatch : public IbpError {
public:
  using IbpError::IbpError;
};
class NoRuleForDv : public IbpError {
public:
  using IbpError::IbpError;
};
class TooShort : public IbpError {
public:
  using IbpError::IbpError;
};
class SelfSimilarSingular : public IbpError {
public:
  using IbpError::IbpError;
};
class NotFinalizable : public IbpError {
public:
  using IbpError::IbpError;
};

/// A table the engine gave up on, kept for diagnostics and --trace output.
struct Attempt {
  Table table;
  std::optional<Outcome> outcome;
  std::string reason;
};

struct DerivationTrace {
  enum class Method { rule, linearity, table };

  IntegralProblem problem;
  Method method = Method::table;
  std::optional<Rule> rule;        // method == rule
  std::optional<Table> table;      // method == table
  std::optional<Outcome> outcome;  // method == table
  /// Simpler recursion, self-similar remainder, or linearity parts.
  std::vector<DerivationTrace> children;
  /// Antiderivative without a constant of integration.
  Expr antiderivative;
  /// antiderivative + constant (root traces only; equal to antiderivative below the root).
  Expr final_antiderivative;
  std::string constant;
  std::vector<Attempt> attempts;

  /// Number of tables in this trace that were entered by recursion.
  std::size_t recursive_tables() const;
};

class Exhausted : public IbpError {
public:
  Exhausted(const std::string& what, std::vector<Attempt> attempts)
      : IbpError(what), attempts_(std::move(attempts)) {}
  const std::vector<Attempt>& attempts() const { return attempts_; }

private:
  std::vector<Attempt> attempts_;
};

struct Policy {
  std::size_t max_rows = 12;
  std::size_t max_recursion = 32;
  /// How many suggested splits to try per problem; empty means all.
  std::optional<std::size_t> split_attempts;
  /// Hard cap on table steps across the whole derivation.
  std::size_t max_total_steps = 1500;
  /// Tables whose u entry grows past this many nodes are abandoned.
  std::size_t max_nodes = 2500;
  /// Force the root split (u given; dv is integrand / u).
  std::optional<Expr> forced_u;
  /// When the forced split fails, fall back on the suggestions.
  bool retry = true;
};

/// LIPET-ranked candidate splits.
std::vector<Split> suggest_splits(const IntegralProblem& p);

/// Split with u given and dv = integrand / u.
Split split_from_u(const IntegralProblem& p, const Expr& u);
/// Split with dv given and u = integrand / dv.
Split split_from_dv(const IntegralProblem& p, const Expr& dv);

Table new_table(const IntegralProblem& p, const Split& s);
Table new_table(const IntegralProblem& p, const Split& s, std::vector<Expr> pins);
Table step(const Table& t);

struct Residual {
  int sign = 1;
  Expr integrand;
};
Residual residual(const Table& t);

/// S_n: the alternating sum of diagonal products u_j * v_j.
Expr partial_sum(const Table& t);
/// differentiate(S_n) + sign * residual == integrand.
bool step_invariant_holds(const Table& t);
/// Checks the step invariant inside every step() call. On by default in debug builds.
void set_invariant_checks(bool on);

Outcome classify(const Table& t);

/// Closes a table. ZeroRow, Direct and exact SelfSimilar need nothing else;
/// Simpler and SelfSimilar-with-remainder need the child trace for the leftover
/// integral (or a remainder that hits the rule table).
DerivationTrace finalize(const Table& t, const Outcome& o);
DerivationTrace finalize(const Table& t, const Outcome& o, DerivationTrace child);

DerivationTrace auto_integrate(const IntegralProblem& p, const Policy& policy = {});

struct VerificationReport {
  bool symbolic = false;
  double max_rel_error = 0;
  int points = 0;
  bool passed = false;
  /// differentiate(F) - integrand, canonical.
  Expr difference;
};

VerificationReport verify(const DerivationTrace& trace);
VerificationReport verify_antiderivative(const Expr& F, const IntegralProblem& p);

/// Fresh constant name ("C", or C0, C1, ... if C is taken).
std::string fresh_constant(const Expr& e);

/// Three-column table, residual integral underneath.
std::string render_table(const Table& t, Format format = Format::ascii);
/// Every table of a trace, children after their parent.
std::string render_trace(const DerivationTrace& trace, Format format = Format::ascii);
std::string render_residual(const Table& t, Format format = Format::ascii);
/// Abandoned tables, each with the identity it still proves.
std::string render_attempts(const std::vector<Attempt>& attempts, Format format = Format::ascii);
/// "self_similar c = -9/4", "harder (score 19 vs original 14)", ...
std::string describe_outcome(const Outcome& o);

}  // namespace partable
