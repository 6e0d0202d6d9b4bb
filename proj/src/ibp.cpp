#include "partable/ibp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <tuple>

#include "partable/eval.hpp"
#include "partable/terms.hpp"

namespace partable {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_invariant_checks{false};
#else
std::atomic<bool> g_invariant_checks{true};
#endif

constexpr std::size_t kMaxAttempts = 64;

// L, I, P, E, T; constants rank below everything.
int lipet_class(const Expr& e, std::string_view var) {
  if (free_of(e, var)) return 5;
  switch (e.kind()) {
    case Kind::function:
      switch (e.func()) {
        case Func::ln: return 0;
        case Func::atan: return 1;
        case Func::exp: return 3;
        case Func::sin:
        case Func::cos: return 4;
      }
      return 2;
    case Kind::power:
      if (e.base().is(Kind::function)) return lipet_class(e.base(), var);
      return 2;
    case Kind::product: {
      int best = 5;
      for (const auto& f : e.operands()) best = std::min(best, lipet_class(f, var));
      return best;
    }
    default: return 2;
  }
}

struct Pieces {
  Expr coeff = Expr(1);
  std::vector<Expr> parts;  // polynomial group first, then kernels
};

Pieces decompose(const Expr& e, std::string_view var) {
  Pieces out;
  std::vector<Expr> factors = e.is(Kind::product) ? e.operands() : std::vector<Expr>{e};
  std::vector<Expr> poly;
  std::vector<Expr> kernels;
  std::vector<Expr> consts;
  for (const auto& f : factors) {
    if (free_of(f, var)) {
      consts.push_back(f);
    } else if (polynomial_degree(f, var)) {
      poly.push_back(f);
    } else {
      kernels.push_back(f);
    }
  }
  if (!consts.empty()) out.coeff = canonicalize(Expr::mul(consts));
  if (!poly.empty()) out.parts.push_back(canonicalize(Expr::mul(poly)));
  out.parts.insert(out.parts.end(), kernels.begin(), kernels.end());
  return out;
}

Expr product_of(const std::vector<Expr>& parts) {
  if (parts.empty()) return Expr(1);
  return canonicalize(Expr::mul(parts));
}

// A residual written as c * original + R with R strictly simpler than the
// original. Picks the c that leaves the fewest terms in R.
// Node count that ignores numeric coefficients, so 3/2*x weighs the same as x.
std::size_t shape_nodes(const Expr& e) {
  switch (e.kind()) {
    case Kind::constant:
    case Kind::symbol: return 1;
    case Kind::product: {
      std::size_t n = 0, parts = 0;
      for (const auto& f : e.operands()) {
        if (f.is_const()) continue;
        n += shape_nodes(f);
        ++parts;
      }
      if (parts == 0) return 1;
      return parts == 1 ? n : n + 1;
    }
    default: {
      std::size_t n = 1;
      for (const auto& f : e.operands()) n += shape_nodes(f);
      return n;
    }
  }
}

ComplexityScore shape_score(const Expr& e, std::string_view var) {
  ComplexityScore s = complexity_score(e, var);
  s.node_count = shape_nodes(e);
  s.score = static_cast<long>(s.node_count) + 4 * s.max_poly_degree;
  return s;
}

std::optional<std::pair<Rational, Expr>> remainder_match(const Expr& signed_residual, const Expr& orig,
                                                         std::string_view var) {
  Sum a = expand(signed_residual);
  Sum b = expand(orig);
  if (a.empty() || b.empty()) return std::nullopt;
  std::vector<Rational> candidates;
  for (const auto& tb : b) {
    for (const auto& ta : a) {
      if (compare_monomials(ta.factors, tb.factors) == 0) {
        Rational c = ta.coeff / tb.coeff;
        if (!c.is_one() && std::find(candidates.begin(), candidates.end(), c) == candidates.end())
          candidates.push_back(c);
      }
    }
  }
  // Lowest-scoring leftover wins; term count breaks ties.
  const long limit = shape_score(orig, var).score;
  std::optional<std::tuple<long, std::size_t, Rational, Expr>> best;
  for (const auto& c : candidates) {
    Sum r = add(a, scale(b, -c));
    if (r.empty()) continue;
    Expr R = collect(r);
    long sc = shape_score(R, var).score;
    if (sc >= limit) continue;
    if (!best || std::pair(sc, r.size()) < std::pair(std::get<0>(*best), std::get<1>(*best)))
      best = std::make_tuple(sc, r.size(), c, R);
  }
  if (!best) return std::nullopt;
  return std::make_pair(std::get<2>(*best), std::get<3>(*best));
}

// Largest total exponent carried by non-polynomial factors in any term:
// 3 for ln(x)^3, 2 for exp(x)*sin(x). Breaks ties between equal scores.
Rational kernel_weight(const Expr& e) {
  Rational best;
  for (const auto& t : expand(e)) {
    Rational w;
    for (const auto& f : t.factors) {
      if (is_polynomial_factor(f) || f.base.is_const()) continue;
      if (f.exponent.is_const()) w += f.exponent.value().abs();
      else w += Rational(1);
    }
    best = std::max(best, w);
  }
  return best;
}

DerivationTrace rule_trace(const IntegralProblem& p, const RuleHit& hit) {
  DerivationTrace tr;
  tr.problem = p;
  tr.method = DerivationTrace::Method::rule;
  tr.rule = hit.rule;
  tr.antiderivative = hit.antiderivative;
  tr.final_antiderivative = hit.antiderivative;
  return tr;
}

void close_root(DerivationTrace& tr) {
  tr.constant = fresh_constant(Expr::add({tr.antiderivative, tr.problem.integrand}));
  tr.final_antiderivative = tr.antiderivative + sym(tr.constant);
}

void as_child(DerivationTrace& tr) {
  tr.constant.clear();
  tr.final_antiderivative = tr.antiderivative;
}

class Engine {
public:
  explicit Engine(const Policy& policy) : policy_(policy) {}

  std::optional<DerivationTrace> solve(const IntegralProblem& p, std::size_t depth, bool root) {
    if (depth > policy_.max_recursion) return std::nullopt;
    if (p.integrand.is_zero()) return rule_trace(p, RuleHit{Expr(0), Rule::constant});
    if (!(root && policy_.forced_u)) {
      if (auto hit = antiderivative(p.integrand, p.var)) return rule_trace(p, *hit);
    }
    for (const auto& a : ancestors_) {
      if (constant_ratio(p.integrand, a, p.var)) return std::nullopt;
    }
    ancestors_.push_back(p.integrand);
    auto out = solve_splits(p, depth, root);
    ancestors_.pop_back();
    return out;
  }

  std::vector<Attempt> take_attempts() { return std::move(attempts_); }

private:
  std::optional<DerivationTrace> solve_splits(const IntegralProblem& p, std::size_t depth, bool root) {
    if (root && policy_.forced_u) {
      std::vector<Split> forced;
      try {
        forced.push_back(split_from_u(p, *policy_.forced_u));
      } catch (const IbpError& err) {
        note(Attempt{Table{p, {}, {}, std::nullopt}, std::nullopt, err.what()});
      }
      if (auto r = try_splits(p, forced, depth)) return r;
      if (!policy_.retry) return std::nullopt;
      if (auto hit = antiderivative(p.integrand, p.var)) return rule_trace(p, *hit);
    }
    if (p.integrand.is(Kind::sum)) {
      if (auto lin = linearity(p, depth)) return lin;
    }
    std::vector<Split> splits = suggest_splits(p);
    if (policy_.split_attempts && splits.size() > *policy_.split_attempts) splits.resize(*policy_.split_attempts);
    return try_splits(p, splits, depth);
  }

  // Strict pass first (Harder at the first row abandons), then a persistent one.
  std::optional<DerivationTrace> try_splits(const IntegralProblem& p, const std::vector<Split>& splits,
                                            std::size_t depth) {
    for (bool strict : {true, false}) {
      for (const auto& s : splits) {
        if (auto r = run_table(p, s, strict, depth)) return r;
      }
    }
    return std::nullopt;
  }

  std::optional<DerivationTrace> linearity(const IntegralProblem& p, std::size_t depth) {
    DerivationTrace tr;
    tr.problem = p;
    tr.method = DerivationTrace::Method::linearity;
    std::vector<Expr> parts;
    for (const auto& term : p.integrand.operands()) {
      auto child = solve(make_problem(term, p.var), depth + 1, false);
      if (!child) return std::nullopt;
      parts.push_back(child->antiderivative);
      tr.children.push_back(std::move(*child));
    }
    tr.antiderivative = canonicalize(Expr::add(parts));
    tr.final_antiderivative = tr.antiderivative;
    return tr;
  }

  std::optional<DerivationTrace> recurse(const Table& t, const Outcome& o, std::size_t depth) {
    const IntegralProblem sub = o.is(OutcomeKind::simpler) ? o.subproblem : make_problem(o.remainder, t.problem.var);
    auto child = solve(sub, depth + 1, false);
    if (!child) return std::nullopt;
    as_child(*child);
    auto tr = finalize(t, o, std::move(*child));
    as_child(tr);
    return tr;
  }

  std::optional<DerivationTrace> run_table(const IntegralProblem& p, const Split& s, bool strict,
                                           std::size_t depth) {
    Table t;
    try {
      t = new_table(p, s);
    } catch (const IbpError& err) {
      note(Attempt{Table{p, s, {}, std::nullopt}, std::nullopt, err.what()});
      return std::nullopt;
    }
    const bool u_poly = polynomial_degree(s.u, p.var).has_value();
    const Rational weight = kernel_weight(p.integrand);
    std::optional<Outcome> last_outcome;
    std::string reason = "row limit reached";

    while (t.rows.size() < policy_.max_rows) {
      if (++steps_ > policy_.max_total_steps) throw Exhausted("step budget exhausted", take_attempts());
      try {
        t = step(t);
      } catch (const NoRuleForDv& err) {
        reason = err.what();
        break;
      }
      if (t.last().u.node_count() > policy_.max_nodes) {
        reason = "u column grew too large";
        break;
      }
      Outcome o = classify(t);
      last_outcome = o;
      switch (o.kind) {
        case OutcomeKind::zero_row:
        case OutcomeKind::direct: {
          auto tr = finalize(t, o);
          as_child(tr);
          return tr;
        }
        case OutcomeKind::self_similar:
          if (o.remainder.is_zero()) {
            auto tr = finalize(t, o);
            as_child(tr);
            return tr;
          }
          if (auto r = recurse(t, o, depth)) return r;
          break;
        case OutcomeKind::harder:
          if (strict && t.rows.size() == 2) {
            note(Attempt{t, o, "harder than the original at the first row"});
            return std::nullopt;
          }
          break;
        case OutcomeKind::simpler: {
          if (u_poly) break;  // a zero row is coming
          // Equal scores only recurse when the kernel exponents shrink
          // (ln^3 -> ln^2); e^x*sin(x) -> e^x*cos(x) keeps stepping instead.
          bool equal = o.residual_score.score == o.original_score.score;
          if (equal && !(kernel_weight(o.subproblem.integrand) < weight)) break;
          if (auto r = recurse(t, o, depth)) return r;
          break;
        }
        case OutcomeKind::unknown: break;
      }
    }
    note(Attempt{t, last_outcome, reason});
    return std::nullopt;
  }

  void note(Attempt a) {
    if (attempts_.size() < kMaxAttempts) attempts_.push_back(std::move(a));
  }

  const Policy& policy_;
  std::size_t steps_ = 0;
  std::vector<Expr> ancestors_;
  std::vector<Attempt> attempts_;
};

void collect_recursive(const DerivationTrace& tr, bool root, std::size_t& n) {
  if (!root && tr.method == DerivationTrace::Method::table) ++n;
  for (const auto& c : tr.children) collect_recursive(c, false, n);
}

}  // namespace

std::string_view outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::zero_row: return "zero_row";
    case OutcomeKind::direct: return "direct";
    case OutcomeKind::self_similar: return "self_similar";
    case OutcomeKind::simpler: return "simpler";
    case OutcomeKind::harder: return "harder";
    case OutcomeKind::unknown: return "unknown";
  }
  return "unknown";
}

IntegralProblem make_problem(const Expr& integrand, std::string var) {
  return IntegralProblem{canonicalize(integrand), std::move(var)};
}

std::size_t DerivationTrace::recursive_tables() const {
  std::size_t n = 0;
  collect_recursive(*this, true, n);
  return n;
}

std::vector<Split> suggest_splits(const IntegralProblem& p) {
  const Expr& f = p.integrand;
  if (free_of(f, p.var)) return {};
  Pieces pc = decompose(f, p.var);
  const std::size_t n = pc.parts.size();

  struct Candidate {
    Split split;
    int u_class;
    int dv_class;
    std::size_t u_pieces;
  };
  std::vector<Candidate> found;
  if (n >= 2 && n <= 8) {
    const std::size_t all = (std::size_t{1} << n) - 1;
    for (std::size_t mask = 1; mask < all; ++mask) {
      std::vector<Expr> dv_parts;
      std::vector<Expr> u_parts{pc.coeff};
      int u_class = 5;
      int dv_class = -1;
      for (std::size_t i = 0; i < n; ++i) {
        int cls = lipet_class(pc.parts[i], p.var);
        if (mask & (std::size_t{1} << i)) {
          dv_parts.push_back(pc.parts[i]);
          dv_class = std::max(dv_class, cls);
        } else {
          u_parts.push_back(pc.parts[i]);
          u_class = std::min(u_class, cls);
        }
      }
      Expr dv = product_of(dv_parts);
      if (!antiderivative(dv, p.var)) continue;
      found.push_back({Split{product_of(u_parts), dv}, u_class, dv_class, u_parts.size() - 1});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    if (a.u_class != b.u_class) return a.u_class < b.u_class;
    if (a.dv_class != b.dv_class) return a.dv_class > b.dv_class;
    if (a.u_pieces != b.u_pieces) return a.u_pieces < b.u_pieces;
    return a.split.u < b.split.u;
  });
  std::vector<Split> out;
  for (auto& c : found) out.push_back(std::move(c.split));
  out.push_back(Split{f, Expr(1)});
  return out;
}

Split split_from_u(const IntegralProblem& p, const Expr& u) {
  Expr cu = canonicalize(u);
  if (cu.is_zero()) throw SplitMismatch("u must be nonzero");
  return Split{cu, p.integrand / cu};
}

Split split_from_dv(const IntegralProblem& p, const Expr& dv) {
  Expr cdv = canonicalize(dv);
  if (cdv.is_zero()) throw SplitMismatch("dv must be nonzero");
  return Split{p.integrand / cdv, cdv};
}

Table new_table(const IntegralProblem& p, const Split& s) {
  if (!equals(s.u * s.dv, p.integrand)) {
    throw SplitMismatch("u*dv does not reproduce the integrand");
  }
  Table t;
  t.problem = p;
  t.split = s;
  t.rows.push_back(TableRow{1, 1, canonicalize(s.u), canonicalize(s.dv)});
  return t;
}

Table new_table(const IntegralProblem& p, const Split& s, std::vector<Expr> pins) {
  Table t = new_table(p, s);
  t.pin_schedule = std::move(pins);
  return t;
}

void set_invariant_checks(bool on) { g_invariant_checks.store(on); }

Table step(const Table& t) {
  const TableRow& last = t.last();
  const std::size_t k = t.rows.size() - 1;
  const std::string& var = t.problem.var;
  Expr v;
  if (t.pin_schedule && k < t.pin_schedule->size()) {
    try {
      v = antiderivative_with_constant(last.dv, var, (*t.pin_schedule)[k]);
    } catch (const NoAntiderivative&) {
      throw NoRuleForDv("no rule integrates " + render(last.dv));
    }
  } else {
    auto hit = antiderivative(last.dv, var);
    if (!hit) throw NoRuleForDv("no rule integrates " + render(last.dv));
    v = hit->antiderivative;
  }
  Table next = t;
  next.rows.push_back(TableRow{last.index + 1, -last.sign, differentiate(last.u, var), v});
  if (g_invariant_checks.load() && !step_invariant_holds(next)) {
    throw std::logic_error("step invariant violated for " + render(t.problem.integrand));
  }
  return next;
}

Residual residual(const Table& t) {
  if (t.rows.size() < 2) throw TooShort("the table needs at least two rows");
  const TableRow& last = t.last();
  return Residual{last.sign, last.u * last.dv};
}

Expr partial_sum(const Table& t) {
  std::vector<Expr> terms;
  for (std::size_t j = 0; j + 1 < t.rows.size(); ++j) {
    terms.push_back(Expr::mul({Expr(t.rows[j].sign), t.rows[j].u, t.rows[j + 1].dv}));
  }
  return canonicalize(Expr::add(std::move(terms)));
}

bool step_invariant_holds(const Table& t) {
  if (t.rows.size() < 2) return true;
  Residual r = residual(t);
  Expr lhs = Expr::add({differentiate(partial_sum(t), t.problem.var), Expr::mul({Expr(r.sign), r.integrand})});
  return equals(lhs, t.problem.integrand);
}

Outcome classify(const Table& t) {
  Residual r = residual(t);
  const Expr& orig = t.problem.integrand;
  const std::string& var = t.problem.var;
  Expr signed_residual = Expr(r.sign) * r.integrand;

  Outcome o;
  o.original_score = shape_score(orig, var);
  o.residual_score = shape_score(r.integrand, var);

  if (t.last().u.is_zero()) {
    o.kind = OutcomeKind::zero_row;
    return o;
  }
  if (auto hit = antiderivative(signed_residual, var)) {
    o.kind = OutcomeKind::direct;
    o.residual_antiderivative = hit->antiderivative;
    return o;
  }
  if (auto c = constant_ratio(signed_residual, orig, var)) {
    if (c->is_one()) {
      o.kind = OutcomeKind::harder;
      o.diagnostic = "residual equals the original integral (c = 1); the identity carries no information";
      return o;
    }
    o.kind = OutcomeKind::self_similar;
    o.c = *c;
    o.remainder = Expr(0);
    return o;
  }
  if (auto m = remainder_match(signed_residual, orig, var)) {
    o.kind = OutcomeKind::self_similar;
    o.c = m->first;
    o.remainder = m->second;
    return o;
  }
  if (o.residual_score.score > o.original_score.score) {
    o.kind = OutcomeKind::harder;
    return o;
  }
  o.kind = OutcomeKind::simpler;
  o.subproblem = IntegralProblem{r.integrand, var};
  o.sign = r.sign;
  return o;
}

DerivationTrace finalize(const Table& t, const Outcome& o) {
  Expr S = partial_sum(t);
  DerivationTrace tr;
  tr.problem = t.problem;
  tr.method = DerivationTrace::Method::table;
  tr.table = t;
  tr.outcome = o;
  switch (o.kind) {
    case OutcomeKind::zero_row: tr.antiderivative = S; break;
    case OutcomeKind::direct: tr.antiderivative = S + o.residual_antiderivative; break;
    case OutcomeKind::self_similar: {
      if (o.c.is_one()) throw SelfSimilarSingular("c = 1: the identity I = S + I cannot be solved for I");
      Expr rest(0);
      if (!o.remainder.is_zero()) {
        auto hit = antiderivative(o.remainder, t.problem.var);
        if (!hit) throw NotFinalizable("the remainder integral needs its own derivation");
        DerivationTrace child = rule_trace(make_problem(o.remainder, t.problem.var), *hit);
        tr.children.push_back(child);
        rest = hit->antiderivative;
      }
      tr.antiderivative = (S + rest) / Expr(Rational(1) - o.c);
      break;
    }
    case OutcomeKind::simpler: throw NotFinalizable("a simpler residual needs the subproblem's antiderivative");
    case OutcomeKind::harder: throw NotFinalizable("the residual is harder than the original");
    case OutcomeKind::unknown: throw NotFinalizable("no outcome to finalize");
  }
  close_root(tr);
  return tr;
}

DerivationTrace finalize(const Table& t, const Outcome& o, DerivationTrace child) {
  const bool with_remainder = o.is(OutcomeKind::self_similar) && !o.remainder.is_zero();
  if (!o.is(OutcomeKind::simpler) && !with_remainder) return finalize(t, o);
  if (with_remainder && o.c.is_one()) throw SelfSimilarSingular("c = 1");
  Expr S = partial_sum(t);
  DerivationTrace tr;
  tr.problem = t.problem;
  tr.method = DerivationTrace::Method::table;
  tr.table = t;
  tr.outcome = o;
  if (with_remainder) {
    tr.antiderivative = (S + child.antiderivative) / Expr(Rational(1) - o.c);
  } else {
    tr.antiderivative = S + Expr(o.sign) * child.antiderivative;
  }
  tr.children.push_back(std::move(child));
  close_root(tr);
  return tr;
}

DerivationTrace auto_integrate(const IntegralProblem& p, const Policy& policy) {
  IntegralProblem cp = make_problem(p.integrand, p.var);
  Engine engine(policy);
  auto tr = engine.solve(cp, 0, true);
  if (!tr) throw Exhausted("no split succeeded within the policy limits", engine.take_attempts());
  tr->attempts = engine.take_attempts();
  close_root(*tr);
  return std::move(*tr);
}

std::string fresh_constant(const Expr& e) {
  auto used = symbols_of(e);
  auto taken = [&](const std::string& s) { return std::find(used.begin(), used.end(), s) != used.end(); };
  if (!taken("C")) return "C";
  for (int i = 0;; ++i) {
    std::string name = "C" + std::to_string(i);
    if (!taken(name)) return name;
  }
}

VerificationReport verify_antiderivative(const Expr& F, const IntegralProblem& p) {
  VerificationReport rep;
  Expr dF = differentiate(F, p.var);
  rep.difference = canonicalize(dF - p.integrand);
  rep.symbolic = rep.difference.is_zero();

  Bindings env;
  double fixed = 0.7;
  for (const auto& s : symbols_of(Expr::add({F, p.integrand}))) {
    if (s == p.var) continue;
    env[s] = fixed;
    fixed += 0.35;
  }
  for (int k = 0; k < 20; ++k) {
    env[p.var] = 0.1 + 2.9 * (k + 0.5) / 20.0;
    double want = evaluate(p.integrand, env);
    if (!std::isfinite(want)) continue;
    double got = evaluate(dF, env);
    double err = std::isfinite(got) ? std::abs(got - want) / std::max(1.0, std::abs(want))
                                    : std::numeric_limits<double>::infinity();
    rep.max_rel_error = std::max(rep.max_rel_error, err);
    ++rep.points;
  }
  rep.passed = rep.symbolic || (rep.points > 0 && rep.max_rel_error < 1e-9);
  return rep;
}

VerificationReport verify(const DerivationTrace& trace) {
  return verify_antiderivative(trace.final_antiderivative, trace.problem);
}

}  // namespace partable
