#include "partable/terms.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

#include "partable/canonical.hpp"

namespace partable {

namespace {

constexpr std::size_t kMaxExpandedTerms = 50000;
constexpr long kMaxFoldedExponent = 4096;

std::strong_ordering compare_factor(const Factor& a, const Factor& b) {
  if (auto c = a.base <=> b.base; c != 0) return c;
  return a.exponent <=> b.exponent;
}

struct MonomialLess {
  bool operator()(const std::vector<Factor>& a, const std::vector<Factor>& b) const {
    return compare_monomials(a, b) < 0;
  }
};

Expr add_exponents(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr(a.value() + b.value());
  return canonicalize(Expr::add({a, b}));
}

Expr scale_exponent(const Expr& e, const Rational& k) {
  if (e.is_const()) return Expr(e.value() * k);
  return canonicalize(Expr::mul({Expr(k), e}));
}

/// Inserts base^exponent, merging with an existing factor on the same base.
void merge_factor(std::vector<Factor>& fs, const Factor& f) {
  auto it = std::lower_bound(fs.begin(), fs.end(), f.base,
                             [](const Factor& x, const Expr& b) { return x.base < b; });
  if (it != fs.end() && it->base == f.base) {
    it->exponent = add_exponents(it->exponent, f.exponent);
  } else {
    fs.insert(it, f);
  }
}

Rational checked_pow(const Rational& base, const mpz_class& exponent) {
  if (!exponent.fits_slong_p() || abs(exponent) > kMaxFoldedExponent)
    throw std::overflow_error("exponent too large to fold");
  return base.pow(exponent.get_si());
}

/// Splits c^r (c > 0) into a rational multiplier and factors n^f with integer
/// n > 1 and f in (0, 1).
void const_power(const Rational& c, const Rational& r, Rational& mult, std::vector<Factor>& out) {
  auto emit_one = [&](const mpz_class& n, const Rational& e) {
    if (n == 1 || e.is_zero()) return;
    mpz_class fl = e.floor();
    Rational frac = e - Rational(fl, 1);
    mult *= checked_pow(Rational(n, 1), fl);
    if (frac.is_zero()) return;
    if (frac.den().fits_ulong_p()) {
      if (auto root = exact_root(n, frac.den().get_ui())) {
        mult *= checked_pow(Rational(*root, 1), frac.num());
        return;
      }
    }
    out.push_back({Expr(Rational(n, 1)), Expr(frac)});
  };
  // Small prime factors are split off so that 8^(1/2) and 2*2^(1/2) agree.
  auto emit = [&](mpz_class n, const Rational& e) {
    if (e.is_integer()) return emit_one(n, e);
    for (unsigned long p = 2; p < 1000 && p * p <= n; ++p) {
      long k = 0;
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        n /= p;
        ++k;
      }
      if (k) emit_one(mpz_class(p), e * Rational(k));
    }
    emit_one(n, e);
  };
  emit(c.num(), r);
  emit(c.den(), -r);
}

Sum sum_power(const Sum& s, long n);
Sum normalize(Term t);

// S = y^d + tail, S a sum in the single symbol y with rational coefficients.
struct MonicDivisor {
  Expr y;
  long d = 0;
  Sum tail;
};

std::optional<MonicDivisor> monic_divisor(const Expr& s) {
  if (!s.is(Kind::sum)) return std::nullopt;
  MonicDivisor out;
  Rational lead;
  Sum all;
  for (const auto& op : s.operands()) {
    Rational c = 1;
    Expr m = op;
    if (m.is(Kind::product)) {
      if (m.operands().size() != 2 || !m.operands()[0].is_const()) return std::nullopt;
      c = m.operands()[0].value();
      m = m.operands()[1];
    }
    if (m.is_const()) {
      all = add(all, Sum{Term{m.value(), {}}});
      continue;
    }
    long k = 1;
    if (m.is(Kind::power)) {
      if (!m.exponent().is_const() || !m.exponent().value().is_integer() || !m.exponent().value().is_positive())
        return std::nullopt;
      auto kk = m.exponent().value().to_long();
      if (!kk) return std::nullopt;
      k = *kk;
      m = m.base();
    }
    if (!m.is(Kind::symbol)) return std::nullopt;
    if (out.d == 0) out.y = m;
    else if (!(out.y == m)) return std::nullopt;
    if (k > out.d) {
      out.d = k;
      lead = c;
    }
    all = add(all, Sum{Term{c, {Factor{m, Expr(k)}}}});
  }
  if (out.d == 0 || !lead.is_one()) return std::nullopt;
  out.tail = add(all, Sum{Term{-1, {Factor{out.y, Expr(out.d)}}}});
  return out;
}

// y^m * S^-k with m >= deg S becomes y^(m-d) * S^(1-k) - y^(m-d) * tail * S^-k,
// so numerators end up reduced modulo their denominators.
std::optional<Sum> reduce_quotient(const Term& t) {
  for (const auto& f : t.factors) {
    if (!f.base.is(Kind::sum) || !f.exponent.is_const()) continue;
    const Rational& k = f.exponent.value();
    if (!k.is_integer() || !k.is_negative()) continue;
    auto div = monic_divisor(f.base);
    if (!div) continue;
    auto y = std::find_if(t.factors.begin(), t.factors.end(), [&](const Factor& g) { return g.base == div->y; });
    if (y == t.factors.end() || !is_polynomial_factor(*y) || y->exponent.value() < Rational(div->d)) continue;
    Term lowered = t;
    merge_factor(lowered.factors, Factor{div->y, Expr(-div->d)});
    Term cancelled = lowered;
    merge_factor(cancelled.factors, Factor{f.base, Expr(1)});
    return add(normalize(std::move(cancelled)), scale(multiply(normalize(std::move(lowered)), div->tail), -1));
  }
  return std::nullopt;
}

/// Folds constant bases, drops trivial factors, and multiplies out sums raised
/// to positive integer powers.
Sum normalize(Term t) {
  if (t.coeff.is_zero()) return {};
  std::vector<Factor> pending = std::move(t.factors);
  std::vector<Factor> kept;
  std::vector<Factor> to_expand;
  Rational coeff = t.coeff;
  for (int round = 0; !pending.empty(); ++round) {
    if (round > 16) throw std::logic_error("constant power normalization did not settle");
    std::vector<Factor> merged = kept;
    for (const auto& f : pending) merge_factor(merged, f);
    pending.clear();
    kept.clear();
    for (auto& f : merged) {
      if (f.exponent.is_zero()) continue;
      if (f.base.is_const() && f.exponent.is_const()) {
        const Rational& c = f.base.value();
        const Rational& r = f.exponent.value();
        if (c.is_one()) continue;
        if (c.is_zero()) {
          if (r.is_positive()) return {};
          kept.push_back(f);
          continue;
        }
        if (r.is_integer()) {
          coeff *= checked_pow(c, r.num());
          continue;
        }
        if (c.is_negative()) {
          kept.push_back(f);
          continue;
        }
        std::vector<Factor> split;
        const_power(c, r, coeff, split);
        // A split that reproduces the factor is already normal.
        if (split.size() == 1 && split.front() == f) {
          kept.push_back(f);
        } else {
          pending.insert(pending.end(), split.begin(), split.end());
        }
        continue;
      }
      if (f.base.is(Kind::sum) && f.exponent.is_const() && f.exponent.value().is_integer() &&
          f.exponent.value().is_positive()) {
        to_expand.push_back(f);
        continue;
      }
      kept.push_back(f);
    }
  }
  if (coeff.is_zero()) return {};
  Term whole{coeff, std::move(kept)};
  Sum result;
  if (auto reduced = reduce_quotient(whole)) {
    result = std::move(*reduced);
  } else {
    result.push_back(std::move(whole));
  }
  for (const auto& f : to_expand) {
    auto n = f.exponent.value().to_long();
    if (!n) throw std::overflow_error("exponent too large to expand");
    result = multiply(result, sum_power(expand(f.base), *n));
  }
  return result;
}

Term multiply_raw(const Term& a, const Term& b) {
  Term t{a.coeff * b.coeff, a.factors};
  for (const auto& f : b.factors) merge_factor(t.factors, f);
  return t;
}

Sum from_map(std::map<std::vector<Factor>, Rational, MonomialLess>& acc) {
  Sum out;
  out.reserve(acc.size());
  for (auto& [fs, c] : acc) {
    if (!c.is_zero()) out.push_back(Term{c, fs});
  }
  return out;
}

Sum sum_power(const Sum& s, long n) {
  Sum result{Term{1, {}}};
  Sum base = s;
  while (n > 0) {
    if (n & 1) result = multiply(result, base);
    n >>= 1;
    if (n > 0) base = multiply(base, base);
  }
  return result;
}

Sum power_of_term(const Term& t, const Rational& n) {
  Term out{checked_pow(t.coeff, n.num()), {}};
  for (const auto& f : t.factors) out.factors.push_back({f.base, scale_exponent(f.exponent, n)});
  return normalize(std::move(out));
}

Sum atom(const Expr& base, const Expr& exponent, const Rational& coeff = 1) {
  return normalize(Term{coeff, {Factor{base, exponent}}});
}

Sum one() { return Sum{Term{1, {}}}; }

Sum expand_power(const Expr& raw_base, const Expr& exponent) {
  Sum sb = expand(raw_base);
  if (!exponent.is_const()) {
    if (sb.empty()) return atom(Expr(0), exponent);
    return atom(collect(sb), exponent);
  }
  const Rational& r = exponent.value();
  if (r.is_zero()) return one();
  if (sb.empty()) {
    if (r.is_positive()) return {};
    return atom(Expr(0), exponent);
  }
  if (r.is_integer()) {
    if (sb.size() == 1) return power_of_term(sb.front(), r);
    if (r.is_positive()) {
      auto n = r.to_long();
      if (!n || *n > kMaxFoldedExponent) throw std::overflow_error("exponent too large to expand");
      return sum_power(sb, *n);
    }
    // Negative powers of sums keep a monic base; the content moves out.
    Rational content = sb.back().coeff;
    Expr base = collect(scale(sb, content.reciprocal()));
    return atom(base, exponent, checked_pow(content, r.num()));
  }
  // Fractional exponent.
  if (sb.size() == 1) {
    const Term& t = sb.front();
    bool positive_bases = std::all_of(t.factors.begin(), t.factors.end(), [](const Factor& f) {
      return f.base.is(Kind::symbol) || (f.base.is_const() && f.base.value().is_positive());
    });
    if (t.coeff.is_positive() && positive_bases) {
      Term scaled{1, {}};
      const_power(t.coeff, r, scaled.coeff, scaled.factors);
      for (const auto& f : t.factors) scaled.factors.push_back({f.base, scale_exponent(f.exponent, r)});
      Term merged{scaled.coeff, {}};
      for (const auto& f : scaled.factors) merge_factor(merged.factors, f);
      return normalize(std::move(merged));
    }
  }
  Rational content = sb.back().coeff;
  if (content.is_positive() && !content.is_one()) {
    Term t{1, {}};
    const_power(content, r, t.coeff, t.factors);
    merge_factor(t.factors, Factor{collect(scale(sb, content.reciprocal())), exponent});
    return normalize(std::move(t));
  }
  return atom(collect(sb), exponent);
}

std::optional<Rational> fold_function(Func f, const Expr& arg) {
  if (!arg.is_const()) return std::nullopt;
  const Rational& v = arg.value();
  switch (f) {
    case Func::ln:
      if (v.is_one()) return Rational(0);
      break;
    case Func::exp:
    case Func::cos:
      if (v.is_zero()) return Rational(1);
      break;
    case Func::sin:
    case Func::atan:
      if (v.is_zero()) return Rational(0);
      break;
  }
  return std::nullopt;
}

/// Add-ordering key: compares the term without its leading rational
/// coefficient first, then the coefficient.
struct AddKey {
  Rational coeff = 1;
  std::vector<Expr> rest;
};

AddKey add_key(const Expr& e) {
  AddKey k;
  if (e.is_const()) {
    k.coeff = e.value();
  } else if (e.is(Kind::product) && e.operands().front().is_const()) {
    k.coeff = e.operands().front().value();
    k.rest.assign(e.operands().begin() + 1, e.operands().end());
  } else if (e.is(Kind::product)) {
    k.rest = e.operands();
  } else {
    k.rest = {e};
  }
  return k;
}

bool add_less(const Expr& a, const Expr& b) {
  AddKey ka = add_key(a);
  AddKey kb = add_key(b);
  std::size_t n = std::min(ka.rest.size(), kb.rest.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = ka.rest[i] <=> kb.rest[i]; c != 0) return c < 0;
  }
  if (ka.rest.size() != kb.rest.size()) return ka.rest.size() < kb.rest.size();
  return ka.coeff < kb.coeff;
}

Expr build_mul(std::vector<Expr> parts) {
  if (parts.empty()) return Expr(1);
  if (parts.size() == 1) return parts.front();
  std::sort(parts.begin(), parts.end());
  return Expr::mul(std::move(parts)).mark_canonical();
}

Expr build_add(std::vector<Expr> items) {
  if (items.empty()) return Expr(0);
  if (items.size() == 1) return items.front();
  std::sort(items.begin(), items.end(), add_less);
  return Expr::add(std::move(items)).mark_canonical();
}

}  // namespace

std::strong_ordering compare_monomials(const std::vector<Factor>& a, const std::vector<Factor>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare_factor(a[i], b[i]); c != 0) return c;
  }
  return a.size() <=> b.size();
}

Sum add(const Sum& a, const Sum& b) {
  Sum out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size()) {
      out.push_back(a[i++]);
    } else if (i == a.size()) {
      out.push_back(b[j++]);
    } else {
      auto c = compare_monomials(a[i].factors, b[j].factors);
      if (c < 0) {
        out.push_back(a[i++]);
      } else if (c > 0) {
        out.push_back(b[j++]);
      } else {
        Rational sum = a[i].coeff + b[j].coeff;
        if (!sum.is_zero()) out.push_back(Term{sum, a[i].factors});
        ++i;
        ++j;
      }
    }
  }
  return out;
}

Sum multiply(const Sum& a, const Sum& b) {
  std::map<std::vector<Factor>, Rational, MonomialLess> acc;
  for (const auto& x : a) {
    for (const auto& y : b) {
      for (auto& t : normalize(multiply_raw(x, y))) {
        auto [it, inserted] = acc.try_emplace(std::move(t.factors), t.coeff);
        if (!inserted) it->second += t.coeff;
      }
      if (acc.size() > kMaxExpandedTerms) throw std::length_error("expansion too large");
    }
  }
  return from_map(acc);
}

Sum scale(const Sum& s, const Rational& k) {
  if (k.is_zero()) return {};
  Sum out = s;
  for (auto& t : out) t.coeff *= k;
  return out;
}

Sum expand(const Expr& e) {
  switch (e.kind()) {
    case Kind::constant:
      if (e.is_zero()) return {};
      return Sum{Term{e.value(), {}}};
    case Kind::symbol:
      return Sum{Term{1, {Factor{e, Expr(1)}}}};
    case Kind::sum: {
      Sum acc;
      for (const auto& op : e.operands()) acc = add(acc, expand(op));
      return acc;
    }
    case Kind::product: {
      Sum acc = one();
      for (const auto& op : e.operands()) {
        acc = multiply(acc, expand(op));
        if (acc.empty()) break;
      }
      return acc;
    }
    case Kind::function: {
      Expr arg = canonicalize(e.arg());
      if (auto v = fold_function(e.func(), arg)) {
        if (v->is_zero()) return {};
        return Sum{Term{*v, {}}};
      }
      return Sum{Term{1, {Factor{Expr::fun(e.func(), arg).mark_canonical(), Expr(1)}}}};
    }
    case Kind::power:
      return expand_power(e.base(), canonicalize(e.exponent()));
  }
  throw std::logic_error("unknown expression kind");
}

bool is_polynomial_factor(const Factor& f) {
  return f.base.is(Kind::symbol) && f.exponent.is_const() && f.exponent.value().is_integer() &&
         f.exponent.value().is_positive();
}

Expr factor_expr(const Factor& f) {
  if (f.exponent.is_one()) return f.base;
  return Expr::pow(f.base, f.exponent).mark_canonical();
}

Expr monomial_expr(const Term& t) {
  std::vector<Expr> parts;
  if (!t.coeff.is_one() || t.factors.empty()) parts.emplace_back(t.coeff);
  for (const auto& f : t.factors) parts.push_back(factor_expr(f));
  return build_mul(std::move(parts));
}

Expr collect(const Sum& s) {
  struct Group {
    std::vector<Term> whole;
    std::vector<Term> poly;
  };
  std::map<std::vector<Factor>, Group, MonomialLess> groups;
  for (const auto& t : s) {
    Term poly{t.coeff, {}};
    std::vector<Factor> kernel;
    for (const auto& f : t.factors) {
      (is_polynomial_factor(f) ? poly.factors : kernel).push_back(f);
    }
    auto& g = groups[kernel];
    g.whole.push_back(t);
    g.poly.push_back(std::move(poly));
  }
  std::vector<Expr> items;
  for (const auto& [kernel, g] : groups) {
    if (kernel.empty() || g.whole.size() == 1) {
      for (const auto& t : g.whole) items.push_back(monomial_expr(t));
      continue;
    }
    std::vector<Expr> poly_terms;
    for (const auto& t : g.poly) poly_terms.push_back(monomial_expr(t));
    std::vector<Expr> parts{build_add(std::move(poly_terms))};
    for (const auto& f : kernel) parts.push_back(factor_expr(f));
    items.push_back(build_mul(std::move(parts)));
  }
  return build_add(std::move(items));
}

}  // namespace partable
