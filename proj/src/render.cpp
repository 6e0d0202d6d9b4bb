#include "partable/render.hpp"

#include <algorithm>
#include <vector>

#include "partable/canonical.hpp"

namespace partable {

namespace {

enum Prec : int { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

struct Out {
  std::string text;
  int prec;
};

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string superscript(const std::string& digits) {
  static const char* const kDigits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  std::string out;
  for (char c : digits) {
    if (c == '-') out += "⁻";
    else out += kDigits[c - '0'];
  }
  return out;
}

bool negative_exponent(const Expr& e) {
  return e.is(Kind::power) && e.exponent().is_const() && e.exponent().value().is_negative();
}

bool is_negative_term(const Expr& e) {
  if (e.is_const()) return e.value().is_negative();
  if (e.is(Kind::product) && !e.operands().empty() && e.operands().front().is_const())
    return e.operands().front().value().is_negative();
  return false;
}

Expr negate_raw(const Expr& e) {
  if (e.is_const()) return Expr(-e.value());
  std::vector<Expr> ops = e.operands();
  Rational c = -ops.front().value();
  if (c.is_one()) {
    ops.erase(ops.begin());
    if (ops.size() == 1) return ops.front();
  } else {
    ops.front() = Expr(c);
  }
  return Expr::mul(std::move(ops));
}

class Printer {
public:
  explicit Printer(Format f) : fmt_(f) {}

  Out print(const Expr& e) {
    switch (e.kind()) {
      case Kind::constant: return constant(e.value());
      case Kind::symbol: return {e.name(), kAtom};
      case Kind::function: return function(e);
      case Kind::power:
        if (negative_exponent(e)) return product(1, {e});
        return power(e);
      case Kind::product: {
        const auto& ops = e.operands();
        if (ops.front().is_const()) {
          return product(ops.front().value(), {ops.begin() + 1, ops.end()});
        }
        return product(1, ops);
      }
      case Kind::sum: return sum(e);
    }
    return {"?", kAtom};
  }

private:
  bool latex() const { return fmt_ == Format::latex; }
  std::string minus() const { return fmt_ == Format::unicode ? "−" : "-"; }
  std::string times() const {
    switch (fmt_) {
      case Format::ascii: return "*";
      case Format::unicode: return "·";
      case Format::latex: return " ";
    }
    return "*";
  }

  std::string wrap(const Out& o, int min_prec) const {
    if (o.prec >= min_prec) return o.text;
    if (latex()) return "\\left(" + o.text + "\\right)";
    return "(" + o.text + ")";
  }

  Out constant(const Rational& v) {
    std::string sign = v.is_negative() ? minus() : "";
    Rational a = v.abs();
    if (a.is_integer()) return {sign + a.num().get_str(), sign.empty() ? kAtom : kUnary};
    if (latex()) {
      return {sign + "\\frac{" + a.num().get_str() + "}{" + a.den().get_str() + "}",
              sign.empty() ? kAtom : kUnary};
    }
    return {sign + a.num().get_str() + "/" + a.den().get_str(), sign.empty() ? kProduct : kUnary};
  }

  Out function(const Expr& e) {
    std::string arg = print(e.arg()).text;
    if (!latex()) return {std::string(func_name(e.func())) + "(" + arg + ")", kAtom};
    switch (e.func()) {
      case Func::exp: return {"e^{" + arg + "}", kPower};
      case Func::atan: return {"\\arctan(" + arg + ")", kAtom};
      default: return {"\\" + std::string(func_name(e.func())) + "(" + arg + ")", kAtom};
    }
  }

  Out power(const Expr& e) {
    std::string base = wrap(print(e.base()), kAtom);
    const Expr& x = e.exponent();
    if (latex()) return {base + "^{" + print(x).text + "}", kPower};
    if (x.is_const() && x.value().is_integer()) {
      std::string digits = x.value().num().get_str();
      if (fmt_ == Format::unicode) return {base + superscript(digits), kPower};
      return {base + "^" + digits, kPower};
    }
    return {base + "^" + wrap(print(x), kAtom), kPower};
  }

  Out product(Rational c, const std::vector<Expr>& factors) {
    std::vector<Expr> num;
    std::vector<Expr> den;
    for (const auto& f : factors) {
      if (negative_exponent(f)) {
        Rational r = -f.exponent().value();
        den.push_back(r.is_one() ? f.base() : Expr::pow(f.base(), Expr(r)));
      } else {
        num.push_back(f);
      }
    }
    // Polynomial groups read first: (x^2 - 3*x)*sin(x).
    std::stable_partition(num.begin(), num.end(), [](const Expr& f) { return f.is(Kind::sum); });
    bool negative = c.is_negative();
    c = c.abs();
    std::string sign = negative ? minus() : "";

    if (!latex() && c.is_one() && den.empty() && num.size() == 1) {
      Out only = print(num.front());
      if (!negative) return only;
      return {sign + wrap(only, kPower), kUnary};
    }

    std::vector<std::string> num_parts;
    std::vector<std::string> den_parts;
    for (const auto& f : num) num_parts.push_back(wrap(print(f), kPower));
    for (const auto& f : den) den_parts.push_back(wrap(print(f), kPower));

    std::string text;
    if (latex()) {
      std::string p = c.num().get_str();
      std::string q = c.den().get_str();
      if (den.empty()) {
        std::string coef;
        if (!c.is_one()) coef = c.is_integer() ? p : "\\frac{" + p + "}{" + q + "}";
        if (num_parts.empty()) {
          text = coef.empty() ? "1" : coef;
        } else {
          bool glue = coef.empty() || num_parts.front().starts_with("\\");
          text = coef + (glue ? "" : " ") + join(num_parts, " ");
        }
      } else {
        std::string top = num_parts.empty() ? p : (p == "1" ? "" : p + " ") + join(num_parts, " ");
        std::string bottom = (q == "1" ? "" : q + " ") + join(den_parts, " ");
        text = "\\frac{" + top + "}{" + bottom + "}";
      }
      return {sign + text, negative ? kUnary : kProduct};
    }

    std::vector<std::string> parts;
    if (!c.is_one()) {
      if (c.is_integer()) {
        parts.push_back(c.num().get_str());
      } else {
        parts.push_back("(" + c.num().get_str() + "/" + c.den().get_str() + ")");
      }
    }
    parts.insert(parts.end(), num_parts.begin(), num_parts.end());
    text = parts.empty() ? "1" : join(parts, times());
    if (!den_parts.empty()) {
      if (den_parts.size() == 1) {
        text += "/" + den_parts.front();
      } else {
        text += "/(" + join(den_parts, times()) + ")";
      }
    }
    return {sign + text, negative ? kUnary : kProduct};
  }

  Out sum(const Expr& e) {
    const auto& ops = e.operands();
    std::string text;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const Expr& t = ops[ops.size() - 1 - k];
      if (k == 0) {
        text = wrap(print(t), kProduct);
        continue;
      }
      if (is_negative_term(t)) {
        text += " " + minus() + " " + wrap(print(negate_raw(t)), kProduct);
      } else {
        text += " + " + wrap(print(t), kProduct);
      }
    }
    return {text, kSum};
  }

  Format fmt_;
};

}  // namespace

std::optional<Format> format_from_name(std::string_view name) {
  if (name == "ascii") return Format::ascii;
  if (name == "unicode") return Format::unicode;
  if (name == "latex") return Format::latex;
  return std::nullopt;
}

std::string_view format_name(Format f) {
  switch (f) {
    case Format::ascii: return "ascii";
    case Format::unicode: return "unicode";
    case Format::latex: return "latex";
  }
  return "ascii";
}

std::string render(const Expr& e, Format format) { return Printer(format).print(e).text; }

}  // namespace partable
