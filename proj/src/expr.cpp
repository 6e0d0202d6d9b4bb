#include "partable/expr.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <stdexcept>

#include "partable/canonical.hpp"

namespace partable {

namespace detail {

struct Node {
  Kind kind = Kind::constant;
  Func func = Func::ln;
  Rational value;
  std::string name;
  std::vector<Expr> ops;
  std::size_t hash = 0;
  std::size_t size = 1;
  bool canonical = false;
};

}  // namespace detail

namespace {

constexpr std::array<std::string_view, 5> kFuncNames{"atan", "cos", "exp", "ln", "sin"};

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string_view func_name(Func f) { return kFuncNames[static_cast<std::size_t>(f)]; }

bool func_from_name(std::string_view name, Func& out) {
  for (std::size_t i = 0; i < kFuncNames.size(); ++i) {
    if (kFuncNames[i] == name) {
      out = static_cast<Func>(i);
      return true;
    }
  }
  return false;
}

Expr::Expr() {
  static const Expr zero = constant(Rational());
  node_ = zero.node_;
}
Expr::Expr(long value) : Expr(constant(Rational(value))) {}
Expr::Expr(int value) : Expr(constant(Rational(value))) {}
Expr::Expr(Rational value) : Expr(constant(std::move(value))) {}

Expr Expr::make(detail::Node node) {
  std::size_t h = mix(static_cast<std::size_t>(node.kind) + 1, 0);
  switch (node.kind) {
    case Kind::constant: h = mix(h, node.value.hash()); break;
    case Kind::symbol: h = mix(h, std::hash<std::string>{}(node.name)); break;
    case Kind::function: h = mix(h, static_cast<std::size_t>(node.func) + 17); break;
    default: break;
  }
  node.size = 1;
  for (const auto& op : node.ops) {
    h = mix(h, op.hash());
    node.size += op.node_count();
  }
  node.hash = h;
  return Expr(std::make_shared<const detail::Node>(std::move(node)));
}

Expr Expr::constant(Rational value) {
  detail::Node n;
  n.kind = Kind::constant;
  n.value = std::move(value);
  n.canonical = true;
  return make(std::move(n));
}

Expr Expr::symbol(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty symbol name");
  detail::Node n;
  n.kind = Kind::symbol;
  n.name = std::move(name);
  n.canonical = true;
  return make(std::move(n));
}

Expr Expr::pow(Expr base, Expr exponent) {
  detail::Node n;
  n.kind = Kind::power;
  n.ops = {std::move(base), std::move(exponent)};
  return make(std::move(n));
}

Expr Expr::fun(Func f, Expr arg) {
  detail::Node n;
  n.kind = Kind::function;
  n.func = f;
  n.ops = {std::move(arg)};
  return make(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
  if (factors.empty()) return Expr(1);
  detail::Node n;
  n.kind = Kind::product;
  n.ops = std::move(factors);
  return make(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
  if (terms.empty()) return Expr(0);
  detail::Node n;
  n.kind = Kind::sum;
  n.ops = std::move(terms);
  return make(std::move(n));
}

Expr Expr::mark_canonical() && {
  if (node_->canonical) return std::move(*this);
  detail::Node copy = *node_;
  copy.canonical = true;
  return Expr(std::make_shared<const detail::Node>(std::move(copy)));
}

Kind Expr::kind() const { return node_->kind; }

const Rational& Expr::value() const {
  if (node_->kind != Kind::constant) throw std::logic_error("value() on non-constant");
  return node_->value;
}

const std::string& Expr::name() const {
  if (node_->kind != Kind::symbol) throw std::logic_error("name() on non-symbol");
  return node_->name;
}

Func Expr::func() const {
  if (node_->kind != Kind::function) throw std::logic_error("func() on non-function");
  return node_->func;
}

const std::vector<Expr>& Expr::operands() const { return node_->ops; }
std::size_t Expr::hash() const { return node_->hash; }
std::size_t Expr::node_count() const { return node_->size; }
bool Expr::is_canonical() const { return node_->canonical; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash || a.node_->kind != b.node_->kind ||
      a.node_->size != b.node_->size)
    return false;
  switch (a.kind()) {
    case Kind::constant: return a.value() == b.value();
    case Kind::symbol: return a.name() == b.name();
    case Kind::function:
      if (a.func() != b.func()) return false;
      break;
    default: break;
  }
  return a.operands() == b.operands();
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Kind::constant: return a.value() <=> b.value();
    case Kind::symbol: return a.name() <=> b.name();
    case Kind::function:
      if (auto c = a.func() <=> b.func(); c != 0) return c;
      return a.arg() <=> b.arg();
    default: break;
  }
  const auto& xs = a.operands();
  const auto& ys = b.operands();
  std::size_t n = std::min(xs.size(), ys.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = xs[i] <=> ys[i]; c != 0) return c;
  }
  return xs.size() <=> ys.size();
}

Expr operator+(const Expr& a, const Expr& b) { return canonicalize(Expr::add({a, b})); }
Expr operator-(const Expr& a, const Expr& b) {
  return canonicalize(Expr::add({a, Expr::mul({Expr(-1), b})}));
}
Expr operator*(const Expr& a, const Expr& b) { return canonicalize(Expr::mul({a, b})); }
Expr operator/(const Expr& a, const Expr& b) {
  return canonicalize(Expr::mul({a, Expr::pow(b, Expr(-1))}));
}
Expr Expr::operator-() const { return canonicalize(Expr::mul({Expr(-1), *this})); }

Expr power(const Expr& base, const Expr& exponent) {
  return canonicalize(Expr::pow(base, exponent));
}

Expr apply(Func f, const Expr& arg) { return canonicalize(Expr::fun(f, arg)); }

bool free_of(const Expr& e, std::string_view sym) {
  if (e.is(Kind::symbol)) return e.name() != sym;
  return std::all_of(e.operands().begin(), e.operands().end(),
                     [&](const Expr& op) { return free_of(op, sym); });
}

namespace {
void collect_symbols(const Expr& e, std::set<std::string>& out) {
  if (e.is(Kind::symbol)) {
    out.insert(e.name());
    return;
  }
  for (const auto& op : e.operands()) collect_symbols(op, out);
}
}  // namespace

std::vector<std::string> symbols_of(const Expr& e) {
  std::set<std::string> out;
  collect_symbols(e, out);
  return {out.begin(), out.end()};
}

}  // namespace partable
