#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "partable/rational.hpp"

namespace partable {

/// Node kinds, declared in canonical sort order.
enum class Kind : std::uint8_t { constant, symbol, power, function, product, sum };

/// Whitelisted elementary functions, declared in canonical (alphabetical) order.
enum class Func : std::uint8_t { atan, cos, exp, ln, sin };

std::string_view func_name(Func f);
/// Maps "ln", "exp", ... back to Func. Returns false for names outside the whitelist.
bool func_from_name(std::string_view name, Func& out);

class Expr;

namespace detail {
struct Node;
}

/// Immutable, shared expression tree.
///
/// The static builders (`constant`, `symbol`, `pow`, `fun`, `mul`, `add`)
/// assemble nodes verbatim. Arithmetic operators go through
/// `canonicalize`, so `a + b` is always canonical.
class Expr {
public:
  Expr();  // Const(0)
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(int value);   // NOLINT(google-explicit-constructor)
  Expr(Rational value);  // NOLINT(google-explicit-constructor)

  static Expr constant(Rational value);
  static Expr symbol(std::string name);
  static Expr pow(Expr base, Expr exponent);
  static Expr fun(Func f, Expr arg);
  static Expr mul(std::vector<Expr> factors);
  static Expr add(std::vector<Expr> terms);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }

  const Rational& value() const;    // constant
  const std::string& name() const;  // symbol
  Func func() const;                // function
  /// Children: sum terms, product factors, {base, exponent}, or {arg}.
  const std::vector<Expr>& operands() const;
  const Expr& base() const { return operands()[0]; }
  const Expr& exponent() const { return operands()[1]; }
  const Expr& arg() const { return operands()[0]; }

  bool is_const() const { return is(Kind::constant); }
  bool is_zero() const { return is_const() && value().is_zero(); }
  bool is_one() const { return is_const() && value().is_one(); }
  bool is_symbol(std::string_view n) const { return is(Kind::symbol) && name() == n; }

  std::size_t hash() const;
  /// Number of nodes in the tree, leaves included.
  std::size_t node_count() const;
  /// Set on nodes produced by the canonical builder.
  bool is_canonical() const;

  /// Structural (node-for-node) equality. Use `equals` for mathematical equality.
  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

  // Canonicalizing arithmetic.
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr operator-() const;

  /// Internal: marks a freshly built node as canonical.
  Expr mark_canonical() &&;

private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  static Expr make(detail::Node node);

  std::shared_ptr<const detail::Node> node_;
};

/// Canonicalizing power.
Expr power(const Expr& base, const Expr& exponent);
/// Canonicalizing function application.
Expr apply(Func f, const Expr& arg);

inline Expr sym(std::string name) { return Expr::symbol(std::move(name)); }

/// True if `sym` does not occur anywhere in `e`.
bool free_of(const Expr& e, std::string_view sym);
/// Every symbol name occurring in `e`, sorted and unique.
std::vector<std::string> symbols_of(const Expr& e);

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

}  // namespace partable
