#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "partable/expr.hpp"

namespace partable {

/// Byte range [start, end) into the parsed text.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, SourceSpan span)
      : std::runtime_error(std::move(message)), span_(span) {}

  SourceSpan span() const { return span_; }

private:
  SourceSpan span_;
};

struct ParseOptions {
  /// When set, identifiers outside this set are rejected as unknown symbols.
  std::optional<std::set<std::string, std::less<>>> symbols;
};

/// Parses the ASCII expression grammar and canonicalizes the result.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := integer | identifier | func '(' expr ')' | '(' expr ')'
///
/// `^` is right-associative and binds tighter than unary minus. Juxtaposition
/// ("2x") is rejected.
Expr parse(std::string_view text, const ParseOptions& options = {});

/// Parses without canonicalizing; used by tests that inspect raw structure.
Expr parse_raw(std::string_view text, const ParseOptions& options = {});

}  // namespace partable
