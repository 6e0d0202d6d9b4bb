#include "partable/parser.hpp"

#include <cctype>
#include <vector>

#include "partable/canonical.hpp"

namespace partable {

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(c)) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i < src.size() && src[i] == '.') {
        throw ParseError("decimal literals are not supported; write p/q", {start, i + 1});
      }
      out.push_back({Tok::number, std::string(src.substr(start, i - start)), {start, i}});
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        ++i;
      out.push_back({Tok::ident, std::string(src.substr(start, i - start)), {start, i}});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::plus; break;
      case '-': kind = Tok::minus; break;
      case '*': kind = Tok::star; break;
      case '/': kind = Tok::slash; break;
      case '^': kind = Tok::caret; break;
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      default:
        throw ParseError(std::string("unexpected character '") + src[i] + "'", {start, start + 1});
    }
    ++i;
    out.push_back({kind, std::string(1, static_cast<char>(c)), {start, i}});
  }
  out.push_back({Tok::end, "", {src.size(), src.size()}});
  return out;
}

class Parser {
public:
  Parser(std::string_view src, const ParseOptions& options)
      : tokens_(tokenize(src)), options_(options) {}

  Expr run() {
    if (peek().kind == Tok::end) throw ParseError("empty expression", peek().span);
    Expr e = expr();
    if (peek().kind == Tok::rparen) throw ParseError("unbalanced ')'", peek().span);
    if (peek().kind != Tok::end) reject_juxtaposition();
    return e;
  }

private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void reject_juxtaposition() {
    throw ParseError("implicit multiplication is not supported; insert '*'", peek().span);
  }

  Expr expr() {
    Expr lhs = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      bool minus = next().kind == Tok::minus;
      Expr rhs = term();
      if (minus) rhs = Expr::mul({Expr(-1), rhs});
      lhs = Expr::add({lhs, rhs});
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      Tok k = peek().kind;
      if (k == Tok::star || k == Tok::slash) {
        next();
        Expr rhs = unary();
        if (k == Tok::slash) rhs = Expr::pow(rhs, Expr(-1));
        lhs = Expr::mul({lhs, rhs});
      } else if (k == Tok::number || k == Tok::ident || k == Tok::lparen) {
        reject_juxtaposition();
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (peek().kind == Tok::minus) {
      next();
      return Expr::mul({Expr(-1), unary()});
    }
    if (peek().kind == Tok::plus) {
      next();
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (peek().kind == Tok::caret) {
      next();
      return Expr::pow(base, unary());
    }
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number: {
        next();
        return Expr(Rational(mpz_class(t.text, 10), mpz_class(1)));
      }
      case Tok::ident: {
        next();
        Func f;
        bool is_func = func_from_name(t.text, f);
        if (peek().kind == Tok::lparen) {
          if (!is_func) throw ParseError("unknown function '" + t.text + "'", t.span);
          const Token& open = next();
          if (peek().kind == Tok::rparen) throw ParseError("missing function argument", peek().span);
          Expr arg = expr();
          expect_close(open);
          return Expr::fun(f, arg);
        }
        if (is_func) throw ParseError("function '" + t.text + "' needs an argument", t.span);
        if (options_.symbols && !options_.symbols->count(t.text)) {
          throw ParseError("unknown symbol '" + t.text + "'", t.span);
        }
        return Expr::symbol(t.text);
      }
      case Tok::lparen: {
        const Token& open = next();
        if (peek().kind == Tok::rparen) throw ParseError("empty parentheses", peek().span);
        Expr e = expr();
        expect_close(open);
        return e;
      }
      case Tok::end: throw ParseError("unexpected end of input", t.span);
      case Tok::rparen: throw ParseError("unbalanced ')'", t.span);
      default: throw ParseError("unexpected '" + t.text + "'", t.span);
    }
  }

  void expect_close(const Token& open) {
    if (peek().kind == Tok::rparen) {
      next();
      return;
    }
    if (peek().kind == Tok::end) throw ParseError("unbalanced '('", open.span);
    if (peek().kind == Tok::number || peek().kind == Tok::ident || peek().kind == Tok::lparen) {
      reject_juxtaposition();
    }
    throw ParseError("expected ')'", peek().span);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const ParseOptions& options_;
};

}  // namespace

Expr parse_raw(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).run();
}

Expr parse(std::string_view text, const ParseOptions& options) {
  Expr raw = parse_raw(text, options);
  try {
    return canonicalize(raw);
  } catch (const std::exception& ex) {
    throw ParseError(std::string("cannot simplify expression: ") + ex.what(), {0, text.size()});
  }
}

}  // namespace partable
