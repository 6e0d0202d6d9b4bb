#include "partable/eval.hpp"

#include <cmath>
#include <stdexcept>

namespace partable {

double evaluate(const Expr& e, const Bindings& env) {
  switch (e.kind()) {
    case Kind::constant: return e.value().to_double();
    case Kind::symbol: {
      auto it = env.find(e.name());
      if (it == env.end()) throw std::out_of_range("unbound symbol: " + e.name());
      return it->second;
    }
    case Kind::sum: {
      double acc = 0.0;
      for (const auto& op : e.operands()) acc += evaluate(op, env);
      return acc;
    }
    case Kind::product: {
      double acc = 1.0;
      for (const auto& op : e.operands()) acc *= evaluate(op, env);
      return acc;
    }
    case Kind::power: {
      double b = evaluate(e.base(), env);
      const Expr& x = e.exponent();
      if (x.is_const() && x.value().is_integer()) {
        if (auto n = x.value().to_long(); n && std::abs(*n) < 1024) {
          return std::pow(b, static_cast<int>(*n));
        }
      }
      return std::pow(b, evaluate(x, env));
    }
    case Kind::function: {
      double a = evaluate(e.arg(), env);
      switch (e.func()) {
        case Func::ln: return a > 0 ? std::log(a) : std::nan("");
        case Func::exp: return std::exp(a);
        case Func::sin: return std::sin(a);
        case Func::cos: return std::cos(a);
        case Func::atan: return std::atan(a);
      }
    }
  }
  throw std::logic_error("unknown expression kind");
}

}  // namespace partable
