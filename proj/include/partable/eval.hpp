#pragma once

#include <map>
#include <string>

#include "partable/expr.hpp"

namespace partable {

using Bindings = std::map<std::string, double, std::less<>>;

/// Double-precision evaluation. Unbound symbols throw std::out_of_range;
/// domain violations (ln of a negative, 0^-1) yield NaN or infinity.
double evaluate(const Expr& e, const Bindings& env);

}  // namespace partable
