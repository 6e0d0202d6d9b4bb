#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "partable/expr.hpp"

namespace partable {

enum class Format { ascii, unicode, latex };

std::optional<Format> format_from_name(std::string_view name);
std::string_view format_name(Format f);

/// Renders an expression. ASCII output re-parses to an equal expression;
/// unicode and LaTeX are display-only.
std::string render(const Expr& e, Format format = Format::ascii);

}  // namespace partable
