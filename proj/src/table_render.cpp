#include <algorithm>
#include <sstream>

#include "partable/ibp.hpp"

namespace partable {

namespace {

std::size_t display_width(const std::string& s) {
  return std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; });
}

std::string pad(const std::string& s, std::size_t width) {
  std::size_t w = display_width(s);
  return s + std::string(width > w ? width - w : 0, ' ');
}

std::string sign_text(int sign, Format f) {
  if (sign > 0) return "+";
  return f == Format::unicode ? "−" : "-";
}

std::string integral(int sign, const Expr& integrand, const std::string& var, Format f) {
  std::string body = render(integrand, f);
  switch (f) {
    case Format::latex:
      return std::string(sign < 0 ? "-" : "") + "\\int " + (integrand.is(Kind::sum) ? "\\left(" + body + "\\right)" : body) +
             " \\, d" + var;
    case Format::unicode:
      return sign_text(sign, f) + "∫ " + (integrand.is(Kind::sum) ? "(" + body + ")" : body) + " d" + var;
    case Format::ascii:
      return sign_text(sign, f) + " int " + (integrand.is(Kind::sum) ? "(" + body + ")" : body) + " d" + var;
  }
  return body;
}

std::string outcome_line(const Outcome& o) {
  std::ostringstream out;
  out << "outcome: " << outcome_name(o.kind);
  switch (o.kind) {
    case OutcomeKind::self_similar:
      out << " c = " << o.c.str();
      if (!o.remainder.is_zero()) out << ", remainder " << render(o.remainder);
      break;
    case OutcomeKind::direct: out << ", residual integrates to " << render(o.residual_antiderivative); break;
    case OutcomeKind::harder:
    case OutcomeKind::simpler:
      out << " (score " << o.residual_score.score << " vs original " << o.original_score.score << ")";
      break;
    default: break;
  }
  if (!o.diagnostic.empty()) out << "; " << o.diagnostic;
  return out.str();
}

void trace_lines(const DerivationTrace& tr, Format f, int depth, std::ostringstream& out) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  std::string problem = integral(1, tr.problem.integrand, tr.problem.var, f);
  switch (tr.method) {
    case DerivationTrace::Method::rule:
      out << indent << problem << " = " << render(tr.antiderivative, f) << "  [rule " << rule_name(*tr.rule) << "]\n";
      break;
    case DerivationTrace::Method::linearity:
      out << indent << problem << " split term by term\n";
      break;
    case DerivationTrace::Method::table: {
      out << indent << problem << "\n";
      std::istringstream rows(render_table(*tr.table, f));
      for (std::string line; std::getline(rows, line);) out << indent << "  " << line << "\n";
      if (tr.outcome) out << indent << "  " << outcome_line(*tr.outcome) << "\n";
      break;
    }
  }
  for (const auto& c : tr.children) trace_lines(c, f, depth + 1, out);
}

}  // namespace

std::string render_residual(const Table& t, Format format) {
  Residual r = residual(t);
  return integral(r.sign, r.integrand, t.problem.var, format);
}

std::string render_table(const Table& t, Format format) {
  std::ostringstream out;
  if (format == Format::latex) {
    out << "\\begin{array}{c|c|c}\n";
    for (const auto& row : t.rows) {
      out << sign_text(row.sign, format) << " & " << render(row.u, format) << " & " << render(row.dv, format)
          << " \\\\\n";
    }
    out << "\\end{array}\n";
    if (t.rows.size() >= 2) out << render_residual(t, format) << "\n";
    return out.str();
  }
  std::vector<std::string> us;
  std::vector<std::string> dvs;
  std::size_t wu = 0;
  for (const auto& row : t.rows) {
    us.push_back(render(row.u, format));
    dvs.push_back(render(row.dv, format));
    wu = std::max(wu, display_width(us.back()));
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out << sign_text(t.rows[i].sign, format) << "  " << pad(us[i], wu) << "  " << dvs[i] << "\n";
  }
  if (t.rows.size() >= 2) out << "residual: " << render_residual(t, format) << "\n";
  return out.str();
}

std::string render_attempts(const std::vector<Attempt>& attempts, Format format) {
  std::ostringstream out;
  for (const auto& a : attempts) {
    if (a.table.rows.empty()) {
      out << "abandoned: " << a.reason << "\n";
      continue;
    }
    out << "abandoned split u = " << render(a.table.split.u, format) << ", dv = " << render(a.table.split.dv, format)
        << ": " << a.reason << "\n";
    std::istringstream rows(render_table(a.table, format));
    for (std::string line; std::getline(rows, line);) out << "  " << line << "\n";
    if (a.table.rows.size() >= 2) {
      out << "  " << integral(1, a.table.problem.integrand, a.table.problem.var, format) << " = "
          << render(partial_sum(a.table), format) << " " << render_residual(a.table, format) << "\n";
    }
    if (a.outcome) out << "  " << outcome_line(*a.outcome) << "\n";
  }
  return out.str();
}

std::string describe_outcome(const Outcome& o) { return outcome_line(o).substr(9); }

std::string render_trace(const DerivationTrace& trace, Format format) {
  std::ostringstream out;
  out << render_attempts(trace.attempts, format);
  trace_lines(trace, format, 0, out);
  out << "result: " << render(trace.final_antiderivative, format) << "\n";
  return out.str();
}

}  // namespace partable
