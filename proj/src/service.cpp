#include "partable/service.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "partable/canonical.hpp"
#include "partable/parser.hpp"
#include "partable/render.hpp"

namespace partable {

namespace {

struct ActionError {
  int code;
  std::string message;
  std::optional<SourceSpan> span;
};

json expr_json(const Expr& e) { return {{"ascii", render(e)}, {"latex", render(e, Format::latex)}}; }

std::string status_name(SessionStatus s) {
  switch (s) {
    case SessionStatus::open: return "open";
    case SessionStatus::finalized: return "finalized";
    case SessionStatus::abandoned: return "abandoned";
  }
  return "open";
}

std::string timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Expr parse_field(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string())
    throw ActionError{400, std::string("missing string field '") + key + "'", std::nullopt};
  try {
    return parse(body[key].get<std::string>());
  } catch (const ParseError& e) {
    throw ActionError{400, e.what(), e.span()};
  }
}

const Table& need_table(const Session& s) {
  const auto& top = s.stack.back();
  if (!top.table) throw ActionError{409, "no split chosen yet", std::nullopt};
  return *top.table;
}

}  // namespace

json error_body(int code, const std::string& message, std::optional<SourceSpan> span) {
  json e = {{"code", code}, {"message", message}};
  if (span) e["span"] = {{"start", span->start}, {"end", span->end}};
  return e;
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"index", r.index}, {"sign", r.sign}, {"u", expr_json(r.u)}, {"dv", expr_json(r.dv)}});
  return {{"var", t.problem.var},
          {"integrand", expr_json(t.problem.integrand)},
          {"split", {{"u", expr_json(t.split.u)}, {"dv", expr_json(t.split.dv)}}},
          {"rows", rows}};
}

json session_view(const Session& s) {
  json v;
  v["id"] = s.id;
  v["status"] = status_name(s.status);
  v["problem"] = {{"integrand", render(s.problem.integrand)},
                  {"latex", render(s.problem.integrand, Format::latex)},
                  {"var", s.problem.var}};
  v["undo_depth"] = s.stack.size() - 1;
  v["suggestions"] = json::array();
  v["table"] = nullptr;
  v["residual"] = nullptr;
  v["scores"] = nullptr;
  v["hints"] = json::array();
  v["can_stop"] = false;
  v["antiderivative"] = nullptr;
  v["verification"] = nullptr;

  const auto& top = s.stack.back();
  if (!top.table) {
    for (std::size_t k = 0; k < s.suggestions.size(); ++k)
      v["suggestions"].push_back(
          {{"index", k}, {"u", expr_json(s.suggestions[k].u)}, {"dv", expr_json(s.suggestions[k].dv)}});
  } else {
    const Table& t = *top.table;
    v["table"] = table_json(t);
    if (t.rows.size() >= 2) {
      Residual r = residual(t);
      v["residual"] = {{"sign", r.sign},
                       {"integrand", render(r.integrand)},
                       {"latex", render(r.integrand, Format::latex)},
                       {"text", render_residual(t)}};
      Outcome o = classify(t);
      v["scores"] = {{"original", o.original_score.score}, {"residual", o.residual_score.score}};
      json hint = {{"tag", outcome_name(o.kind)}, {"text", describe_outcome(o)}};
      if (o.is(OutcomeKind::self_similar)) {
        hint["c"] = o.c.str();
        if (!o.remainder.is_zero()) hint["remainder"] = render(o.remainder);
      }
      if (o.is(OutcomeKind::direct)) hint["residual_antiderivative"] = render(o.residual_antiderivative);
      if (o.is(OutcomeKind::simpler)) hint["subproblem"] = render(o.subproblem.integrand);
      v["hints"].push_back(hint);
      if (o.is(OutcomeKind::harder))
        v["hints"].push_back({{"tag", "warning"},
                              {"text", "the residual integral is harder than the original; undo and try another split"}});
      v["can_stop"] = s.status == SessionStatus::open && !o.is(OutcomeKind::harder) && !o.is(OutcomeKind::unknown);
    }
  }
  if (s.trace) {
    v["antiderivative"] = expr_json(s.trace->final_antiderivative);
    auto rep = verify(*s.trace);
    v["verification"] = {{"symbolic", rep.symbolic}, {"max_rel_error", rep.max_rel_error}, {"passed", rep.passed}};
  }
  return v;
}

Service::Service() : Service(Options{}) {}

Service::Service(Options options)
    : options_(std::move(options)), rng_(options_.seed ? *options_.seed : std::random_device{}()) {}

std::shared_ptr<Session> Service::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void Service::record(Session& s, const json& action) {
  json line = {{"seq", s.log.size()}, {"action", action}, {"timestamp", timestamp()}};
  s.log.push_back(line.dump());
  if (options_.log_dir) {
    std::filesystem::create_directories(*options_.log_dir);
    std::ofstream out(*options_.log_dir / (s.id + ".jsonl"), std::ios::app);
    out << s.log.back() << "\n";
  }
}

Response Service::create(const json& body) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    char buf[17];
    do {
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_()));
      id = buf;
    } while (sessions_.count(id));
  }
  return create_with_id(body, id);
}

Response Service::create_with_id(const json& body, std::string id) {
  try {
    if (!body.is_object()) throw ActionError{400, "body must be a JSON object", std::nullopt};
    Expr integrand = parse_field(body, "integrand");
    std::string var = "x";
    if (body.contains("var")) {
      if (!body["var"].is_string()) throw ActionError{400, "'var' must be a string", std::nullopt};
      var = body["var"].get<std::string>();
      Expr v;
      try {
        v = parse(var);
      } catch (const ParseError& e) {
        throw ActionError{400, std::string("bad variable: ") + e.what(), std::nullopt};
      }
      if (!v.is_symbol(var)) throw ActionError{400, "variable must be an identifier", std::nullopt};
    }
    auto s = std::make_shared<Session>();
    s->id = id;
    s->problem = make_problem(integrand, var);
    s->suggestions = suggest_splits(s->problem);
    if (s->suggestions.empty())
      throw ActionError{422, "no split places an integrable piece in dv", std::nullopt};
    s->stack.push_back(SessionState{});
    record(*s, {{"type", "create"}, {"integrand", body["integrand"]}, {"var", var}, {"id", id}});
    json view = session_view(*s);
    {
      std::lock_guard lock(mutex_);
      if (sessions_.count(id)) return {409, error_body(409, "session id already exists")};
      sessions_[id] = s;
    }
    return {201, view};
  } catch (const ActionError& e) {
    return {e.code, error_body(e.code, e.message, e.span)};
  }
}

Response Service::state(const std::string& id) {
  auto s = find(id);
  if (!s) return {404, error_body(404, "unknown session " + id)};
  std::lock_guard lock(s->mutex);
  return {200, session_view(*s)};
}

Response Service::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  if (!sessions_.erase(id)) return {404, error_body(404, "unknown session " + id)};
  return {200, json{{"deleted", id}}};
}

std::vector<std::string> Service::log(const std::string& id) {
  auto s = find(id);
  if (!s) return {};
  std::lock_guard lock(s->mutex);
  return s->log;
}

Response Service::act(const std::string& id, const json& action) {
  auto s = find(id);
  if (!s) return {404, error_body(404, "unknown session " + id)};
  std::lock_guard lock(s->mutex);
  if (s->status == SessionStatus::abandoned) return {410, error_body(410, "session was abandoned")};
  if (s->status == SessionStatus::finalized) return {409, error_body(409, "session is already finalized")};
  try {
    Response r = apply(*s, action);
    record(*s, action);
    return r;
  } catch (const ActionError& e) {
    return {e.code, error_body(e.code, e.message, e.span)};
  }
}

Response Service::apply(Session& s, const json& action) {
  if (!action.is_object() || !action.contains("type") || !action["type"].is_string())
    throw ActionError{400, "action needs a string 'type'", std::nullopt};
  const std::string type = action["type"];

  if (type == "choose_split") {
    if (s.stack.back().table) throw ActionError{409, "a split is already chosen; undo first", std::nullopt};
    Split split;
    if (action.contains("index")) {
      if (!action["index"].is_number_integer()) throw ActionError{400, "'index' must be an integer", std::nullopt};
      long k = action["index"];
      if (k < 0 || static_cast<std::size_t>(k) >= s.suggestions.size())
        throw ActionError{400, "suggestion index out of range", std::nullopt};
      split = s.suggestions[static_cast<std::size_t>(k)];
    } else if (action.contains("u")) {
      Expr u = parse_field(action, "u");
      if (u.is_zero()) throw ActionError{400, "u cannot be zero", std::nullopt};
      split = split_from_u(s.problem, u);
    } else if (action.contains("dv")) {
      Expr dv = parse_field(action, "dv");
      if (dv.is_zero()) throw ActionError{400, "dv cannot be zero", std::nullopt};
      split = split_from_dv(s.problem, dv);
    } else {
      throw ActionError{400, "choose_split needs 'index', 'u' or 'dv'", std::nullopt};
    }
    try {
      s.stack.push_back(SessionState{new_table(s.problem, split)});
    } catch (const IbpError& e) {
      throw ActionError{422, e.what(), std::nullopt};
    }
  } else if (type == "step") {
    const Table& t = need_table(s);
    if (t.rows.size() >= options_.policy.max_rows)
      throw ActionError{409, "table already has the maximum number of rows", std::nullopt};
    try {
      s.stack.push_back(SessionState{step(t)});
    } catch (const NoRuleForDv& e) {
      throw ActionError{409, e.what(), std::nullopt};
    }
  } else if (type == "stop") {
    const Table& t = need_table(s);
    if (t.rows.size() < 2) throw ActionError{409, "step at least once before stopping", std::nullopt};
    std::string mode = "auto";
    if (action.contains("mode")) {
      if (!action["mode"].is_string()) throw ActionError{400, "'mode' must be a string", std::nullopt};
      mode = action["mode"];
    }
    Outcome o = classify(t);
    if (o.is(OutcomeKind::harder) || o.is(OutcomeKind::unknown))
      throw ActionError{409, "cannot finalize: " + describe_outcome(o), std::nullopt};
    if (mode != "auto" && mode != outcome_name(o.kind))
      throw ActionError{409, "stop mode " + mode + " does not match the detected outcome " +
                                 std::string(outcome_name(o.kind)),
                        std::nullopt};
    DerivationTrace tr;
    try {
      if (o.is(OutcomeKind::simpler)) {
        tr = finalize(t, o, auto_integrate(o.subproblem, options_.policy));
      } else if (o.is(OutcomeKind::self_similar) && !o.remainder.is_zero()) {
        try {
          tr = finalize(t, o);
        } catch (const NotFinalizable&) {
          tr = finalize(t, o, auto_integrate(make_problem(o.remainder, t.problem.var), options_.policy));
        }
      } else {
        tr = finalize(t, o);
      }
    } catch (const IbpError& e) {
      throw ActionError{422, std::string("the remaining integral could not be finished: ") + e.what(), std::nullopt};
    }
    auto rep = verify(tr);
    if (!rep.passed) throw ActionError{422, "the assembled antiderivative failed verification", std::nullopt};
    s.stack.push_back(s.stack.back());
    s.trace = std::move(tr);
    s.status = SessionStatus::finalized;
  } else if (type == "undo") {
    if (s.stack.size() <= 1) throw ActionError{409, "nothing to undo", std::nullopt};
    s.stack.pop_back();
  } else if (type == "abandon") {
    s.status = SessionStatus::abandoned;
  } else {
    throw ActionError{400, "unknown action type " + type, std::nullopt};
  }
  return {200, session_view(s)};
}

Response Service::replay(const std::vector<std::string>& lines, Options options) {
  Service svc(std::move(options));
  std::string id;
  Response last{400, error_body(400, "empty action log")};
  for (const auto& line : lines) {
    if (line.empty()) continue;
    json entry = json::parse(line, nullptr, false);
    if (entry.is_discarded() || !entry.contains("action")) return {400, error_body(400, "malformed log line")};
    const json& action = entry["action"];
    if (id.empty()) {
      if (action.value("type", "") != "create" || !action.contains("id"))
        return {400, error_body(400, "log must start with a create entry")};
      id = action["id"];
      last = svc.create_with_id(action, id);
    } else {
      last = svc.act(id, action);
    }
    if (last.status >= 300) return last;
  }
  if (id.empty()) return last;
  return svc.state(id);
}

}  // namespace partable
