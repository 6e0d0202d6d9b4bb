#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "partable/ibp.hpp"
#include "partable/parser.hpp"

namespace partable {

using json = nlohmann::json;

struct Response {
  int status = 200;
  json body;
};

enum class SessionStatus { open, finalized, abandoned };

/// One snapshot on the undo stack. No table until a split is chosen.
struct SessionState {
  std::optional<Table> table;
};

struct Session {
  std::string id;
  IntegralProblem problem;
  std::vector<Split> suggestions;
  std::vector<SessionState> stack;
  SessionStatus status = SessionStatus::open;
  std::optional<DerivationTrace> trace;
  std::vector<std::string> log;  // JSON lines
  std::mutex mutex;
};

/// The view is a pure function of the session.
json session_view(const Session& s);
json table_json(const Table& t);
json error_body(int code, const std::string& message, std::optional<SourceSpan> span = std::nullopt);

class Service {
public:
  struct Options {
    Policy policy;
    /// Each session appends its action log to <log_dir>/<id>.jsonl.
    std::optional<std::filesystem::path> log_dir;
    /// Seed for session ids; random when unset.
    std::optional<std::uint64_t> seed;
  };

  Service();
  explicit Service(Options options);

  Response create(const json& body);
  Response state(const std::string& id);
  Response act(const std::string& id, const json& action);
  Response remove(const std::string& id);

  /// Action log lines of a session, empty for unknown ids.
  std::vector<std::string> log(const std::string& id);

  /// Rebuilds a session from its log in a fresh service and returns the final view.
  static Response replay(const std::vector<std::string>& lines, Options options = {});

private:
  std::shared_ptr<Session> find(const std::string& id);
  Response create_with_id(const json& body, std::string id);
  Response apply(Session& s, const json& action);
  void record(Session& s, const json& action);

  Options options_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_;
};

}  // namespace partable
