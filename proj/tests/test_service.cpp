#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "partable/calculus.hpp"
#include "partable/canonical.hpp"
#include "partable/http.hpp"
#include "partable/parser.hpp"
#include "partable/service.hpp"

using namespace partable;

namespace {

Service::Options seeded() {
  Service::Options o;
  o.seed = 7;
  return o;
}

std::string create_ok(Service& svc, const char* integrand) {
  auto r = svc.create({{"integrand", integrand}, {"var", "x"}});
  REQUIRE(r.status == 201);
  return r.body["id"];
}

Response act(Service& svc, const std::string& id, json a) { return svc.act(id, a); }

bool same_expr(const json& ascii, const char* want) { return equals(parse(ascii.get<std::string>()), parse(want)); }

}  // namespace

TEST_CASE("create") {
  Service svc(seeded());
  auto r = svc.create({{"integrand", "(x^2-3*x)*sin(x)"}, {"var", "x"}});
  REQUIRE(r.status == 201);
  auto sug = r.body["suggestions"];
  REQUIRE(sug.size() >= 2);
  CHECK(same_expr(sug[0]["u"]["ascii"], "x^2-3*x"));
  CHECK(same_expr(sug[0]["dv"]["ascii"], "sin(x)"));
  bool later = false;
  for (std::size_t k = 1; k < sug.size(); ++k)
    if (same_expr(sug[k]["u"]["ascii"], "sin(x)")) later = true;
  CHECK(later);
  CHECK(r.body["table"].is_null());
  CHECK(r.body["status"] == "open");
  CHECK(r.body["undo_depth"] == 0);

  r = svc.create({{"integrand", "((("}, {"var", "x"}});
  CHECK(r.status == 400);
  CHECK(r.body["code"] == 400);
  CHECK(r.body.contains("span"));

  r = svc.create({{"integrand", "ln(x)"}, {"var", "x"}});
  REQUIRE(r.status == 201);
  CHECK(same_expr(r.body["suggestions"][0]["u"]["ascii"], "ln(x)"));
  CHECK(same_expr(r.body["suggestions"][0]["dv"]["ascii"], "1"));

  CHECK(svc.create({{"integrand", "t^2"}, {"var", "x"}}).status == 422);
  CHECK(svc.create({{"integrand", "x"}, {"var", "2+"}}).status == 400);
  CHECK(svc.create(json::array()).status == 400);
  CHECK(svc.create({{"var", "x"}}).status == 400);

  // state right after create
  std::string id = create_ok(svc, "ln(x)");
  auto s = svc.state(id);
  CHECK(s.status == 200);
  CHECK(!s.body["suggestions"].empty());
  CHECK(s.body["table"].is_null());
}

TEST_CASE("exp-sin flow to self-similar") {
  Service svc(seeded());
  std::string id = create_ok(svc, "exp(3*x)*sin(2*x)");
  auto r = act(svc, id, {{"type", "choose_split"}, {"u", "exp(3*x)"}});
  REQUIRE(r.status == 200);
  CHECK(r.body["table"]["rows"].size() == 1);
  CHECK(act(svc, id, {{"type", "stop"}}).status == 409);  // one row

  r = act(svc, id, {{"type", "step"}});
  REQUIRE(r.status == 200);
  r = act(svc, id, {{"type", "step"}});
  REQUIRE(r.status == 200);
  auto rows = r.body["table"]["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(same_expr(rows[2]["u"]["ascii"], "9*exp(3*x)"));
  CHECK(same_expr(rows[2]["dv"]["ascii"], "-sin(2*x)/4"));
  REQUIRE(!r.body["hints"].empty());
  CHECK(r.body["hints"][0]["tag"] == "self_similar");
  CHECK(r.body["hints"][0]["c"] == "-9/4");
  CHECK(r.body["can_stop"] == true);

  CHECK(act(svc, id, {{"type", "stop"}, {"mode", "direct"}}).status == 409);
  r = act(svc, id, {{"type", "stop"}, {"mode", "self_similar"}});
  REQUIRE(r.status == 200);
  CHECK(r.body["status"] == "finalized");
  CHECK(same_expr(r.body["antiderivative"]["ascii"], "exp(3*x)/13*(3*sin(2*x) - 2*cos(2*x)) + C"));
  CHECK(r.body["verification"]["passed"] == true);

  CHECK(act(svc, id, {{"type", "step"}}).status == 409);
  auto s = svc.state(id);
  CHECK(s.body["status"] == "finalized");
  CHECK(s.body == r.body);
}

TEST_CASE("undo restores the previous view") {
  Service svc(seeded());
  std::string id = create_ok(svc, "x^3*cos(x)");
  CHECK(act(svc, id, {{"type", "undo"}}).status == 409);
  auto before = act(svc, id, {{"type", "choose_split"}, {"index", 0}});
  REQUIRE(before.status == 200);
  auto stepped = act(svc, id, {{"type", "step"}});
  REQUIRE(stepped.status == 200);
  CHECK(stepped.body["undo_depth"] == 2);
  auto undone = act(svc, id, {{"type", "undo"}});
  REQUIRE(undone.status == 200);
  CHECK(undone.body.dump() == before.body.dump());
  undone = act(svc, id, {{"type", "undo"}});
  CHECK(undone.body["table"].is_null());
  CHECK(!undone.body["suggestions"].empty());
}

TEST_CASE("bad split, undo, good split") {
  Service svc(seeded());
  std::string id = create_ok(svc, "(x^2-3*x)*sin(x)");
  REQUIRE(act(svc, id, {{"type", "choose_split"}, {"u", "sin(x)"}}).status == 200);
  auto r = act(svc, id, {{"type", "step"}});
  REQUIRE(r.status == 200);
  CHECK(r.body["hints"][0]["tag"] == "harder");
  CHECK(r.body["hints"][1]["tag"] == "warning");
  CHECK(r.body["scores"]["residual"].get<long>() > r.body["scores"]["original"].get<long>());
  CHECK(r.body["can_stop"] == false);
  CHECK(act(svc, id, {{"type", "stop"}}).status == 409);

  REQUIRE(act(svc, id, {{"type", "undo"}}).status == 200);
  REQUIRE(act(svc, id, {{"type", "undo"}}).status == 200);
  REQUIRE(act(svc, id, {{"type", "choose_split"}, {"u", "x^2-3*x"}}).status == 200);
  act(svc, id, {{"type", "step"}});
  r = act(svc, id, {{"type", "step"}});
  CHECK(r.body["hints"][0]["tag"] == "direct");
  r = act(svc, id, {{"type", "stop"}, {"mode", "direct"}});
  REQUIRE(r.status == 200);
  CHECK(same_expr(r.body["antiderivative"]["ascii"], "(3*x-x^2)*cos(x) + (2*x-3)*sin(x) + 2*cos(x) + C"));
}

TEST_CASE("simpler residual is finished by the engine on stop") {
  Service svc(seeded());
  std::string id = create_ok(svc, "(3*x^2-x)*ln(x)^2");
  REQUIRE(act(svc, id, {{"type", "choose_split"}, {"u", "ln(x)^2"}}).status == 200);
  auto r = act(svc, id, {{"type", "step"}});
  CHECK(r.body["hints"][0]["tag"] == "simpler");
  r = act(svc, id, {{"type", "stop"}, {"mode", "simpler"}});
  REQUIRE(r.status == 200);
  CHECK(same_expr(r.body["antiderivative"]["ascii"],
                  "(x^3 - x^2/2)*ln(x)^2 + (x^2/2 - 2*x^3/3)*ln(x) + 2*x^3/9 - x^2/4 + C"));
}

TEST_CASE("errors and limits") {
  Service svc(seeded());
  CHECK(svc.state("nope").status == 404);
  CHECK(svc.act("nope", {{"type", "step"}}).status == 404);

  std::string id = create_ok(svc, "x*exp(x)");
  CHECK(act(svc, id, {{"type", "step"}}).status == 409);
  CHECK(act(svc, id, {{"type", "fly"}}).status == 400);
  CHECK(act(svc, id, json::array()).status == 400);
  CHECK(act(svc, id, {{"type", "choose_split"}, {"index", 99}}).status == 400);
  auto bad = act(svc, id, {{"type", "choose_split"}, {"u", "sin("}});
  CHECK(bad.status == 400);
  CHECK(bad.body.contains("span"));

  REQUIRE(act(svc, id, {{"type", "choose_split"}, {"u", "exp(x)"}}).status == 200);
  CHECK(act(svc, id, {{"type", "choose_split"}, {"index", 0}}).status == 409);
  int steps = 0;
  while (act(svc, id, {{"type", "step"}}).status == 200) ++steps;
  CHECK(steps == 11);  // twelve rows
  CHECK(svc.state(id).body["table"]["rows"].size() == 12);

  // dv leaving the rule table
  std::string id2 = create_ok(svc, "x*ln(x)");
  REQUIRE(act(svc, id2, {{"type", "choose_split"}, {"dv", "ln(x)"}}).status == 200);
  CHECK(act(svc, id2, {{"type", "step"}}).status == 409);

  REQUIRE(act(svc, id, {{"type", "abandon"}}).status == 200);
  CHECK(act(svc, id, {{"type", "step"}}).status == 410);
  CHECK(svc.state(id).body["status"] == "abandoned");

  CHECK(svc.remove(id).status == 200);
  CHECK(svc.state(id).status == 404);
  CHECK(svc.remove(id).status == 404);
}

TEST_CASE("never finalizes an unverified trace") {
  Service svc(seeded());
  std::string id = create_ok(svc, "ln(x)");
  testing::ScopedRuleFault fault(Rule::constant);
  REQUIRE(act(svc, id, {{"type", "choose_split"}, {"index", 0}}).status == 200);
  REQUIRE(act(svc, id, {{"type", "step"}}).status == 200);
  auto r = act(svc, id, {{"type", "stop"}});
  CHECK(r.status == 422);
  CHECK(svc.state(id).body["status"] == "open");
}

TEST_CASE("action log replay") {
  auto dir = std::filesystem::temp_directory_path() / "partable_log_test";
  std::filesystem::remove_all(dir);
  Service::Options opt = seeded();
  opt.log_dir = dir;
  Service svc(opt);
  std::string id = create_ok(svc, "exp(3*x)*sin(2*x)");
  act(svc, id, {{"type", "choose_split"}, {"index", 0}});
  act(svc, id, {{"type", "step"}});
  act(svc, id, {{"type", "undo"}});
  act(svc, id, {{"type", "step"}});
  act(svc, id, {{"type", "step"}});
  CHECK(act(svc, id, {{"type", "step"}, {"bogus", true}}).status == 200);
  act(svc, id, {{"type", "undo"}});
  CHECK(act(svc, id, {{"type", "stop"}, {"mode", "direct"}}).status == 409);  // not logged
  auto final_view = act(svc, id, {{"type", "stop"}});
  REQUIRE(final_view.status == 200);

  auto lines = svc.log(id);
  CHECK(lines.size() == 9);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    auto j = json::parse(lines[k]);
    CHECK(j["seq"] == k);
    CHECK(j.contains("timestamp"));
    CHECK(j.contains("action"));
  }

  auto replayed = Service::replay(lines);
  REQUIRE(replayed.status == 200);
  CHECK(replayed.body.dump() == final_view.body.dump());

  // the file on disk carries the same lines
  std::ifstream in(dir / (id + ".jsonl"));
  std::vector<std::string> from_file;
  for (std::string line; std::getline(in, line);) from_file.push_back(line);
  CHECK(from_file == lines);
  CHECK(Service::replay(from_file).body.dump() == final_view.body.dump());

  CHECK(Service::replay({}).status == 400);
  CHECK(Service::replay({"not json"}).status == 400);
  std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent access") {
  Service svc(seeded());
  std::string id = create_ok(svc, "x^4*exp(x)");
  act(svc, id, {{"type", "choose_split"}, {"index", 0}});

  std::vector<std::thread> threads;
  std::vector<int> ok(8, 0);
  for (int k = 0; k < 8; ++k)
    threads.emplace_back([&, k] {
      if (svc.act(id, {{"type", "step"}}).status == 200) ok[static_cast<std::size_t>(k)] = 1;
    });
  for (auto& t : threads) t.join();
  int total = 0;
  for (int v : ok) total += v;
  CHECK(total == 8);
  auto view = svc.state(id);
  CHECK(view.body["table"]["rows"].size() == 9);
  CHECK(svc.log(id).size() == 10);

  threads.clear();
  std::vector<std::string> bodies(8);
  for (int k = 0; k < 8; ++k)
    threads.emplace_back([&, k] { bodies[static_cast<std::size_t>(k)] = svc.state(id).body.dump(); });
  for (auto& t : threads) t.join();
  for (const auto& b : bodies) CHECK(b == bodies[0]);

  // independent sessions in parallel
  threads.clear();
  std::vector<std::string> results(6);
  for (int k = 0; k < 6; ++k)
    threads.emplace_back([&, k] {
      auto r = svc.create({{"integrand", "exp(3*x)*sin(2*x)"}, {"var", "x"}});
      std::string sid = r.body["id"];
      svc.act(sid, {{"type", "choose_split"}, {"index", 0}});
      svc.act(sid, {{"type", "step"}});
      svc.act(sid, {{"type", "step"}});
      results[static_cast<std::size_t>(k)] = svc.act(sid, {{"type", "stop"}}).body["antiderivative"]["ascii"];
    });
  for (auto& t : threads) t.join();
  for (const auto& r : results) CHECK(r == results[0]);
}

TEST_CASE("http round trip") {
  Service svc(seeded());
  HttpServer server(svc);
  int port = server.bind_any("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { server.run(); });

  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  auto res = cli.Post("/session", R"j({"integrand":"exp(3*x)*sin(2*x)","var":"x"})j", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  std::string id = json::parse(res->body)["id"];

  for (const char* body : {R"j({"type":"choose_split","index":0})j", R"j({"type":"step"})j", R"j({"type":"step"})j"}) {
    res = cli.Post(("/session/" + id + "/act").c_str(), body, "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
  }
  res = cli.Post(("/session/" + id + "/act").c_str(), R"j({"type":"stop","mode":"self_similar"})j", "application/json");
  REQUIRE(res);
  auto view = json::parse(res->body);
  CHECK(view["status"] == "finalized");
  CHECK(same_expr(view["antiderivative"]["ascii"], "exp(3*x)/13*(3*sin(2*x) - 2*cos(2*x)) + C"));

  res = cli.Get(("/session/" + id).c_str());
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body) == view);

  // the log replays to the same bytes
  CHECK(Service::replay(svc.log(id)).body.dump() == res->body);

  res = cli.Post("/session", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  res = cli.Post("/session", R"j({"integrand":"(((","var":"x"})j", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body).contains("span"));
  res = cli.Get("/session/ffff");
  REQUIRE(res);
  CHECK(res->status == 404);
  CHECK(json::parse(res->body)["code"] == 404);
  res = cli.Delete(("/session/" + id).c_str());
  REQUIRE(res);
  CHECK(res->status == 200);
  res = cli.Get(("/session/" + id).c_str());
  REQUIRE(res);
  CHECK(res->status == 404);

  server.stop();
  th.join();
}
