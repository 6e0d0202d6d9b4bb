#include "doctest.h"

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "partable/canonical.hpp"
#include "partable/parser.hpp"

using namespace partable;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(PARTABLE_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

int count_lines(const std::string& s, const std::string& prefix) {
  int n = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find('\n', pos);
    if (end == std::string::npos) end = s.size();
    if (s.compare(pos, prefix.size(), prefix) == 0) ++n;
    pos = end + 1;
  }
  return n;
}

}  // namespace

TEST_CASE("integrate") {
  auto r = run("integrate 'ln(x)' --var x");
  CHECK(r.code == 0);
  CHECK(r.out == "x*ln(x) - x + C\n");

  r = run("integrate 'sin(2*x)*cos(5*x)' --var x");
  CHECK(r.code == 0);
  CHECK(r.out == "(5/21)*sin(2*x)*sin(5*x) + (2/21)*cos(2*x)*cos(5*x) + C\n");

  r = run("integrate '(x^2-3*x)*sin(x)' --var x --u 'sin(x)' --trace");
  CHECK(r.code == 0);
  CHECK(r.out.find("harder") != std::string::npos);
  CHECK(r.out.find("abandoned split u = sin(x)") != std::string::npos);
  CHECK(r.out.find("result: ") != std::string::npos);

  r = run("integrate '(x^2-3*x)*sin(x)' --var x --u 'sin(x)' --trace --no-retry");
  CHECK(r.code == 3);
  CHECK(r.out.find("harder") != std::string::npos);
  CHECK(r.out.find("int (x^2 - 3*x)*sin(x) dx = ") != std::string::npos);

  CHECK(run("integrate '2x+1'").code == 2);
  CHECK(run("integrate 'x' --u '('").code == 2);
  CHECK(run("integrate 'exp(x^2)'").code == 3);

  r = run("--json integrate 'x*exp(x)'");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(equals(parse(j["antiderivative"].get<std::string>()), parse("x*exp(x) - exp(x) + C")));
  CHECK(j["verification"]["passed"] == true);
  CHECK(!j["tables"].empty());

  r = run("integrate 'x*exp(x)' --format latex");
  CHECK(r.out.find("e^{x}") != std::string::npos);
  r = run("integrate 'x^2*exp(x)' --trace --format unicode");
  CHECK(r.out.find("∫") != std::string::npos);

  CHECK(run("integrate 'x*cos(x)' --dv 'cos(x)' --verify-mode symbolic").code == 0);
  CHECK(run("integrate 'x^6*exp(x)' --max-rows 3 --split-attempts 1 --max-recursion 0").code == 3);
  CHECK(run("integrate 'x^2*exp(x)*sin(x)' --verify-mode numeric").code == 0);
  CHECK(run("integrate 'x' --verify-mode bogus").code != 0);
}

TEST_CASE("examples") {
  auto r = run("examples");
  CHECK(r.code == 0);
  CHECK(count_lines(r.out, "FAIL") == 0);
  int total = count_lines(r.out, "PASS");
  CHECK(total == 55);
  CHECK(r.out.rfind("PASS ln ", 0) == 0);

  auto again = run("examples");
  CHECK(again.out == r.out);

  auto faulty = run("examples --inject-fault constant");
  CHECK(faulty.code != 0);
  CHECK(faulty.out.rfind("FAIL ln ", 0) == 0);
  CHECK(count_lines(faulty.out, "PASS") + count_lines(faulty.out, "FAIL") == total);

  auto js = nlohmann::json::parse(run("--json examples").out);
  CHECK(js.size() == 55);
}

TEST_CASE("taylor and asymptotic") {
  auto r = run("taylor 'sin(t)' 0 3 --x 1.3");
  CHECK(r.code == 0);
  CHECK(r.out.find("x - t") != std::string::npos);
  CHECK(r.out.find("-(x - t)^2/2!") != std::string::npos);
  CHECK(r.out.find("polynomial: -(1/6)*x^3 + x") != std::string::npos);

  auto j = nlohmann::json::parse(run("--json taylor 'sin(t)' 0 2").out);
  CHECK(j["dv_cells"][1] == "x - t");
  CHECK(j["table"]["rows"].size() == 3);

  CHECK(run("taylor 'sin(t)' x 3").code == 1);
  CHECK(run("taylor 'sin(' 0 3").code == 2);

  r = run("asymptotic 10 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("partial sum: 1/x - 1/x^2 + 2/x^3") != std::string::npos);
  j = nlohmann::json::parse(run("--json asymptotic 50 2").out);
  CHECK(j["error"].get<double>() < 1e-8);
  CHECK(run("asymptotic -1 2").code == 1);
}
