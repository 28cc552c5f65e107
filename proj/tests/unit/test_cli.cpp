#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gkz/cli.hpp"
#include "support.hpp"

using namespace gkz;
using namespace gkz::cli;
using nlohmann::json;

namespace {

const char* kDiamond = R"({
  "A": [[4, 0, 1, 2], [0, 3, 1, 1]],
  "c": ["1/3", "1/2"],
  "z": [{"re": 1, "im": 0}, {"re": 1, "im": 0}, {"re": 0.1, "im": 0}, {"re": 0.05, "im": 0}],
  "sigma": [1, 2],
  "weights": ["0", "0", "1", "1"]
})";

constexpr double kDiamondSum = 0.8947819886299564;

json diamond_json() { return json::parse(kDiamond); }

std::string field_of(const json& j) {
  try {
    parse_problem(j);
  } catch (const InputError& e) {
    return e.field();
  }
  FAIL("expected an input error");
  return {};
}

struct Run {
  int code;
  json out;
  std::string err;
};

Run run(const std::string& command, const json& problem, CommandOptions options = {}) {
  std::ostringstream out, err;
  const int code = run_command(command, parse_problem(problem), options, out, err);
  return {code, json::parse(out.str()), err.str()};
}

// Writes text to a fresh file under the temp directory.
std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("gkz_cli_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

Run run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "gkz");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  json j;
  try {
    j = json::parse(out.str());
  } catch (const json::parse_error&) {
    j = out.str();
  }
  return {code, j, err.str()};
}

}  // namespace

TEST_CASE("parse_problem: diamond file") {
  const ProblemFile p = parse_problem(diamond_json());
  CHECK(p.A == support::diamond_matrix());
  REQUIRE(p.c_exact.has_value());
  CHECK(*p.c_exact == support::rats({{1, 3}, {1, 2}}));
  CHECK(p.c[0] == cplx(1.0 / 3.0, 0.0));
  CHECK(*p.sigma == std::vector<std::size_t>{0, 1});
  CHECK(p.z->at(3) == cplx(0.05, 0.0));
  CHECK_FALSE(p.k_tilde.has_value());
  CHECK(p.quadrature.nodes_per_panel == ContourSpec{}.nodes_per_panel);
  CHECK(p.thresholds.identity == 1e-6);
}

TEST_CASE("parse_problem: options and complex parameters") {
  json j = diamond_json();
  j["c"] = json::array({json{{"re", 0.3}, {"im", 0.1}}, "1/2"});
  j["sigma"] = {2, 1};
  j["k_tilde"] = {1, 2};
  j["truncation"] = {{"max_order", 80}, {"tail_tol", 1e-10}};
  j["quadrature"] = {{"epsilon", 0.25}, {"nodes_per_panel", 12}};
  j["thresholds"] = {{"pde", 1e-6}};
  const ProblemFile p = parse_problem(j);
  CHECK_FALSE(p.c_exact.has_value());
  CHECK(p.c[0] == cplx(0.3, 0.1));
  CHECK(*p.sigma == std::vector<std::size_t>{0, 1});
  CHECK(*p.k_tilde == std::vector<long>{1, 2});
  CHECK(p.truncation.max_order == 80);
  CHECK(p.truncation.tail_tol == 1e-10);
  CHECK(p.quadrature.epsilon == 0.25);
  CHECK(p.quadrature.nodes_per_panel == 12);
  CHECK(p.thresholds.pde == 1e-6);
}

TEST_CASE("parse_problem: schema errors name the field") {
  json j = diamond_json();
  j.erase("A");
  CHECK(field_of(j) == "/A");

  j = diamond_json();
  j["colour"] = 1;
  CHECK(field_of(j) == "/colour");

  j = diamond_json();
  j["A"][1] = {0, 3, 1};
  CHECK(field_of(j) == "/A/1");

  j = diamond_json();
  j["A"][0][2] = 1.5;
  CHECK(field_of(j) == "/A/0/2");

  j = diamond_json();
  j["c"][0] = "1/0";
  CHECK(field_of(j) == "/c/0");

  j = diamond_json();
  j["c"] = {"1/3"};
  CHECK(field_of(j) == "/c");

  j = diamond_json();
  j["z"][2] = {{"re", 0.1}};
  CHECK(field_of(j) == "/z/2/im");

  j = diamond_json();
  j["sigma"] = {1, 5};
  CHECK(field_of(j) == "/sigma/1");

  j = diamond_json();
  j["sigma"] = {2, 2};
  CHECK(field_of(j) == "/sigma");

  j = diamond_json();
  j["truncation"] = {{"tail_tol", -1.0}};
  CHECK(field_of(j) == "/truncation/tail_tol");

  j = diamond_json();
  j["quadrature"] = {{"epsilon", 1.5}};
  CHECK(field_of(j) == "/quadrature");

  j = diamond_json();
  j["thresholds"] = {{"identity", 0}};
  CHECK(field_of(j) == "/thresholds/identity");

  j = diamond_json();
  j["weights"] = {"0", "x", "1", "1"};
  CHECK(field_of(j) == "/weights/1");
}

TEST_CASE("parse_problem_text: syntax errors carry a line") {
  try {
    parse_problem_text("{\n  \"A\": [[1, -1]],\n  \"c\": [\"1/2\",\n}\n");
    FAIL("expected an input error");
  } catch (const InputError& e) {
    REQUIRE(e.line().has_value());
    CHECK(*e.line() == 4);
  }
}

TEST_CASE("echo round trip") {
  SUBCASE("diamond") {
    const ProblemFile p = parse_problem(diamond_json());
    const json e = echo(p);
    CHECK(echo(parse_problem(e)) == e);
    CHECK(e["c"] == json::array({"1/3", "1/2"}));
    CHECK(e["sigma"] == json::array({1, 2}));
    CHECK(e["k_tilde"] == json::array({0, 0}));
  }
  SUBCASE("random problems") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> entry(-5, 5), num(-9, 9), den(1, 9), rows(1, 3);
    std::uniform_real_distribution<double> re(-2.0, 2.0);
    for (int t = 0; t < 100; ++t) {
      const int n = rows(rng), N = n + 1 + t % 3;
      json j;
      j["A"] = json::array();
      for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int k = 0; k < N; ++k) row.push_back(entry(rng));
        j["A"].push_back(row);
      }
      j["c"] = json::array();
      for (int i = 0; i < n; ++i) {
        if (t % 2)
          j["c"].push_back(std::to_string(num(rng)) + "/" + std::to_string(den(rng)));
        else
          j["c"].push_back({{"re", re(rng)}, {"im", re(rng)}});
      }
      j["z"] = json::array();
      for (int k = 0; k < N; ++k) j["z"].push_back({{"re", re(rng)}, {"im", re(rng)}});
      json sigma = json::array();
      for (int i = 0; i < n; ++i) sigma.push_back(i + 1);
      j["sigma"] = sigma;
      if (t % 3 == 0) {
        j["weights"] = json::array();
        for (int k = 0; k < N; ++k) j["weights"].push_back(std::to_string(num(rng)) + "/" + std::to_string(den(rng)));
      }
      const json e = echo(parse_problem(j));
      CHECK(echo(parse_problem(e)) == e);
      CHECK(echo(parse_problem(json::parse(e.dump()))) == e);
    }
  }
}

TEST_CASE("format_rational and to_json") {
  CHECK(format_rational(Rational(6, 4)) == "3/2");
  CHECK(format_rational(Rational(-4, 2)) == "-2");
  CHECK(format_rational(Rational(0)) == "0");
  CHECK(to_json(cplx(1.5, -2.0)) == json{{"re", 1.5}, {"im", -2.0}});
}

TEST_CASE("exit codes for library errors") {
  CHECK(exit_code_for(ErrorCode::InvalidArgument) == kInvalidInput);
  CHECK(exit_code_for(ErrorCode::DegenerateWeights) == kInvalidInput);
  CHECK(exit_code_for(ErrorCode::DimensionTooLarge) == kInvalidInput);
  CHECK(exit_code_for(ErrorCode::TailNotConverged) == kNumericFailure);
  CHECK(exit_code_for(ErrorCode::QuadratureNotConverged) == kNumericFailure);
  CHECK(exit_code_for(ErrorCode::PoleHit) == kNumericFailure);
}

TEST_CASE("analyze command") {
  const Run r = run("analyze", diamond_json());
  CHECK(r.code == kPass);
  CHECK(r.out["command"] == "analyze");
  CHECK(r.out["volume"] == 12);
  CHECK(r.out["lattice"]["saturated"] == true);
  REQUIRE(r.out["simplices"].size() == 1);
  const json& s = r.out["simplices"][0];
  CHECK(s["r"] == 12);
  CHECK(s["det"] == 12);
  CHECK(s["k_tilde_representatives"].size() == 12);
  CHECK(s["sigmabar_representatives"].size() == 12);
  CHECK(s["admissibility"]["admissible"] == true);
  CHECK(s["very_generic"]["verdict"] == "Yes");
  CHECK(r.err.find("analyze:") != std::string::npos);
}

TEST_CASE("series command") {
  const Run r = run("series", diamond_json());
  CHECK(r.code == kPass);
  CHECK(r.out["r"] == 12);
  CHECK(r.out["values"].size() == 12);
  CHECK(std::abs(r.out["sum"]["re"].get<double>() - kDiamondSum) < 1e-12);
  CHECK(std::abs(r.out["sum"]["im"].get<double>()) < 1e-12);
  for (const auto& v : r.out["values"]) CHECK(v["tail_reliable"] == true);
}

TEST_CASE("series command needs z and sigma") {
  json j = diamond_json();
  j.erase("z");
  Run r = run("series", j);
  CHECK(r.code == kInvalidInput);
  CHECK(r.out["field"] == "/z");
  j = diamond_json();
  j.erase("sigma");
  r = run("series", j);
  CHECK(r.code == kInvalidInput);
  CHECK(r.out["field"] == "/sigma");
}

TEST_CASE("mb command") {
  const Run r = run("mb", diamond_json());
  CHECK(r.code == kPass);
  REQUIRE(r.out["values"].size() == 1);
  const json& v = r.out["values"][0];
  CHECK(std::abs(v["value"]["re"].get<double>() - kDiamondSum) < 1e-6);
  CHECK(v["error_estimate"].get<double>() < 1e-10);
  CHECK(r.out["domain"]["inside"] == true);
  CHECK(r.out["domain"]["s"] == json::array({"7/12", "5/6"}));
}

TEST_CASE("mb command outside the convergence domain") {
  json j{{"A", {{1, 0, -1}, {0, 1, 2}}},
         {"c", {"1/3", "1/5"}},
         {"z", {{{"re", 1}, {"im", 0}}, {{"re", 1}, {"im", 0}}, {{"re", 0.5}, {"im", 0}}}},
         {"sigma", {1, 2}}};
  const Run r = run("mb", j);
  CHECK(r.code == kNumericFailure);
  CHECK(r.out["error"] == "TailNotConverged");
  CHECK(r.err.find("outside the convergence domain") != std::string::npos);
}

TEST_CASE("triangulate command") {
  SUBCASE("diamond") {
    const Run r = run("triangulate", diamond_json());
    CHECK(r.code == kPass);
    CHECK(r.out["solution_count"] == 12);
    CHECK(r.out["volume"] == 12);
    CHECK(r.out["count_matches_volume"] == true);
  }
  SUBCASE("degenerate weights") {
    json j = diamond_json();
    j["weights"] = {"0", "0", "0", "0"};
    const Run r = run("triangulate", j);
    CHECK(r.code == kInvalidInput);
    CHECK(r.out["error"] == "DegenerateWeights");
  }
  SUBCASE("missing weights") {
    json j = diamond_json();
    j.erase("weights");
    const Run r = run("triangulate", j);
    CHECK(r.code == kInvalidInput);
    CHECK(r.out["field"] == "/weights");
  }
}

TEST_CASE("verify command: resonant parameters short-circuit") {
  json j = diamond_json();
  j["c"] = {"0", "1/2"};
  const Run r = run("verify", j);
  CHECK(r.code == kCheckFailed);
  CHECK(r.out["pass"] == false);
  CHECK(r.out["status"].get<std::string>().find("short-circuited") == 0);
  REQUIRE(r.out["failing"].size() == 1);
  CHECK(r.out["failing"][0]["name"] == "very_generic");
}

TEST_CASE("verify command: diamond passes every check") {
  const Run r = run("verify", diamond_json());
  CHECK(r.code == kPass);
  CHECK(r.out["pass"] == true);
  CHECK(r.out["status"] == "complete");
  CHECK(r.out["failing"].empty());
  std::vector<std::string> names;
  for (const auto& c : r.out["checks"]) names.push_back(c["name"]);
  CHECK(names == std::vector<std::string>{"very_generic", "admissible", "convergence_domain", "partition",
                                          "residuals_series", "residuals_mellin_barnes", "basis_relation"});
}

TEST_CASE("run_cli argument handling") {
  const std::string good = temp_file("diamond.json", kDiamond);
  SUBCASE("file round trip") {
    const Run r = run_args({"analyze", good});
    CHECK(r.code == kPass);
    CHECK(r.out["volume"] == 12);
  }
  SUBCASE("unknown command") { CHECK(run_args({"integrate", good}).code == kInvalidInput); }
  SUBCASE("missing file") {
    const Run r = run_args({"analyze", "/nonexistent/problem.json"});
    CHECK(r.code == kInvalidInput);
    CHECK(r.out["error"] == "InvalidInput");
  }
  SUBCASE("malformed file") {
    const Run r = run_args({"analyze", temp_file("bad.json", "{\"A\": [[1, -1]],\n\"c\": }")});
    CHECK(r.code == kInvalidInput);
    CHECK(r.out["message"].get<std::string>().find("malformed JSON") != std::string::npos);
  }
  SUBCASE("help") { CHECK(run_args({"--help"}).code == kPass); }
  SUBCASE("all k~") {
    const Run r = run_args({"mb", good, "--all-ktilde"});
    CHECK(r.code == kPass);
    CHECK(r.out["values"].size() == 12);
  }
}
