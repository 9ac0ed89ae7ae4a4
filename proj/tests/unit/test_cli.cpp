#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rankdeg_cli/commands.hpp"
#include "rankdeg_cli/expression.hpp"
#include "rankdeg_cli/problem_file.hpp"

using namespace rankdeg;
using namespace rankdeg::cli;

namespace {

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "rankdeg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("rankdeg_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("expression grammar") {
  const ExprScope t2{2.0, 0.5, nullptr};
  CHECK(Expression::parse("1 + 2 * 3")(t2) == 7.0);
  CHECK(Expression::parse("2 ^ 3 ^ 2")(t2) == 512.0);
  CHECK(Expression::parse("-t ^ 2")(t2) == -4.0);
  CHECK(Expression::parse("(1 - t) / 4")(t2) == -0.25);
  CHECK(Expression::parse("sin(pi / 2) + cos(0) + exp(0)")(t2) == doctest::Approx(3.0));
  CHECK(Expression::parse("t * s", 0, true)(t2) == 1.0);
  CHECK(Expression::parse("1.5e-1")(t2) == doctest::Approx(0.15));
  Vec y(2);
  y << 3.0, -1.0;
  CHECK(Expression::parse("y1^2 + exp(y2) * t", 2)(ExprScope{1.0, 0.0, &y}) == doctest::Approx(9 + std::exp(-1.0)));
  CHECK(Expression::parse("4")(t2) == 4.0);
  CHECK(Expression::parse("4").is_constant());
  CHECK_FALSE(Expression::parse("t + 1").is_constant());
}

TEST_CASE("expression errors") {
  CHECK_THROWS_AS(Expression::parse("1 +"), InvalidInput);
  CHECK_THROWS_AS(Expression::parse("(1 + 2"), InvalidInput);
  CHECK_THROWS_AS(Expression::parse("tan(t)"), InvalidInput);
  CHECK_THROWS_AS(Expression::parse("y3", 2), InvalidInput);
  CHECK_THROWS_AS(Expression::parse("y1"), InvalidInput);
  CHECK_THROWS_AS(Expression::parse("s"), InvalidInput);
  CHECK_THROWS_AS(Expression::parse("1 2"), InvalidInput);
  CHECK_THROWS_AS(Expression::parse("$"), InvalidInput);
}

TEST_CASE("problem file: constant pair analyzes to nu = 2") {
  const auto dir = temp_dir("pair");
  const auto file = dir / "pair.json";
  std::ofstream(file) << R"J({
    "kind": "linear-iae", "r": 2, "t_start": 0, "T": 1,
    "A": [[1, 0], [0, 0]],
    "k": [[0, 1], [1, 0]],
    "f": ["2*sin(t)", "1 - cos(t)"],
    "exact": ["sin(t)", "cos(t)"]
  })J";
  const ResolvedProblem rp = resolve_problem(file.string());
  const nlohmann::json doc = analyze(rp, std::nullopt);
  CHECK(doc["nu"] == 2);
  CHECK(doc["consistency"]["passed"] == true);
  const auto& a2 = doc["levels"][2]["A_at_start"];
  CHECK(a2[0][0].get<double>() == doctest::Approx(0.5));
  CHECK(a2[1][0].get<double>() == doctest::Approx(1.5));
  CHECK(verify_exact(rp.problem, uniform_grid({0, 1}, 11), 1e-8).passed);
}

TEST_CASE("problem file: nonlinear DAE mirrors ex32") {
  nlohmann::json doc = nlohmann::json::parse(R"J({
    "kind": "semi-nonlinear-dae", "r": 2, "t_start": 0, "T": 2,
    "A": [[1, 0], [0, 0]],
    "F": ["-y1^2 - exp(y2)", "-y1*y2"],
    "f": ["-cos(t)^2 - exp(t) - sin(t)", "-t*cos(t)"],
    "exact": ["cos(t)", "t"],
    "critical_conditions": [{"id": "y1=0", "expr": "y1"}]
  })J");
  const Problem p = load_problem(doc);
  REQUIRE(std::holds_alternative<SemiNonlinearDAE>(p));
  const auto& q = std::get<SemiNonlinearDAE>(p);
  CHECK(q.critical_conditions.size() == 1);
  CHECK(q.y0(0) == 1.0);
  CHECK(verify_exact(p, uniform_grid({0, 2}, 21), 1e-8).passed);
  CHECK(jacobian_mismatch(q, 5, 1) < 1e-6);  // finite-difference Jacobian only
}

TEST_CASE("problem file errors") {
  CHECK_THROWS_AS(load_problem(nlohmann::json::parse(R"({"kind": "linear-iae", "r": 0})")), InvalidInput);
  CHECK_THROWS_AS(load_problem(nlohmann::json::parse(R"({"kind": "weird", "r": 1, "A": [[1]]})")), InvalidInput);
  CHECK_THROWS_AS(load_problem(nlohmann::json::parse(
                      R"({"kind": "linear-iae", "r": 2, "A": [[1, 0]], "k": [[0,0],[0,0]], "f": [0, 0]})")),
                  InvalidInput);
  CHECK_THROWS_AS(load_problem(nlohmann::json::parse(
                      R"({"kind": "linear-iae", "r": 1, "A": [["y1"]], "k": [[0]], "f": [0]})")),
                  InvalidInput);
  CHECK_THROWS_AS(resolve_problem("/nonexistent/problem.json"), NotFound);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"list"}) == kExitOk);
  CHECK(run_cli({"analyze", "--problem", "no-such-problem"}) == kExitUnknownProblem);
  CHECK(run_cli({"reproduce", "fig9"}) == kExitUnknownProblem);
  CHECK(run_cli({"solve-dae", "--problem", "ex32", "--h", "-1"}) == kExitInvalid);
  CHECK(run_cli({"solve-iae", "--problem", "ex34", "--c", "0.5,0.2"}) == kExitInvalid);
  CHECK(run_cli({"analyze", "--problem", "ex32"}) == kExitInvalid);
  CHECK(run_cli({"classify", "--problem", "ex32", "--interval", "1", "3"}) == kExitInvalid);
  CHECK(run_cli({"frobnicate"}) == kExitInvalid);
  CHECK(run_cli({"--help"}) == kExitOk);
}

TEST_CASE("classify command output") {
  std::string out;
  REQUIRE(run_cli({"classify", "--problem", "ex31", "--interval", "0", "1", "--format", "text"}, &out) == kExitOk);
  CHECK(out == "well-structure, index 2\n");
  REQUIRE(run_cli({"classify", "--problem", "ex32", "--interval", "1", "2"}, &out) == kExitOk);
  const auto doc = nlohmann::json::parse(out);
  CHECK(doc["classification"] == "free-structure-dependent");
  CHECK(std::abs(doc["critical_points"][0].get<double>() - 1.5707963267948966) <= 1e-3);
  std::string comma;
  REQUIRE(run_cli({"classify", "--problem", "ex32", "--interval", "1,2"}, &comma) == kExitOk);
  CHECK(comma == out);
}

TEST_CASE("solver failure exits 0 with the failure recorded") {
  const auto dir = temp_dir("fail");
  // ex33 diverges under BDF1 at this step size.
  REQUIRE(run_cli({"solve-dae", "--problem", "ex33", "--h", "0.002", "--out", dir.string()}) == kExitOk);
  const auto diag = nlohmann::json::parse(slurp(dir / "diagnostics.json"));
  CHECK_FALSE(diag["failure"].is_null());
  CHECK(std::filesystem::exists(dir / "solution.csv"));
}

TEST_CASE("solution CSV schema") {
  const auto dir = temp_dir("csv");
  REQUIRE(run_cli({"solve-iae", "--problem", "volterra-exp", "--h", "0.1", "--out", dir.string()}) == kExitOk);
  std::ifstream f(dir / "solution.csv");
  std::string header;
  std::string row;
  std::getline(f, header);
  std::getline(f, row);
  std::getline(f, row);
  CHECK(header == "t,u1,exact1,error");
  CHECK(std::count(row.begin(), row.end(), ',') == 3);
  // exact1 = e^{-0.01} printed with 17 significant digits round-trips.
  const size_t c1 = row.find(',');
  const size_t c2 = row.find(',', c1 + 1);
  const size_t c3 = row.find(',', c2 + 1);
  const std::string exact1 = row.substr(c2 + 1, c3 - c2 - 1);
  CHECK(exact1.size() == 19);
  CHECK(std::stod(exact1) == std::exp(-std::stod(row.substr(0, c1))));
}

TEST_CASE("reproduce output is byte-identical across runs") {
  const auto a = temp_dir("rep_a");
  const auto b = temp_dir("rep_b");
  REQUIRE(run_cli({"reproduce", "fig2", "--seed", "3", "--out", a.string()}) == kExitOk);
  REQUIRE(run_cli({"reproduce", "fig2", "--seed", "3", "--out", b.string()}) == kExitOk);
  CHECK(slurp(a / "fig2.csv") == slurp(b / "fig2.csv"));
  CHECK(slurp(a / "fig2_summary.json") == slurp(b / "fig2_summary.json"));
  const auto summary = nlohmann::json::parse(slurp(a / "fig2_summary.json"));
  CHECK(summary["criterion"] == 6);
  CHECK(summary.contains("verdict"));
}
