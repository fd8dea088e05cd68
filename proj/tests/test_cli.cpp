#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fracvi/cli.hpp"
#include "fracvi/errors.hpp"
#include "fracvi/field_io.hpp"
#include "fracvi/problem_file.hpp"

using namespace fracvi;
namespace fs = std::filesystem;

namespace {

const fs::path kData = FRACVI_TEST_DATA_DIR;
const fs::path kProblems = fs::path(FRACVI_SOURCE_DIR) / "problems";

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("fracvi_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

int run_command(const fs::path& problem, Command cmd, const fs::path& out, std::vector<std::string> overrides = {},
                bool corrupt = false, std::string* log_text = nullptr) {
  RunConfig cfg;
  cfg.problem = problem;
  cfg.command = cmd;
  cfg.out = out;
  cfg.overrides = std::move(overrides);
  cfg.corrupt_penalty = corrupt;
  std::ostringstream log;
  int code = run(cfg, log);
  if (log_text) *log_text = log.str();
  return code;
}

std::map<std::string, std::string> read_report(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

int count_rows(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++rows;
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("minimal problem file parses") {
  ProblemFile pf = parse_problem(kData / "minimal.ini");
  CHECK(pf.spec.grid.n() == 256);
  CHECK(pf.spec.coeffs.is_identity());
  CHECK(pf.spec.sigma.value() == doctest::Approx(0.8));
  CHECK(pf.method == SolveMethod::penalized);
  CHECK(pf.inputs.empty());
}

TEST_CASE("obstacle with a zero is rejected") {
  CHECK_THROWS_AS(parse_problem(kData / "g_zero.ini"), ValidationError);
  try {
    parse_problem(kData / "g_zero.ini");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("bounded-below") != std::string::npos);
  }
}

TEST_CASE("rotation coefficients are nonsymmetric and pass the audits") {
  ProblemFile pf = parse_problem(kData / "rotation.ini");
  const Coefficients& a = pf.spec.coeffs;
  CHECK_FALSE(a.symmetric());
  CHECK(a.min_symmetric_eigenvalue() >= a.a_star());
  CHECK(a.max_operator_norm() <= a.a_upper() * (1 + 1e-14));
  CHECK(a.min_symmetric_eigenvalue() == doctest::Approx(1.5 * std::cos(0.3)).epsilon(1e-12));
  CHECK_THROWS_AS(parse_problem(kData / "rotation.ini", {"coefficients.a=rotation(0.3, 1.45, 1.5)"}),
                  CoercivityViolation);
}

TEST_CASE("parse errors carry the position") {
  try {
    parse_problem(kData / "bad_key.ini");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(e.column() == 1);
  }
  try {
    parse_problem_text("[grid]\ndim = 1\nn = 2x5\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_AS(parse_problem_text("[grid]\ndim = 1\ndim = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_problem_text("[mesh]\nn = 4\n"), ParseError);
  // overrides have no source position, so their syntax errors are validation errors
  CHECK_THROWS_AS(parse_problem(kData / "minimal.ini", {"obstacle.g=constant(1"}), ValidationError);
}

TEST_CASE("overrides target valid fields only") {
  ProblemFile pf = parse_problem(kData / "minimal.ini", {"levels=4", "grid.n=128", "eps_factor=0.3"});
  CHECK(pf.schedule.levels == 4);
  CHECK(pf.spec.grid.n() == 128);
  CHECK(pf.schedule.factor == doctest::Approx(0.3));
  CHECK_THROWS_AS(parse_problem(kData / "minimal.ini", {"no_such_key=1"}), ValidationError);
  CHECK_THROWS_AS(parse_problem(kData / "minimal.ini", {"levels"}), ValidationError);
}

TEST_CASE("command names") {
  CHECK(parse_command("study-sigma") == Command::study_sigma);
  CHECK(to_string(Command::cross_check) == "cross-check");
  CHECK_THROWS_AS(parse_command("plot"), ValidationError);
}

TEST_CASE("solve on an inactive instance") {
  fs::path out = scratch("inactive");
  std::string log;
  CHECK(run_command(kData / "inactive.ini", Command::solve, out, {}, false, &log) == kExitOk);
  CHECK(log.find("FAIL") == std::string::npos);
  ScalarField lambda = io::read_scalar_field(out / "solve_lambda.fvif");
  CHECK(linf_norm(lambda) == 0.0);
  auto rep = read_report(out / "summary.report");
  CHECK(rep["status"] == "ok");
  CHECK(rep["exit_code"] == "0");
  fs::remove_all(out);
}

TEST_CASE("every emitted file is listed in the summary") {
  fs::path out = scratch("listing");
  REQUIRE(run_command(kData / "minimal.ini", Command::verify_estimates, out) == kExitOk);
  auto rep = read_report(out / "summary.report");
  std::set<std::string> listed;
  for (const auto& [k, v] : rep)
    if (k.rfind("file.", 0) == 0) listed.insert(v);
  for (const auto& entry : fs::directory_iterator(out)) {
    std::string name = entry.path().filename().string();
    if (name == "summary.report") continue;
    CHECK_MESSAGE(listed.count(name) == 1, name);
  }
  for (const auto& name : listed) CHECK(fs::exists(out / name));
  fs::remove_all(out);
}

TEST_CASE("exit codes") {
  fs::path out = scratch("codes");
  CHECK(run_command(kData / "does_not_exist.ini", Command::solve, out) == kExitConfig);
  CHECK(run_command(kData / "bad_key.ini", Command::solve, out) == kExitConfig);
  CHECK(run_command(kData / "minimal.ini", Command::solve, out, {"bogus=1"}) == kExitConfig);
  CHECK(run_command(kData / "minimal.ini", Command::solve, out, {"picard_max_iters=1"}) == kExitNonConvergence);
  CHECK(run_command(kData / "rotation.ini", Command::cross_check, out) == kExitConfig);
  std::string log;
  CHECK(run_command(kData / "minimal.ini", Command::verify_estimates, out, {}, true, &log) == kExitCheckFailed);
  CHECK(log.find("FAIL") != std::string::npos);
  auto rep = read_report(out / "summary.report");
  CHECK(rep["exit_code"] == "3");
  fs::remove_all(out);
}

TEST_CASE("study-sigma writes seven rows") {
  fs::path out = scratch("sigma");
  CHECK(run_command(kProblems / "gradient_source_1d.ini", Command::study_sigma, out) == kExitOk);
  CHECK(count_rows(out / "sigma_l2.dat") == 7);
  CHECK(count_rows(out / "sigma_h_half.dat") == 7);
  fs::remove_all(out);
}

TEST_CASE("study-identity and study-epsilon") {
  fs::path out = scratch("studies");
  CHECK(run_command(kData / "minimal.ini", Command::study_identity, out, {"grid.n=1024", "grid.half_length=8"}) ==
        kExitOk);
  CHECK(run_command(kProblems / "epsilon_decay_1d.ini", Command::study_epsilon, out) == kExitOk);
  fs::remove_all(out);
}

TEST_CASE("repeated runs reproduce every scalar") {
  fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run_command(kData / "minimal.ini", Command::verify_estimates, a) == kExitOk);
  REQUIRE(run_command(kData / "minimal.ini", Command::verify_estimates, b) == kExitOk);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    fs::path other = b / entry.path().filename();
    REQUIRE(fs::exists(other));
    if (entry.path().extension() == ".report") {
      auto ra = read_report(entry.path()), rb = read_report(other);
      ra.erase("wall_time");
      rb.erase("wall_time");
      CHECK(ra == rb);
    } else {
      CHECK(slurp(entry.path()) == slurp(other));
    }
    ++compared;
  }
  CHECK(compared > 5);
  fs::remove_all(a);
  fs::remove_all(b);
}
