#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "sgdsat/config.hpp"
#include "sgdsat/error.hpp"
#include "sgdsat/report.hpp"

using namespace sgdsat;
using nlohmann::json;

namespace {

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("stepsize expressions") {
  const double c = 2.5;
  const int n = 200;
  CHECK(resolve_c0("c/n", c, n) == doctest::Approx(c / n));
  CHECK(resolve_c0("4c/n", c, n) == doctest::Approx(4 * c / n));
  CHECK(resolve_c0("4*c/n", c, n) == doctest::Approx(4 * c / n));
  CHECK(resolve_c0("c/(30n)", c, n) == doctest::Approx(c / (30.0 * n)));
  CHECK(resolve_c0("c/(50n)", c, n) == doctest::Approx(c / (50.0 * n)));
  CHECK(resolve_c0("c/30", c, n) == doctest::Approx(c / 30));
  CHECK(resolve_c0("2c", c, n) == doctest::Approx(2 * c));
  CHECK(resolve_c0("c", c, n) == doctest::Approx(c));
  CHECK(resolve_c0("1e-4", c, n) == doctest::Approx(1e-4));
  for (const char* bad : {"", "c/", "x/n", "c/(30m)", "-1", "c*c", "0"})
    CHECK(code_of([&] { resolve_c0(bad, c, n); }) == "bad_config");
}

TEST_CASE("configs parse strictly and round trip") {
  const json j = json::parse(R"json({
    "problem": "gravity", "n": 64, "nu": [1, 2], "eps": [0, 0.01],
    "schedules": [{"c0": "c/(30n)"}, {"c0": "c", "alpha": 0.1, "override_admissibility": true}],
    "runs": 7, "max_epochs": 123, "base_seed": 9, "noise_seed": 4,
    "checkpoint": "geometric", "checkpoint_factor": 1.1, "fit_window": [10, 100], "threads": 2
  })json");
  const ExperimentConfig cfg = parse_config(j);
  CHECK(cfg.problem == "gravity");
  CHECK(cfg.nu == std::vector<double>{1, 2});
  CHECK(cfg.schedules.size() == 2);
  CHECK(cfg.schedules[1].alpha == 0.1);
  CHECK(cfg.schedules[1].override_admissibility);
  CHECK(cfg.fit_window->second == 100.0);
  CHECK(cfg.cadence().kind == Cadence::Kind::geometric);
  CHECK_FALSE(cfg.cadence().with_residual);
  const ExperimentConfig back = parse_config(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));

  const ExperimentConfig dflt = parse_config(json::object());
  CHECK(dflt.problem == "phillips");
  CHECK(dflt.noise_seed == 2024);
  CHECK(dflt.runs == 50);

  for (const char* bad : {R"({"runz": 3})", R"({"n": "big"})", R"({"runs": 0})", R"({"problem": "deriv2"})",
                          R"({"schedules": [{"c0": "c/q"}]})", R"({"checkpoint": "sometimes"})",
                          R"({"fit_window": [5, 1]})", R"({"problem": "phillips", "n": 30})"})
    CHECK(code_of([&] { parse_config(json::parse(bad)); }) == "bad_config");

  ExperimentConfig full = cfg;
  apply_full_scale(full);
  CHECK(full.n == 1000);
  CHECK(full.runs == 100);
}

TEST_CASE("summary csv and json") {
  RunSummary s;
  s.nu = 1;
  s.eps = 0.05;
  s.c0 = 0.0123456789;
  s.e_sgd = 3.52e-2;
  s.k_sgd = 29.4;
  s.e_lm = 3.16e-2;
  s.k_lm = 8;
  s.e_sgd_stderr = 1e-4;
  s.slope = NAN;
  s.problem = "phillips";
  s.schedule = "c/n";
  const std::string csv = summaries_csv({s});
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "nu,eps,c0,alpha,e_sgd,k_sgd,e_lm,k_lm,stderr,slope");
  CHECK(row == "1,0.05,0.0123457,0,0.0352,29.4,0.0316,8,0.0001,nan");
  CHECK(csv_number(1.0 / 3.0) == "0.333333");

  const json j = summary_to_json(s);
  CHECK(j.at("slope").is_null());
  CHECK(j.at("stderr") == 1e-4);
  const RunSummary back = summary_from_json(j);
  CHECK(back.e_sgd == s.e_sgd);
  CHECK(back.c0 == s.c0);
  CHECK(back.k_lm == 8);
  CHECK(std::isnan(back.slope));
  CHECK(summaries_from_json(summaries_to_json({s, s})).size() == 2);
  // Doubles survive a text round trip bit for bit.
  const json parsed = json::parse(summaries_to_json({s}).dump());
  CHECK(summaries_from_json(parsed)[0].c0 == s.c0);
}

TEST_CASE("problem csv is deterministic with full precision") {
  const TestProblem p = make_problem(ProblemKind::shaw, 8);
  const std::string a = problem_csv(p);
  CHECK(a == problem_csv(make_problem(ProblemKind::shaw, 8)));
  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  CHECK(line == "name,n,m");
  std::getline(in, line);
  CHECK(line == "shaw,8,8");
  std::getline(in, line);
  CHECK(std::stod(line.substr(0, line.find(','))) == p.A(0, 0));
  int rows = 3;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2 + 8 + 1);
}

TEST_CASE("output writing") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sgdsat_out_test";
  fs::remove_all(dir);
  const fs::path p = write_output(dir / "nested", "a.json", dump_json(json{{"x", 1}}));
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "{\n  \"x\": 1\n}\n");
  CHECK(code_of([&] { write_output(dir, "../escape.txt", "x"); }) != "");
  CHECK(code_of([&] { write_output(dir, "sub/x.txt", "x"); }) != "");
  const fs::path blocker = dir / "file";
  write_output(dir, "file", "x");
  CHECK(code_of([&] { write_output(blocker, "y.txt", "x"); }) == "unwritable_output");
  fs::remove_all(dir);
}

TEST_CASE("manifest carries environment and outputs") {
  const json m = make_manifest("run", config_to_json(ExperimentConfig{}), {"summary.csv"});
  CHECK(m.at("command") == "run");
  CHECK(m.at("outputs") == json::array({"summary.csv"}));
  CHECK(m.at("environment").contains("compiler"));
  CHECK(m.at("environment").at("rng") == "mt19937_64");
  CHECK(parse_config(m.at("config")).problem == "phillips");
}
