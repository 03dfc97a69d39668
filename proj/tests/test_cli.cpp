#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "birkhoff/cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace birkhoff;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "birkhoff_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("birkhoff_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("solve writes a verified solution") {
  const fs::path dir = scratch("solve");
  const Run r = run({"solve", "--problem", "double-integrator-energy", "--N", "16", "--out", dir.string()});
  CHECK(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "solution.json"));
  CHECK(j["cost"].get<double>() == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(j["verification"]["pass"].get<bool>());
  CHECK(j["grid"] == "lgl");
  CHECK(j["form"] == "a");
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(slurp(dir / "trajectory.csv").rfind("t,x0,x1,x2,u0,lambda0,lambda1,lambda2\n", 0) == 0);
}

TEST_CASE("form a* gives the same cost") {
  const fs::path d1 = scratch("form_a");
  const fs::path d2 = scratch("form_astar");
  CHECK(run({"solve", "--problem", "double-integrator-energy", "--N", "16", "--out", d1.string()}).code == 0);
  CHECK(run({"solve", "--problem", "double-integrator-energy", "--N", "16", "--form", "a_star", "--out",
             d2.string()}).code == 0);
  const double c1 = nlohmann::json::parse(slurp(d1 / "solution.json"))["cost"].get<double>();
  const double c2 = nlohmann::json::parse(slurp(d2 / "solution.json"))["cost"].get<double>();
  CHECK(std::abs(c1 - c2) <= 1e-8);
}

TEST_CASE("bad configuration exits with 64") {
  CHECK(run({"solve", "--problem", "no-such-problem"}).code == kExitUsage);
  CHECK(run({"solve", "--problem", "scalar-lq", "--grid", "gauss"}).code == kExitUsage);
  CHECK(run({"solve", "--problem", "scalar-lq", "--form", "c"}).code == kExitUsage);
  CHECK(run({"solve", "--problem", "scalar-lq", "--form", "a_star", "--scaled"}).code == kExitUsage);
  CHECK(run({"solve", "--problem", "scalar-lq", "--N", "abc"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"verify", "--problem", "scalar-lq", "--form", "b"}).code == kExitUsage);
  CHECK(run({"solve", "--problem", "scalar-lq", "--config", "/nonexistent.json"}).code == kExitUsage);
}

TEST_CASE("verification failure exits with 2") {
  const fs::path dir = scratch("strict");
  const Run r = run({"solve", "--problem", "nonlinear-scalar", "--grid", "cgl", "--N", "8", "--tol-verify", "1e-12",
                     "--out", dir.string()});
  CHECK(r.code == kExitVerificationFailed);
}

TEST_CASE("solver failure exits with 1") {
  const fs::path dir = scratch("fail");
  const Run r = run({"solve", "--problem", "nonlinear-scalar", "--max-iter", "1", "--out", dir.string()});
  CHECK(r.code == kExitSolverFailure);
}

TEST_CASE("config file overrides flags") {
  const fs::path dir = scratch("config");
  {
    std::ofstream cfg(dir / "run.json");
    cfg << R"({"problem": "scalar-lq", "N": 6, "grid": "cgl"})";
  }
  const Run r = run({"solve", "--problem", "double-integrator-energy", "--N", "16", "--config",
                     (dir / "run.json").string(), "--out", dir.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "solution.json"));
  CHECK(j["problem"] == "scalar-lq");
  CHECK(j["N"] == 6);
  CHECK(j["grid"] == "cgl");
}

TEST_CASE("commands are idempotent") {
  const fs::path d1 = scratch("idem1");
  const fs::path d2 = scratch("idem2");
  for (const fs::path& d : {d1, d2}) {
    CHECK(run({"solve", "--problem", "nonlinear-scalar", "--N", "12", "--out", d.string()}).code == 0);
    CHECK(run({"verify", "--problem", "nonlinear-scalar", "--N", "12", "--out", d.string()}).code == 0);
  }
  for (const char* f : {"solution.json", "trajectory.csv", "report.json", "dual.csv"}) {
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
}

TEST_CASE("indirect, bench and grids subcommands") {
  const fs::path dir = scratch("misc");
  CHECK(run({"indirect", "--problem", "scalar-lq", "--N", "8", "--out", dir.string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "solution.json"))["method"] == "indirect");

  CHECK(run({"bench", "--N-list", "4,8", "--out", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "cond_lgl.csv"));
  CHECK(fs::exists(dir / "cond_lgl.gp"));

  CHECK(run({"bench", "--study", "convergence", "--problem", "scalar-lq", "--N-list", "4,8", "--out",
             dir.string()}).code == 0);
  CHECK(fs::exists(dir / "convergence_scalar-lq_a_lgl.csv"));

  CHECK(run({"grids", "--grid", "cgl", "--N", "4", "--domain", "0,2", "--out", dir.string()}).code == 0);
  const auto g = nlohmann::json::parse(slurp(dir / "birkhoff_cgl_4.json"));
  CHECK(g["weights"].size() == 5);
  CHECK(g["domain"][1].get<double>() == 2.0);
}

TEST_CASE("help exits with 0") { CHECK(run({"--help"}).code == 0); }
