#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "parabolic/cli.hpp"
#include "parabolic/report_json.hpp"
#include "parabolic/scenario_config.hpp"

using namespace parabolic;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("parabolic_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

json minimal_config() {
  return json::parse(R"({
    "version": 1,
    "name": "tiny",
    "domain": {"dim": 1, "extent": [1.0], "cells": [8]},
    "diffusion": {"identical": 1.0},
    "potential": {"constant": [[-1, 1], [1, -1]]},
    "initial": {"constant": [1, 0]},
    "time": {"dt": 0.05, "horizon": 20, "window": 1},
    "scheme": "strang+backward-euler"
  })");
}

}  // namespace

TEST_CASE("examples lists the built-ins") {
  const auto r = run({"examples"});
  CHECK(r.code == 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines >= 7);
  for (const char* name : {"intro_rotation", "ex_quasi_positive", "ex_rotation_variable", "ex_rotation_constant", "ex_linf",
                           "ex_constant_rotation", "ex_diagonalizable", "ex_diagonalizable_imaginary"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
  const auto show = run({"examples", "--show", "ex_linf"});
  CHECK(show.code == 0);
  CHECK(json::parse(show.out)["name"] == "ex_linf");
  CHECK(run({"examples", "--show", "nope"}).code == cli::kExitConfig);
}

TEST_CASE("predict --example ex_rotation_constant") {
  const auto r = run({"predict", "--example", "ex_rotation_constant"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["verdict"] == "DoesNotConverge");
  CHECK(j["witness"]["kind"] == "common_kernel");
  CHECK(j["witness"]["beta"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("verify --example ex_linf") {
  const auto dir = scratch("verify");
  const auto r = run({"verify", "--example", "ex_linf", "--cells", "32", "--horizon", "60", "--out", dir.string()});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["prediction"]["rule"] == "Thm lp-case");
  CHECK(j["detection"]["verdict"] == "Converged");
  CHECK(j["contradiction"] == false);
  CHECK(json::parse(slurp(dir / "verify.json")) == j);
}

TEST_CASE("classify output") {
  const auto r = run({"classify", "--example", "ex_quasi_positive", "--lp", "3", "--cells", "16"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["quasi_positive"] == true);
  CHECK(j["l2_dissipative"] == false);
  CHECK(j["positive_kernel_vector"].size() == 2);
  CHECK(j["numeric_lp"].size() == 1);
}

TEST_CASE("simulate writes trace and detection") {
  const auto dir = scratch("simulate");
  const auto r = run({"simulate", "--example", "intro_rotation", "--dt", "0.01", "--cells", "16", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir / "trace.csv");
  CHECK(csv.rfind("t,norm1,norm2,norminf,residual\n", 0) == 0);
  CHECK(json::parse(slurp(dir / "detection.json"))["verdict"] == "Oscillating");

  // Determinism: byte-identical outputs.
  const auto dir2 = scratch("simulate2");
  run({"simulate", "--example", "intro_rotation", "--dt", "0.01", "--cells", "16", "--out", dir2.string()});
  CHECK(slurp(dir2 / "trace.csv") == csv);
  CHECK(slurp(dir2 / "detection.json") == slurp(dir / "detection.json"));
}

TEST_CASE("spectrum writes eigenvalues") {
  const auto dir = scratch("spectrum");
  const auto r = run({"spectrum", "--example", "ex_constant_rotation", "--cells", "16", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir / "eigenvalues.csv");
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 33);
  CHECK(json::parse(slurp(dir / "spectrum.json"))["imaginary_axis_eigenvalues"].size() == 2);
}

TEST_CASE("config files") {
  const auto dir = scratch("config");
  const auto path = dir / "tiny.json";
  {
    std::ofstream f(path);
    f << minimal_config().dump(2);
  }
  const auto r = run({"verify", "--config", path.string()});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["detection"]["verdict"] == "Converged");

  SUBCASE("field-level diagnostics") {
    auto bad = minimal_config();
    bad["domain"]["dim"] = 3;
    {
      std::ofstream f(path);
      f << bad.dump();
    }
    const auto e = run({"predict", "--config", path.string()});
    CHECK(e.code == cli::kExitConfig);
    CHECK(e.err.find("domain.dim") != std::string::npos);
  }

  SUBCASE("broken JSON") {
    {
      std::ofstream f(path);
      f << "{ not json";
    }
    CHECK(run({"predict", "--config", path.string()}).code == cli::kExitConfig);
  }

  SUBCASE("scenario invariants") {
    auto bad = minimal_config();
    bad["diffusion"]["identical"] = -1.0;
    {
      std::ofstream f(path);
      f << bad.dump();
    }
    CHECK(run({"simulate", "--config", path.string(), "--out", dir.string()}).code == cli::kExitConfig);
  }

  CHECK(run({"predict", "--config", (dir / "missing.json").string()}).code == cli::kExitConfig);
}

TEST_CASE("argument errors") {
  CHECK(run({}).code == cli::kExitConfig);
  CHECK(run({"predict"}).code == cli::kExitConfig);
  CHECK(run({"predict", "--example", "no_such"}).code == cli::kExitConfig);
  CHECK(run({"predict", "--example", "ex_linf", "--config", "x.json"}).code == cli::kExitConfig);
  CHECK(run({"simulate", "--example", "ex_linf", "--scheme", "euler"}).code == cli::kExitConfig);
  CHECK(run({"simulate", "--example", "ex_linf", "--dt", "-1"}).code == cli::kExitConfig);
  CHECK(run({"frobnicate"}).code == cli::kExitConfig);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("parse_config diagnostics") {
  auto check_error = [](json j, const std::string& field) {
    try {
      parse_config(j);
      FAIL("expected ConfigError for " << field);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  auto j = minimal_config();
  j["version"] = 2;
  check_error(j, "version");
  j = minimal_config();
  j.erase("potential");
  check_error(j, "potential");
  j = minimal_config();
  j["potential"] = {{"constant", {{1, 2, 3}, {4, 5, 6}}}};
  check_error(j, "potential");
  j = minimal_config();
  j["time"]["dt"] = "fast";
  check_error(j, "time.dt");
  j = minimal_config();
  j["scheme"] = "rk4";
  check_error(j, "scheme");
  j = minimal_config();
  j["initial"] = {{"constant", {1, 2, 3}}};
  CHECK_THROWS(build_scenario(parse_config(j)));
}

TEST_CASE("config variants build") {
  auto j = minimal_config();
  j["domain"] = json::parse(R"({"dim": 2, "extent": [1.0, 2.0], "cells": [4, 6]})");
  j["diffusion"] = json::parse(R"({"per_equation": [{"xx": {"poly": [[1.0], [0.5]]}, "yy": 2.0}, {"poly": [1.0, 1.0]}]})");
  j["potential"] = json::parse(R"({"affine": {"c0": [[-1, 0], [0, -1]],
      "terms": [{"f": "x", "matrix": [[0, 1], [1, 0]]},
                {"f": "y", "matrix": [[[0, 1], 0], [0, [0, -1]]]},
                {"f": {"poly": [[0, 1], [1]]}, "matrix": [[0.1, 0], [0, 0.1]]}]}})");
  j["initial"] = {{"random", {{"seed", 7}, {"amplitude", 2.0}}}};
  const auto c = parse_config(j);
  const auto s = build_scenario(c);
  CHECK(s.grid().cell_count() == 24);
  CHECK_FALSE(s.diffusion.identical());
  CHECK_FALSE(s.potential.is_real());
  CHECK(s.initial.values().cwiseAbs().maxCoeff() <= 2.0);
  CHECK(build_scenario(parse_config(j)).initial == s.initial);
  j["initial"]["random"]["seed"] = 8;
  CHECK_FALSE(build_scenario(parse_config(j)).initial == s.initial);

  j["initial"] = {{"cosine", {1, 2}}};
  const auto cos_s = build_scenario(parse_config(j));
  CHECK(cos_s.initial.values()(0, 0).real() == doctest::Approx(std::cos(std::numbers::pi * 0.125)));
}

TEST_CASE("built-ins round-trip through JSON") {
  for (const auto& b : builtin_list()) {
    const auto c = *builtin_config(b.name);
    const auto back = parse_config(json::parse(to_json(c).dump()));
    CHECK(back == c);
    CHECK(build_scenario(back) == build_scenario(c));
  }
}
