#include "doctest.h"

#include "maslov/config.hpp"
#include "maslov/errors.hpp"

#include <string>

using namespace maslov;

namespace {

// The config error for `text`, or an empty one when it parses.
ConfigError error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e;
  }
  return ConfigError("");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config") {
  const RunConfig c = parse_config_text("[system]\nbuiltin = bifurcation\neps = 0.1\n");
  CHECK(c.system.builtin == "bifurcation");
  CHECK(c.system.builtin_params.at("eps") == 0.1);
  CHECK_FALSE(c.scenario_in_file);
  CHECK_FALSE(c.curve.has_value());
  CHECK_FALSE(c.disk);
  CHECK(c.maslov.initial_samples == 256);
  CHECK(c.verify_suite == "system");
}

TEST_CASE("misspelled key is named with its line") {
  const ConfigError e = error_of("[system]\nbuiltin = harmonic\n\n[singularities]\nepsilonn = 1e-3\n");
  CHECK(e.key() == "singularities.epsilonn");
  CHECK(e.line() == 5);
  CHECK(std::string(e.what()).find("epsilonn") != std::string::npos);
  CHECK(std::string(e.what()).rfind("line 5: ", 0) == 0);
}

TEST_CASE("keys a builtin does not read are rejected") {
  const ConfigError e = error_of("[system]\nbuiltin = harmonic\neps = 0.1\n");
  CHECK(e.key() == "system.eps");
  CHECK(e.line() == 3);
}

TEST_CASE("structural errors") {
  CHECK(error_of("[sytem]\nbuiltin = harmonic\n").line() == 1);
  CHECK(error_of("[system]\nbuiltin harmonic\n").line() == 2);
  CHECK(error_of("[system]\nbuiltin = harmonic\nbuiltin = saddle\n").key() == "system.builtin");
  CHECK(error_of("[system]\nbuiltin = pendulum\n").key() == "system.builtin");
  CHECK(error_of("[system]\nbuiltin = harmonic\n[system]\n").line() == 3);
  CHECK(error_of("[system\nbuiltin = harmonic\n").line() == 1);
  CHECK(error_of("[system]\nbuiltin = bifurcation\neps = zero\n").key() == "system.eps");
  CHECK(error_of("[run]\nscenario = plot\n").key() == "run.scenario");
  CHECK(error_of("[system]\nfreedoms = 2\nfield1 = p1\n").key() == "system.field2");
}

TEST_CASE("comments, blank lines and whitespace") {
  const RunConfig c = parse_config_text("# top\n\n  [run]  \n scenario=verify # trailing\n[verify]\nsuite = reference\n");
  CHECK(c.scenario == Scenario::Verify);
  CHECK(c.scenario_in_file);
  CHECK(c.verify_suite == "reference");
}

TEST_CASE("dsl system with parameters and weights") {
  const RunConfig c = parse_config_text(
      "[system]\nfreedoms = 2\nfield1 = (p1^2 + q1^2)/2\nfield2 = w*(p2^2 + q2^2)/2\nweights = 1, 0.5\n"
      "differentiation = finite_difference\n[parameters]\nw = 2\n");
  CHECK(c.system.freedoms == 2);
  CHECK(c.system.fields.size() == 2);
  CHECK(c.system.params.at("w") == 2.0);
  CHECK(c.system.weights.size() == 2);
  CHECK(c.system.weights[1] == 0.5);
  CHECK(c.system.differentiation == Differentiation::FiniteDifference);
}

TEST_CASE("curve, disk, singularities, liapunov and tolerances") {
  const RunConfig c = parse_config_text(
      "[system]\nbuiltin = bifurcation\n"
      "[curve]\ncenter = 1, 0, 0, 0\nu = 0, 0, 1, 0\nv = 0, 0, 0, 1\nradius = 0.5\nreverse = true\n"
      "[disk]\nenabled = true\ngrid = 32\n"
      "[singularities]\nseeds = 1, 0, 0, 0.1; 0, 0.3, 0, -1\nlocate = false\n"
      "[liapunov]\npoint = 0, 0.3, 0, -1\nT = 80\nwindow = 10\n"
      "[tolerances]\ninitial_samples = 512\nresidual_tol = 0.001\nabs_tol = 1e-10\n"
      "[output]\njson = a.json\ncsv = a.csv\n");
  REQUIRE(c.curve.has_value());
  CHECK(c.curve->radius == 0.5);
  CHECK(c.curve->reverse);
  CHECK(c.disk);
  CHECK(c.disk_grid == 32);
  CHECK(c.singularities.seeds.size() == 2);
  CHECK(c.singularities.seeds[1][3] == -1.0);
  CHECK_FALSE(c.singularities.locate);
  REQUIRE(c.liapunov_point.has_value());
  CHECK(c.liapunov.direct_T == 80.0);
  CHECK(c.liapunov.average.window == 10.0);
  CHECK(c.maslov.initial_samples == 512);
  CHECK(c.maslov.residual_tol == 0.001);
  CHECK(c.flow.abs_tol == 1e-10);
  CHECK(c.json_name == "a.json");
  CHECK(c.csv_name == "a.csv");
}

TEST_CASE("inconsistent curve vectors") {
  CHECK(error_of("[system]\nbuiltin = bifurcation\n[curve]\ncenter = 1, 0, 0, 0\nu = 0, 0, 1\nv = 0, 0, 0, 1\n")
            .key()
            .rfind("curve.", 0) == 0);
  CHECK(error_of("[system]\nbuiltin = bifurcation\n[curve]\ncenter = 1, 0, 0, 0\n").key() == "curve.center");
}

TEST_CASE("scenario names") {
  for (Scenario s : {Scenario::Index, Scenario::Singularities, Scenario::Liapunov, Scenario::Verify})
    CHECK(scenario_from_string(to_string(s)) == s);
  CHECK_FALSE(scenario_from_string("plot").has_value());
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(parse_config("/nonexistent/x.cfg"), ConfigError);
}

}
