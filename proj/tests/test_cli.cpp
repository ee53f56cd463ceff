#include "doctest.h"

#include "maslov/run.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace maslov;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("maslov_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_text(const std::string& text, Scenario s, const fs::path& dir) {
  RunConfig c = parse_config_text(text);
  c.scenario = s;
  std::ostringstream out, err;
  return run_scenario(c, dir.string(), false, out, err);
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(MASLOV_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const std::string kBifurcation = "[system]\nbuiltin = bifurcation\neps = 0.1\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("index run writes the record and the trace") {
  const fs::path dir = scratch("index");
  CHECK(run_text(kBifurcation, Scenario::Index, dir) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "index.json"));
  CHECK(j["status"] == "ok");
  CHECK(j["exit_code"] == 0);
  CHECK(j["table"][0]["name"] == "maslov_index");
  CHECK(j["table"][0]["value"] == 2);
  std::ifstream csv(dir / "index_trace.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "s,re_detM,im_detM,unwrapped_arg");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows >= 257);
}

TEST_CASE("records are byte-identical across runs") {
  const std::string text = kBifurcation + "[disk]\nenabled = true\n";
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  CHECK(run_text(text, Scenario::Index, a) == kExitOk);
  CHECK(run_text(text, Scenario::Index, b) == kExitOk);
  CHECK(slurp(a / "index.json") == slurp(b / "index.json"));
  CHECK(slurp(a / "index_trace.csv") == slurp(b / "index_trace.csv"));
}

TEST_CASE("a curve through the singular set is a numerical failure") {
  const fs::path dir = scratch("hit");
  const std::string text = "[system]\nbuiltin = harmonic\n[curve]\ncenter = 1, 0\nu = 1, 0\nv = 0, 1\nradius = 1\n";
  CHECK(run_text(text, Scenario::Index, dir) == kExitNumerical);
  const auto j = nlohmann::json::parse(slurp(dir / "index.json"));
  CHECK(j["status"] == "error");
  CHECK(j["error"]["kind"] == "curve hits singular set");
}

TEST_CASE("integrals not in involution are a build failure") {
  const fs::path dir = scratch("inv");
  const std::string text = "[system]\nfreedoms = 2\nfield1 = p1^2/2 + q2\nfield2 = p2\n";
  CHECK(run_text(text, Scenario::Index, dir) == kExitConfig);
}

TEST_CASE("singularities, liapunov and verify scenarios") {
  const fs::path dir = scratch("scen");
  CHECK(run_text("[system]\nbuiltin = double_well\n", Scenario::Singularities, dir) == kExitOk);
  const auto s = nlohmann::json::parse(slurp(dir / "singularities.json"));
  CHECK(s["status"] == "ok");
  CHECK(run_text("[system]\nbuiltin = product_hyperbolic\n[liapunov]\npoint = 0, 1, 0, 0\n", Scenario::Liapunov,
                 dir) == kExitOk);
  CHECK(run_text("[system]\nbuiltin = rotational\nn = 4\n", Scenario::Verify, dir) == kExitOk);
}

TEST_CASE("binary exit codes") {
  const fs::path dir = scratch("bin");
  const std::string src = MASLOV_SOURCE_DIR;
  CHECK(run_binary("index --config " + src + "/configs/bifurcation_minimal.cfg --out " + dir.string()) == 0);
  CHECK(run_binary("verify --config " + src + "/configs/reference_verify.cfg --out " + dir.string()) == 0);
  {
    std::ofstream f(dir / "bad.cfg");
    f << "[system]\nbuiltin = harmonic\n[singularities]\nepsilonn = 1e-3\n";
  }
  CHECK(run_binary("singularities --config " + (dir / "bad.cfg").string() + " --out " + dir.string()) == 3);
  const auto j = nlohmann::json::parse(slurp(dir / "singularities.json"));
  CHECK(j["error"]["message"].get<std::string>().find("epsilonn") != std::string::npos);
  CHECK(run_binary("plot --config " + src + "/configs/bifurcation_minimal.cfg") == 3);
  CHECK(run_binary("index") == 3);
  CHECK(run_binary("liapunov --config " + src + "/configs/bifurcation_index.cfg --out " + dir.string()) == 3);
}

}
