// End-to-end checks of the koop binary: exit codes per the documented
// contract and byte-identical summaries across repeated runs.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KOOP_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string scenario_path(const std::string& name) {
  return std::string(KOOP_SCENARIO_DIR) + "/" + name;
}

fs::path fresh_out(const std::string& tag) {
  fs::path dir = fs::path(KOOP_TEST_OUT_DIR) / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("check-laws on the translation scenario exits 0") {
  const auto out = fresh_out("cli_laws");
  CHECK(run_cli("check-laws --scenario " + scenario_path("translation.json") + " --out " +
                out.string() + " --quiet") == 0);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "detail.csv"));
}

TEST_CASE("characterize on the averaging control exits 1") {
  const auto out = fresh_out("cli_avg");
  CHECK(run_cli("characterize --scenario " + scenario_path("averaging_control.json") + " --out " +
                out.string() + " --quiet") == 1);
}

TEST_CASE("check-laws on the crandall-liggett scenario exits 0") {
  const auto out = fresh_out("cli_cl");
  CHECK(run_cli("check-laws --scenario " + scenario_path("crandall_liggett_linear.json") +
                " --out " + out.string() + " --quiet") == 0);
}

TEST_CASE("attractor on the logistic scenario exits 0 and finds the fixed point") {
  const auto out = fresh_out("cli_attr");
  CHECK(run_cli("attractor --scenario " + scenario_path("logistic.json") + " --out " +
                out.string() + " --quiet") == 0);
  CHECK(fs::exists(out / "attractor.json"));
  CHECK(fs::exists(out / "decay_curves.csv"));
}

TEST_CASE("attractor on the compactified scenario exits 0") {
  const auto out = fresh_out("cli_compact");
  CHECK(run_cli("attractor --scenario " + scenario_path("compactified_translation.json") +
                " --out " + out.string() + " --quiet") == 0);
}

TEST_CASE("a missing scenario file exits 2") {
  CHECK(run_cli("check-laws --scenario /nonexistent/nowhere.json --out " +
                fresh_out("cli_missing").string()) == 2);
}

TEST_CASE("a malformed scenario exits 2") {
  const auto out = fresh_out("cli_malformed");
  const fs::path bad = out / "bad.json";
  std::ofstream(bad) << "{ this is not json";
  CHECK(run_cli("check-laws --scenario " + bad.string() + " --out " + out.string()) == 2);
}

TEST_CASE("a runtime failure exits 3") {
  const auto out = fresh_out("cli_runtime");
  const fs::path escaping = out / "escaping.json";
  // Growth field on a short chart: trajectories leave the box mid-simulation.
  std::ofstream(escaping) << R"({
    "spec_version": 1,
    "name": "escaping",
    "flow": {"kind": "ode", "field": "linear", "rate": -1.0, "step": 0.01,
             "exit_margin": 0.001, "chart": [[0.0, 2.0]]},
    "grid": {"lo": 1.0, "hi": 1.5, "n": 3},
    "knobs": {"t_grid": {"start": 0.0, "stop": 5.0, "step": 1.0}}
  })";
  CHECK(run_cli("simulate --scenario " + escaping.string() + " --out " + out.string()) == 3);
}

TEST_CASE("summaries are byte-identical across runs") {
  const auto out_a = fresh_out("cli_det_a");
  const auto out_b = fresh_out("cli_det_b");
  const std::string scenario = scenario_path("translation.json");
  REQUIRE(run_cli("characterize --scenario " + scenario + " --out " + out_a.string() +
                  " --quiet") == 0);
  REQUIRE(run_cli("characterize --scenario " + scenario + " --out " + out_b.string() +
                  " --quiet") == 0);
  CHECK(slurp(out_a / "summary.json") == slurp(out_b / "summary.json"));
  CHECK(slurp(out_a / "detail.csv") == slurp(out_b / "detail.csv"));
}

TEST_CASE("tol-scale loosens a failing suite") {
  const auto out = fresh_out("cli_scale");
  const fs::path strict = out / "strict_resolvent.json";
  // Resolvent identity with an unreachable tolerance: quadrature noise alone
  // sits orders of magnitude above 1e-12.
  std::ofstream(strict) << R"({
    "spec_version": 1,
    "name": "strict-resolvent",
    "flow": {"kind": "translation"},
    "observables": [{"family": "exp", "a": 1.0}],
    "grid": {"lo": 0.0, "hi": 2.0, "n": 11},
    "knobs": {"h": 0.001, "tol": 1e-12, "nu": 1.0, "T_max": 30.0, "n_quad": 512}
  })";
  CHECK(run_cli("resolvent --scenario " + strict.string() + " --out " + out.string() +
                " --quiet") == 1);
  CHECK(run_cli("resolvent --scenario " + strict.string() + " --out " + out.string() +
                " --tol-scale 1000000000 --quiet") == 0);
}
