#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cli.hpp"

namespace fs = std::filesystem;
using finbath::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const char* root = std::getenv("FINBATH_TEST_TMP");
  const fs::path dir = fs::path(root ? root : fs::temp_directory_path().string()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& json) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << json;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and version") {
    CHECK(invoke({"--help"}).code == 0);
    const auto v = invoke({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);
  }

  TEST_CASE("usage errors exit with 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"run"}).code == 2);
    CHECK(invoke({"run", "x.json", "--mc-traj", "0"}).code == 2);
  }

  TEST_CASE("run writes one CSV per output") {
    const fs::path dir = scratch("run");
    const auto cfg = write_config(
        dir, R"({"name": "t1", "model": "rtn", "t_max": 1.0, "n_points": 11,
                 "outputs": ["state", "thermo"]})");
    const auto r = invoke({"run", cfg.string(), "--out-dir", (dir / "out").string()});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    const std::string state = slurp(dir / "out" / "t1_state.csv");
    CHECK(state.rfind("# tool: finbath 0.1.0\n", 0) == 0);
    CHECK(state.find("\nt,rho00,rho01_re,rho01_im,rho11\n") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "t1_thermo.csv"));
  }

  TEST_CASE("configuration errors exit with 2 and name the field") {
    const fs::path dir = scratch("bad");
    const auto cfg = write_config(dir, R"({"model": "rtn", "params": {"gama": 1}})");
    const auto r = invoke({"run", cfg.string(), "--out-dir", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("params.gama") != std::string::npos);
    CHECK(invoke({"run", (dir / "missing.json").string()}).code == 2);
    CHECK(invoke({"presets", "nope", "--out-dir", dir.string()}).code == 2);
  }

  TEST_CASE("a propagation stopped at a singular generator exits with 3") {
    const fs::path dir = scratch("singular");
    const auto cfg = write_config(
        dir, R"({"name": "me", "model": "central-spin", "t_max": 2.0, "n_points": 201,
                 "outputs": ["master-eq-check"]})");
    const auto r = invoke({"run", cfg.string(), "--out-dir", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("stopped at singular generator") != std::string::npos);
    CHECK(fs::exists(dir / "me_master-eq-check.csv"));
  }

  TEST_CASE("rates subcommand") {
    const fs::path dir = scratch("rates");
    const auto cfg = write_config(dir, R"({"name": "r", "model": "central-spin", "n_points": 51})");
    CHECK(invoke({"rates", cfg.string(), "--out-dir", dir.string()}).code == 0);
    CHECK(slurp(dir / "r_rates.csv").find("nu_plus,nu_minus,nu_z") != std::string::npos);
    const auto tele = write_config(dir, R"({"model": "rtn"})");
    CHECK(invoke({"rates", tele.string(), "--out-dir", dir.string()}).code == 2);
  }

  TEST_CASE("presets list and write") {
    const auto list = invoke({"presets"});
    CHECK(list.code == 0);
    CHECK(list.out == "fig1a\nfig1b\nfig1c\nfig1d\nfig1e\nhcan\n");
    const fs::path dir = scratch("presets");
    CHECK(invoke({"presets", "fig1d", "--out-dir", dir.string()}).code == 0);
    CHECK(fs::exists(dir / "fig1d_thermo.csv"));
  }

  TEST_CASE("repeated runs are byte-identical") {
    const fs::path dir = scratch("repeat");
    const auto cfg = write_config(
        dir, R"({"name": "mc", "model": "rtn", "t_max": 2.0, "n_points": 11, "outputs": ["mc"],
                 "mc_trajectories": 3000})");
    REQUIRE(invoke({"run", cfg.string(), "--out-dir", (dir / "a").string(), "--threads", "1"})
                .code == 0);
    REQUIRE(invoke({"run", cfg.string(), "--out-dir", (dir / "b").string(), "--threads", "4"})
                .code == 0);
    CHECK(slurp(dir / "a" / "mc_mc.csv") == slurp(dir / "b" / "mc_mc.csv"));
    REQUIRE(invoke({"run", cfg.string(), "--out-dir", (dir / "c").string(), "--seed", "9"})
                .code == 0);
    CHECK(slurp(dir / "a" / "mc_mc.csv") != slurp(dir / "c" / "mc_mc.csv"));
  }

  TEST_CASE("verify passes, and fails when the map is corrupted") {
    const fs::path dir = scratch("verify");
    const auto cfg = write_config(dir, R"({"model": "central-spin"})");
    const auto ok = invoke({"verify", cfg.string()});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    const auto bad = invoke({"verify", cfg.string(), "--inject-fault", "phi44"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("FAIL cs-generator-structure") != std::string::npos);
    CHECK(invoke({"verify", "--inject-fault", "phi12"}).code == 2);
  }
}
