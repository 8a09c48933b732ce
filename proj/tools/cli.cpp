#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "finbath/errors.hpp"
#include "finbath/presets.hpp"
#include "finbath/scenario.hpp"
#include "finbath/verify.hpp"
#include "finbath/version.hpp"

namespace finbath::cli {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> mc_traj;
  unsigned threads = 0;

  scenario::Overrides overrides() const { return {seed, mc_traj}; }
};

void add_run_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--out-dir", f.out_dir, "Directory receiving the CSV files")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Monte Carlo seed, overrides the config");
  cmd->add_option("--mc-traj", f.mc_traj, "Monte Carlo trajectory count, overrides the config")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "Worker threads for Monte Carlo (0 = all cores)");
}

// Writes every artifact, then reports whether any of them stopped early.
int write_artifacts(const std::vector<scenario::Artifact>& artifacts, const std::string& dir,
                    std::ostream& out, std::ostream& err) {
  fs::create_directories(dir);
  int code = kOk;
  for (const auto& a : artifacts) {
    const fs::path path = fs::path(dir) / a.filename;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    a.table.write(f);
    f.close();
    if (!f) throw Error("failed writing '" + path.string() + "'");
    out << "wrote " << path.string() << " (" << a.table.rows.size() << " rows";
    if (!a.excluded_t.empty()) out << ", " << a.excluded_t.size() << " excluded times";
    out << ")\n";
    if (a.stopped_at) {
      err << a.filename << ": stopped at singular generator, t = " << *a.stopped_at << "\n";
      code = kSingularity;
    }
  }
  return code;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const SingularityError& e) {
    err << "singularity at t = " << e.time() << ": " << e.what() << "\n";
    return kSingularity;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailed;
  }
}

int cmd_run(const std::string& config, const CommonFlags& f, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    const auto c = scenario::load_config(config, f.overrides());
    return write_artifacts(scenario::run_scenario(c, {f.threads}), f.out_dir, out, err);
  });
}

int cmd_rates(const std::string& config, const CommonFlags& f, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const auto c = scenario::load_config(config, f.overrides());
    return write_artifacts({scenario::emit_rates(c)}, f.out_dir, out, err);
  });
}

int cmd_presets(std::vector<std::string> names, const CommonFlags& f, std::ostream& out,
                std::ostream& err) {
  if (names.empty()) {
    for (const auto& n : presets::names()) out << n << "\n";
    return kOk;
  }
  if (names.size() == 1 && names.front() == "all") names = presets::names();
  return guarded(err, [&] {
    int code = kOk;
    for (const auto& name : names) {
      for (const auto& c : presets::preset(name, f.overrides())) {
        code = std::max(
            code, write_artifacts(scenario::run_scenario(c, {f.threads}), f.out_dir, out, err));
      }
    }
    return code;
  });
}

int cmd_verify(const std::string& config, const std::string& fault, const CommonFlags& f,
               std::ostream& out, std::ostream& err) {
  verify::VerifyOptions opt;
  opt.threads = f.threads;
  opt.seed = f.seed;
  opt.mc_trajectories = f.mc_traj;
  if (!fault.empty()) {
    if (fault != "phi44") {
      err << "config error: --inject-fault: unknown fault '" << fault << "'\n";
      return kConfigError;
    }
    opt.inject_phi44_fault = true;
  }
  if (!config.empty()) {
    const int code = guarded(err, [&] {
      opt.config = scenario::load_config(config, f.overrides());
      return kOk;
    });
    if (code != kOk) return code;
  }
  const auto results = verify::run_verification(opt);
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "  ["
        << r.seconds << " s]\n";
  }
  const auto failed = std::count_if(results.begin(), results.end(),
                                    [](const verify::CheckResult& r) { return !r.passed; });
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-bath open qubit dynamics: exact maps, canonical master equations, "
               "thermodynamics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonFlags flags;
  std::string config;
  std::string fault;
  std::vector<std::string> preset_names;

  auto* run_cmd = app.add_subcommand("run", "Run a JSON scenario and write one CSV per output");
  run_cmd->add_option("config", config, "Scenario file")->required();
  add_run_flags(run_cmd, flags);

  auto* verify_cmd = app.add_subcommand("verify", "Run the self-check suites");
  verify_cmd->add_option("config", config, "Optional scenario narrowing the parameters");
  verify_cmd->add_option("--inject-fault", fault, "Deliberately corrupt the map (phi44)");
  add_run_flags(verify_cmd, flags);

  auto* rates_cmd = app.add_subcommand("rates", "Write the central spin rate table");
  rates_cmd->add_option("config", config, "Scenario file")->required();
  add_run_flags(rates_cmd, flags);

  auto* presets_cmd = app.add_subcommand("presets", "Write preset scenarios (no name: list them)");
  presets_cmd->add_option("names", preset_names, "Preset names, or 'all'");
  add_run_flags(presets_cmd, flags);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (*run_cmd) return cmd_run(config, flags, out, err);
  if (*rates_cmd) return cmd_rates(config, flags, out, err);
  if (*presets_cmd) return cmd_presets(preset_names, flags, out, err);
  return cmd_verify(config, fault, flags, out, err);
}

}  // namespace finbath::cli
