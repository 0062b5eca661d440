// lossypdc: scenario sweeps, JSI and gain sweeps for lossy type-II PDC.
//
// Exit codes: 0 ok, 2 bad configuration or arguments, 3 solver failure.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>

#include "lossypdc/cli/config.hpp"
#include "lossypdc/cli/output.hpp"
#include "lossypdc/cli/runner.hpp"
#include "lossypdc/core/errors.hpp"

#ifndef LOSSYPDC_CONFIG_DIR
#define LOSSYPDC_CONFIG_DIR "configs"
#endif

namespace {

using namespace lossypdc;

constexpr int kExitSchema = 2;
constexpr int kExitSolver = 3;

struct Globals {
  std::string config;
  std::string out = "out";
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool grid_check = false;
};

std::string stem_of(const std::string& config_path) { return std::filesystem::path(config_path).stem().string(); }

void list(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) fmt::print("wrote {}\n", f.string());
}

int scenario(const Globals& g, bool table) {
  const cli::ScenarioConfig cfg = cli::load_config(g.config);
  const cli::SweepResult result = cli::run_scenario(cfg, {g.threads, g.seed, g.grid_check});
  list(cli::write_scenario(result, g.out, stem_of(g.config)));

  fmt::print("{} gain {:.6g} 1/m\n", cfg.name, result.gain_per_m);
  if (table) {
    fmt::print("{:>6} {:>5} {:>8} {:>8} {:>9} {:>7} {:>8} {:>8}\n", "dB", "basis", "N_A", "N_B", "lambda_-",
               "E", "sq_dB", "purity");
    for (const auto& p : result.points) {
      for (const auto& r : p.reports) {
        fmt::print("{:>6.2f} {:>5} {:>8.3f} {:>8.3f} {:>9.4f} {:>7.3f} {:>8.3f} {:>8.4f}\n", p.eta_bar_db,
                   decomp::basis_label(r.modes.label), r.n_a, r.n_b, r.lambda_minus, r.log_negativity,
                   r.squeezing_db, r.purity);
      }
    }
  }

  bool ok = true;
  for (const auto& p : result.points) {
    if (p.grid_check) {
      fmt::print("grid-check {:.2f} dB: photons rel delta {:.3e}, lambda_- abs delta {:.3e} {}\n", p.eta_bar_db,
                 p.grid_check->photons_rel_delta, p.grid_check->lambda_abs_delta,
                 p.grid_check->passed ? "ok" : "FAILED");
      ok = ok && p.grid_check->passed;
    }
    if (p.optimality) {
      fmt::print("msq-optimality {:.2f} dB: search best {:.8g}, MSq {:.8g}\n", p.eta_bar_db,
                 p.optimality->best_found, p.optimality->msq_value);
    }
  }
  if (!ok) {
    fmt::print(stderr, "step-doubling gate not met; increase solver.steps\n");
    return kExitSolver;
  }
  return 0;
}

int jsi(const Globals& g) {
  const cli::ScenarioConfig cfg = cli::load_config(g.config);
  const cli::JsiResult r = cli::run_jsi(cfg);
  list(cli::write_jsi(r, cfg, g.out, stem_of(g.config)));
  fmt::print("gain {:.6g} 1/m, Tr<a^dag a> = {:.3e}\n", r.gain_per_m, r.signal_photons);
  return 0;
}

int gain_sweep(const Globals& g) {
  const cli::ScenarioConfig cfg = cli::load_config(g.config);
  const auto points = cli::run_gain_sweep(cfg, {g.threads, g.seed, false});
  list(cli::write_gain_sweep(points, cfg, g.out, stem_of(g.config)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Broadband TMBS analysis of lossy type-II PDC waveguides"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "TOML scenario file");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for sweep points")->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", g.seed, "seed for the MSq optimality search");
  app.add_flag("--grid-check", g.grid_check, "rerun every point with doubled steps and report deltas");

  auto* scen = app.add_subcommand("scenario", "loss sweep over the configured bases");
  auto* jsi_cmd = app.add_subcommand("jsi", "normalized joint spectral intensity");
  auto* gain_cmd = app.add_subcommand("gain-sweep", "lossless lambda_- and E against photon number");
  auto* table = app.add_subcommand("table1", "WG2 at 5 dB in all three bases");
  for (auto* sub : {scen, jsi_cmd, gain_cmd, table}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  try {
    if (*table && g.config.empty()) g.config = std::string(LOSSYPDC_CONFIG_DIR) + "/wg2_table1.toml";
    if (g.config.empty()) throw cli::ConfigError("--config", "required");
    if (*scen) return scenario(g, false);
    if (*table) return scenario(g, true);
    if (*jsi_cmd) return jsi(g);
    return gain_sweep(g);
  } catch (const cli::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitSchema;
  } catch (const InvalidInput& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kExitSchema;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
