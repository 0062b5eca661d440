#include "lossypdc/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/pdc/integrator.hpp"

namespace lossypdc::cli {
namespace {

constexpr double kGridCheckTolerance = 1e-4;
constexpr double kLowGainTrace = 1e-2;

CorrelationState solve(const ScenarioConfig& cfg, double gain, double eta_bar_db, std::size_t steps) {
  pdc::SolverConfig solver = cfg.solver(gain);
  solver.steps = steps;
  const pdc::WaveguideSpec spec = pdc::with_losses(cfg.waveguide, {eta_bar_db, cfg.r_eta});
  return cfg.lab_frame_profiles ? pdc::integrate(solver, spec, cfg.pump)
                                : pdc::integrate_interaction_frame(solver, spec, cfg.pump);
}

std::vector<tmbs::Report> reports_for(const ScenarioConfig& cfg, const CorrelationState& state) {
  std::vector<tmbs::Report> out;
  for (auto basis : cfg.bases) out.push_back(tmbs::report(state, decomp::modes_for(basis, state)));
  return out;
}

}  // namespace

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double resolve_gain(const ScenarioConfig& cfg) {
  if (cfg.gain.kind == GainMode::Kind::kExplicit) return cfg.gain.per_m;
  pdc::WaveguideSpec lossless = cfg.waveguide;
  lossless.eta_s_per_m = lossless.eta_i_per_m = 0.0;
  return pdc::calibrate_gain(cfg.gain.target_photons, lossless, cfg.pump, cfg.solver(1.0), cfg.gain.target);
}

SweepResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  if (cfg.eta_bar_db.empty()) throw InvalidInput("scenario has no loss values");
  SweepResult result{cfg, resolve_gain(cfg), cfg.grid(), {}};

  std::vector<double> etas = cfg.eta_bar_db;
  std::sort(etas.begin(), etas.end());
  result.points.resize(etas.size());
  parallel_for(etas.size(), options.threads, [&](std::size_t i) {
    PointResult& point = result.points[i];
    point.eta_bar_db = etas[i];
    const CorrelationState state = solve(cfg, result.gain_per_m, etas[i], cfg.steps);
    point.reports = reports_for(cfg, state);

    if (options.grid_check) {
      const CorrelationState fine = solve(cfg, result.gain_per_m, etas[i], 2 * cfg.steps);
      const std::vector<tmbs::Report> fine_reports = reports_for(cfg, fine);
      GridCheck gc;
      const double coarse_n = state.signal_photons().trace().real();
      const double fine_n = fine.signal_photons().trace().real();
      gc.photons_rel_delta = std::abs(fine_n - coarse_n) / std::max(std::abs(fine_n), 1e-300);
      for (std::size_t b = 0; b < fine_reports.size(); ++b) {
        gc.lambda_abs_delta =
            std::max(gc.lambda_abs_delta, std::abs(fine_reports[b].lambda_minus - point.reports[b].lambda_minus));
      }
      gc.passed = gc.photons_rel_delta <= kGridCheckTolerance;
      point.grid_check = gc;
    }
    if (cfg.optimality_trials > 0) {
      point.optimality = tmbs::verify_msq_optimality(state, cfg.optimality_trials, options.seed + i);
    }
  });
  return result;
}

JsiResult run_jsi(const ScenarioConfig& cfg) {
  pdc::WaveguideSpec lossless = cfg.waveguide;
  lossless.eta_s_per_m = lossless.eta_i_per_m = 0.0;

  auto run = [&](double gain) {
    return pdc::integrate_interaction_frame(cfg.solver(gain), lossless, cfg.pump);
  };
  double gain = 0.0;
  std::optional<CorrelationState> state;
  if (cfg.jsi_low_gain) {
    // Tr D grows like gain^2 while it is small.
    gain = 0.1 / cfg.waveguide.length_m;
    for (int it = 0; it < 40; ++it) {
      state = run(gain);
      const double trace = state->signal_photons().trace().real();
      if (trace < kLowGainTrace && trace > 0.0) break;
      gain *= trace > 0.0 ? std::min(0.5, std::sqrt(0.5 * kLowGainTrace / trace)) : 0.5;
    }
  } else {
    gain = resolve_gain(cfg);
    state = run(gain);
  }
  JsiResult out{state->grid(), gain, state->signal_photons().trace().real(), pdc::jsi(*state)};
  if (cfg.jsi_low_gain && !(out.signal_photons < kLowGainTrace)) {
    throw NumericalError("could not reach the low-gain regime");
  }
  return out;
}

std::vector<GainPoint> run_gain_sweep(const ScenarioConfig& cfg, const RunOptions& options) {
  if (cfg.sweep_photons.empty()) throw InvalidInput("gain sweep needs gain_sweep.photons");
  pdc::WaveguideSpec lossless = cfg.waveguide;
  lossless.eta_s_per_m = lossless.eta_i_per_m = 0.0;

  std::vector<double> targets = cfg.sweep_photons;
  std::sort(targets.begin(), targets.end());
  std::vector<GainPoint> out(targets.size());
  parallel_for(targets.size(), options.threads, [&](std::size_t i) {
    GainPoint& p = out[i];
    p.target_photons = targets[i];
    p.gain_per_m = pdc::calibrate_gain(targets[i], lossless, cfg.pump, cfg.solver(1.0), cfg.gain.target);
    const CorrelationState state = pdc::integrate_interaction_frame(cfg.solver(p.gain_per_m), lossless, cfg.pump);
    const tmbs::Report r = tmbs::report(state, decomp::msq_modes(state));
    p.n_a = r.n_a;
    p.n_b = r.n_b;
    p.lambda_minus = r.lambda_minus;
    p.log_negativity = r.log_negativity;
    p.lambda_pure = 1.0 + 2.0 * r.n_a - 2.0 * std::sqrt(r.n_a * r.n_a + r.n_a);
  });
  return out;
}

}  // namespace lossypdc::cli
