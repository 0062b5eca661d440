#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lossypdc/cli/config.hpp"
#include "lossypdc/tmbs/tmbs.hpp"

namespace lossypdc::cli {

struct RunOptions {
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool grid_check = false;
};

// Step-doubling comparison for one sweep point.
struct GridCheck {
  double photons_rel_delta = 0.0;  // Tr <a^dag a>, M vs 2M steps
  double lambda_abs_delta = 0.0;   // largest |delta lambda_-| over bases
  bool passed = true;
};

struct PointResult {
  double eta_bar_db = 0.0;
  std::vector<tmbs::Report> reports;  // one per configured basis, in basis order
  std::optional<GridCheck> grid_check;
  std::optional<tmbs::OptimalityResult> optimality;
};

struct SweepResult {
  ScenarioConfig config;
  double gain_per_m = 0.0;
  FrequencyGrid grid;
  std::vector<PointResult> points;  // ascending eta_bar_db
};

// Explicit gain, or the calibration on the lossless version of the device.
double resolve_gain(const ScenarioConfig& config);

SweepResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

struct JsiResult {
  FrequencyGrid grid;
  double gain_per_m = 0.0;
  double signal_photons = 0.0;  // Tr <a^dag a> at that gain
  RMatrix intensity;            // peak-normalized
};

// Lossless device. With config.jsi_low_gain the gain is lowered until
// Tr <a^dag a> < 1e-2, otherwise the scenario gain is used.
JsiResult run_jsi(const ScenarioConfig& config);

struct GainPoint {
  double target_photons = 0.0;
  double gain_per_m = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  double lambda_minus = 0.0;
  double log_negativity = 0.0;
  double lambda_pure = 0.0;  // 1 + 2N - 2 sqrt(N^2 + N) at N = N_A
};

// Lossless device, one calibration per photon target, MSq basis.
std::vector<GainPoint> run_gain_sweep(const ScenarioConfig& config, const RunOptions& options = {});

// Runs job(i) for i in [0, count) on `threads` workers. The first failure (by
// index) is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job);

}  // namespace lossypdc::cli
