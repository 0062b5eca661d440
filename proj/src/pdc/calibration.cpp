#include <algorithm>
#include <cmath>
#include <string>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/pdc/integrator.hpp"

namespace lossypdc::pdc {
namespace {

constexpr double kBracketLimit = 1e4;
constexpr double kTargetTolerance = 1e-4;
constexpr int kMaxIterations = 60;
constexpr int kPolishIterations = 6;
// Search steps: RK4 is converged far below the target tolerance here.
constexpr std::size_t kSearchSteps = 500;

}  // namespace

double calibrate_gain(double target_photons, const WaveguideSpec& lossless_spec, const PumpSpec& pump,
                      const SolverConfig& config, PhotonTarget target) {
  if (!(target_photons > 0.0)) throw InvalidInput("calibrate_gain: target must be positive");
  if (!lossless_spec.lossless()) throw InvalidInput("calibrate_gain: expects a lossless waveguide");
  lossless_spec.validate();

  SolverConfig trial = config;
  trial.step_check = false;
  // f(gain) = ln(N(gain) / target); monotone increasing in gain.
  auto residual = [&](double gain) {
    trial.gain_per_m = gain;
    const double photons = signal_photons(integrate_interaction_frame(trial, lossless_spec, pump), target);
    return std::log(std::max(photons, 1e-300) / target_photons);
  };

  trial.steps = std::min(config.steps, kSearchSteps);
  double lo = 1.0 / lossless_spec.length_m;
  double hi = lo;
  double f_lo = residual(lo);
  double f_hi = f_lo;
  const double seed = lo;
  if (f_lo < 0.0) {
    while (f_hi < 0.0) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      if (hi > kBracketLimit * seed) {
        throw CalibrationError("calibrate_gain: no bracket below " + std::to_string(kBracketLimit * seed) +
                               " 1/m for target " + std::to_string(target_photons));
      }
      f_hi = residual(hi);
    }
  } else {
    while (f_lo > 0.0) {
      hi = lo;
      f_hi = f_lo;
      lo *= 0.5;
      if (lo < seed / kBracketLimit) {
        throw CalibrationError("calibrate_gain: no bracket above " + std::to_string(seed / kBracketLimit) +
                               " 1/m for target " + std::to_string(target_photons));
      }
      f_lo = residual(lo);
    }
  }

  // Illinois variant of false position: keeps the bracket, converges
  // superlinearly on the smooth monotone residual.
  double root = 0.0;
  double slope = (f_hi - f_lo) / (hi - lo);
  bool found = false;
  int stale_side = 0;
  for (int it = 0; it < kMaxIterations && !found; ++it) {
    double mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    const double f_mid = residual(mid);
    if (std::abs(f_mid) <= 0.1 * kTargetTolerance || (hi - lo) <= 1e-12 * hi) {
      root = mid;
      found = true;
    } else if (f_mid < 0.0) {
      slope = (f_mid - f_lo) / (mid - lo);
      lo = mid;
      f_lo = f_mid;
      if (stale_side == -1) f_hi *= 0.5;
      stale_side = -1;
    } else {
      slope = (f_hi - f_mid) / (hi - mid);
      hi = mid;
      f_hi = f_mid;
      if (stale_side == 1) f_lo *= 0.5;
      stale_side = 1;
    }
  }
  if (!found) throw CalibrationError("calibrate_gain: did not converge");
  if (trial.steps == config.steps) return root;

  // Newton polish at the requested step count.
  trial.steps = config.steps;
  if (!(slope > 0.0)) slope = 1.0 / root;
  for (int it = 0; it < kPolishIterations; ++it) {
    const double f = residual(root);
    if (std::abs(f) <= kTargetTolerance) return root;
    root -= f / slope;
  }
  throw CalibrationError("calibrate_gain: did not converge");
}

}  // namespace lossypdc::pdc
