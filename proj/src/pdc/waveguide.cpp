#include "lossypdc/pdc/waveguide.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lossypdc/core/errors.hpp"

namespace lossypdc::pdc {

const FieldDispersion& WaveguideSpec::field(Field f) const {
  switch (f) {
    case Field::kPump: return pump;
    case Field::kSignal: return signal;
    case Field::kIdler: return idler;
  }
  throw InvalidInput("unknown field id");
}

void WaveguideSpec::validate() const {
  if (!(length_m > 0.0)) throw InvalidInput("waveguide length must be positive");
  for (const auto* f : {&pump, &signal, &idler}) {
    if (!(f->vg_m_s > 0.0)) throw InvalidInput("group velocities must be positive");
    if (!(f->omega0_rad_s > 0.0)) throw InvalidInput("central frequencies must be positive");
    if (!(f->n0 > 0.0)) throw InvalidInput("refractive indices must be positive");
  }
  if (!(eta_s_per_m >= 0.0) || !(eta_i_per_m >= 0.0)) {
    throw InvalidInput("loss coefficients must be non-negative");
  }
}

void LossSpec::validate() const {
  if (!(eta_bar_db >= 0.0)) throw InvalidInput("eta_bar_db must be non-negative");
  if (!(std::abs(r_eta) <= 1.0)) throw InvalidInput("|r_eta| must not exceed 1");
}

double PumpSpec::center_rad_s() const {
  return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength_m;
}

double PumpSpec::sigma_rad_s() const { return 2.0 * std::sqrt(std::numbers::ln2) / fwhm_s; }

void PumpSpec::validate() const {
  if (!(wavelength_m > 0.0)) throw InvalidInput("pump wavelength must be positive");
  if (!(fwhm_s > 0.0)) throw InvalidInput("pump FWHM must be positive");
}

void SolverConfig::validate() const {
  if (steps < 100) throw InvalidInput("solver needs at least 100 steps");
  if (!std::isfinite(gain_per_m) || gain_per_m < 0.0) {
    throw InvalidInput("gain must be finite and non-negative");
  }
}

double refractive_index(Field field, double omega_rad_s, const WaveguideSpec& spec) {
  if (!(omega_rad_s > 0.0)) throw InvalidInput("refractive_index: omega must be positive");
  const FieldDispersion& f = spec.field(field);
  return f.n0 + (omega_rad_s - f.omega0_rad_s) / f.omega0_rad_s * (kSpeedOfLight / f.vg_m_s - f.n0);
}

double wavevector(Field field, double omega_rad_s, const WaveguideSpec& spec) {
  return refractive_index(field, omega_rad_s, spec) * omega_rad_s / kSpeedOfLight;
}

double degenerate_qpm(const WaveguideSpec& spec) {
  return wavevector(Field::kPump, spec.pump.omega0_rad_s, spec) -
         wavevector(Field::kSignal, spec.signal.omega0_rad_s, spec) -
         wavevector(Field::kIdler, spec.idler.omega0_rad_s, spec);
}

double phase_mismatch(double omega_s, double omega_i, const WaveguideSpec& spec) {
  return wavevector(Field::kPump, omega_s + omega_i, spec) - wavevector(Field::kSignal, omega_s, spec) -
         wavevector(Field::kIdler, omega_i, spec) - spec.k_qpm_rad_m;
}

cdouble pump_spectrum(double omega_sum_rad_s, const PumpSpec& pump) {
  const double x = (omega_sum_rad_s - pump.center_rad_s()) / pump.sigma_rad_s();
  return {std::exp(-0.5 * x * x), 0.0};
}

CMatrix coupling_matrix(double z_m, const SolverConfig& config, const WaveguideSpec& spec,
                        const PumpSpec& pump) {
  const FrequencyGrid& grid = config.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());
  CMatrix j(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double sum = grid[static_cast<std::size_t>(r)] + grid[static_cast<std::size_t>(c)];
      const double phase = (wavevector(Field::kPump, sum, spec) - spec.k_qpm_rad_m) * z_m;
      j(r, c) = pump_spectrum(sum, pump) * std::polar(1.0, phase);
    }
  }
  CMatrix m = CMatrix::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n) = j;
  m.bottomLeftCorner(n, n) = j.transpose();
  return m;
}

std::pair<double, double> loss_coefficients(const LossSpec& loss, double length_m) {
  loss.validate();
  if (!(length_m > 0.0)) throw InvalidInput("loss_coefficients: length must be positive");
  const double eta_bar = std::numbers::ln10 / 10.0 * loss.eta_bar_db / length_m;
  return {eta_bar * (1.0 + loss.r_eta), eta_bar * (1.0 - loss.r_eta)};
}

WaveguideSpec with_losses(WaveguideSpec spec, const LossSpec& loss) {
  std::tie(spec.eta_s_per_m, spec.eta_i_per_m) = loss_coefficients(loss, spec.length_m);
  return spec;
}

WaveguideSpec reference_waveguide(const PumpSpec& pump) {
  const double wp = pump.center_rad_s();
  const double vg_p = 0.9 * kSpeedOfLight / 1.9;
  WaveguideSpec spec;
  spec.length_m = 0.01;
  spec.pump = {1.9, vg_p, wp};
  spec.signal = {1.9, 0.96 * vg_p, wp / 2.0};
  spec.idler = {1.8, 0.98 * vg_p, wp / 2.0};
  spec.k_qpm_rad_m = degenerate_qpm(spec);
  return spec;
}

double default_half_span(const WaveguideSpec& spec, const PumpSpec& pump, double span_sigma) {
  const double a = 1.0 / spec.pump.vg_m_s - 1.0 / spec.signal.vg_m_s;
  const double b = 1.0 / spec.pump.vg_m_s - 1.0 / spec.idler.vg_m_s;
  double factor = 1.0;
  if (std::abs(a - b) > 0.0) factor = std::max(1.0, std::max(std::abs(a), std::abs(b)) / std::abs(a - b));
  return span_sigma * pump.sigma_rad_s() * factor;
}

FrequencyGrid default_grid(const WaveguideSpec& spec, const PumpSpec& pump, std::size_t points,
                           double span_sigma) {
  return FrequencyGrid::uniform(spec.signal.omega0_rad_s, default_half_span(spec, pump, span_sigma),
                                points);
}

}  // namespace lossypdc::pdc
