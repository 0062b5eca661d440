#pragma once

#include <utility>

#include "lossypdc/core/types.hpp"

namespace lossypdc::pdc {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

enum class Field { kPump, kSignal, kIdler };

// Linear refractive-index model around a central frequency.
struct FieldDispersion {
  double n0 = 1.0;             // index at omega0
  double vg_m_s = kSpeedOfLight;  // group velocity at omega0
  double omega0_rad_s = 1.0;
};

struct WaveguideSpec {
  double length_m = 0.01;
  FieldDispersion pump;
  FieldDispersion signal;
  FieldDispersion idler;
  double k_qpm_rad_m = 0.0;
  double eta_s_per_m = 0.0;  // power loss, signal
  double eta_i_per_m = 0.0;  // power loss, idler

  const FieldDispersion& field(Field f) const;
  bool lossless() const { return eta_s_per_m == 0.0 && eta_i_per_m == 0.0; }
  void validate() const;
};

// Mean total power loss over the device in dB plus signal/idler asymmetry.
struct LossSpec {
  double eta_bar_db = 0.0;
  double r_eta = 0.0;
  void validate() const;
};

struct PumpSpec {
  double wavelength_m = 755e-9;
  double fwhm_s = 0.4e-12;  // intensity FWHM of the transform-limited pulse

  double center_rad_s() const;
  // Amplitude-spectrum sigma: S(w) = exp(-(w - wp)^2 / (2 sigma^2)).
  double sigma_rad_s() const;
  void validate() const;
};

struct SolverConfig {
  FrequencyGrid grid;
  double gain_per_m = 0.0;
  std::size_t steps = 2000;
  // Re-run with 2x steps and require Tr<a^dag a> to agree to 1e-4.
  bool step_check = false;

  void validate() const;
};

double refractive_index(Field field, double omega_rad_s, const WaveguideSpec& spec);
double wavevector(Field field, double omega_rad_s, const WaveguideSpec& spec);

// k_QPM that phase-matches pump(omega0_p) -> signal(omega0_s) + idler(omega0_i).
double degenerate_qpm(const WaveguideSpec& spec);

double phase_mismatch(double omega_s, double omega_i, const WaveguideSpec& spec);

cdouble pump_spectrum(double omega_sum_rad_s, const PumpSpec& pump);

// M(z) = [[0, J], [J^T, 0]], J_ij = S(w_i + w_j) exp(i (k_p(w_i + w_j) - k_QPM) z).
CMatrix coupling_matrix(double z_m, const SolverConfig& config, const WaveguideSpec& spec,
                        const PumpSpec& pump);

// (eta_s, eta_i) in 1/m; eta_bar_db is the mean power attenuation over length_m.
std::pair<double, double> loss_coefficients(const LossSpec& loss, double length_m);

WaveguideSpec with_losses(WaveguideSpec spec, const LossSpec& loss);

// Device of the reference study: 1 cm, n_p = n_s = 1.9, n_i = 1.8,
// v_g^p = 0.9 c / n_p, v_g^s = 0.96 v_g^p, v_g^i = 0.98 v_g^p, degenerate QPM.
WaveguideSpec reference_waveguide(const PumpSpec& pump);

// Uniform grid centred on the degenerate frequency; the half span is
// span_sigma pump sigmas stretched by the group-velocity mismatch factor
// max(|a|, |b|) / |a - b| with a, b = 1/v_p - 1/v_{s,i}.
FrequencyGrid default_grid(const WaveguideSpec& spec, const PumpSpec& pump,
                           std::size_t points = 101, double span_sigma = 6.0);
double default_half_span(const WaveguideSpec& spec, const PumpSpec& pump, double span_sigma);

}  // namespace lossypdc::pdc
