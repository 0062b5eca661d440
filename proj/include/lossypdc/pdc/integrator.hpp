#pragma once

#include "lossypdc/core/types.hpp"
#include "lossypdc/pdc/waveguide.hpp"

namespace lossypdc::pdc {

// Integrates the spatial master equations for D(z), C(z) from vacuum at z = 0
// to z = L with fixed-step classical RK4 and returns the lab-frame state.
//
// Only the three non-trivial N x N blocks (<a^dag a>, <b^dag b>, <a b>) are
// evolved, in the interaction picture with respect to the real wave vectors.
// There the generator contains only the phase mismatch and the losses, so the
// step size is not tied to the optical carrier.
CorrelationState integrate(const SolverConfig& config, const WaveguideSpec& spec,
                           const PumpSpec& pump);

// Same solve, returned in the interaction frame (free-propagation phases
// e^{i k(w) z} removed). All basis-independent quantities are identical.
CorrelationState integrate_interaction_frame(const SolverConfig& config, const WaveguideSpec& spec,
                                             const PumpSpec& pump);

// exp(i k_f(w_n) z) for every grid point.
CVector free_propagation_phases(Field field, const FrequencyGrid& grid, const WaveguideSpec& spec,
                                double z_m);

CorrelationState to_interaction_frame(const CorrelationState& lab, const WaveguideSpec& spec);
CorrelationState to_lab_frame(const CorrelationState& interaction, const WaveguideSpec& spec);

// |<a_i b_j>|^2 normalized to peak 1 (rows: signal, cols: idler).
RMatrix jsi(const CorrelationState& state);

enum class PhotonTarget {
  kFirstMode,  // dominant eigenvalue of <a^dag a>
  kTotal,      // Tr <a^dag a>
};

double signal_photons(const CorrelationState& state, PhotonTarget target);

// Gain for which the lossless device yields `target_photons` signal photons
// (relative accuracy 1e-3 or better). Bracketing from 1/L, then a safeguarded
// false-position search on the monotone map gain -> photons.
double calibrate_gain(double target_photons, const WaveguideSpec& lossless_spec, const PumpSpec& pump,
                      const SolverConfig& config, PhotonTarget target = PhotonTarget::kFirstMode);

}  // namespace lossypdc::pdc
