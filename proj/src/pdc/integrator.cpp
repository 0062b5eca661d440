#include "lossypdc/pdc/integrator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/core/gaussian.hpp"
#include "lossypdc/simd/dispatch.hpp"
#include "lossypdc/simd/split_matrix.hpp"

namespace lossypdc::pdc {
namespace {

using simd::SplitMatrix;

// W = A - A^dag
void anti_hermitian_part(const SplitMatrix& a, SplitMatrix& w) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      w.re(i, j) = a.re(i, j) - a.re(j, i);
      w.im(i, j) = a.im(i, j) + a.im(j, i);
    }
  }
}

// out = op(a) with op = transpose, optionally conjugated.
void transpose(const SplitMatrix& a, SplitMatrix& out, bool conjugate) {
  const double sign = conjugate ? -1.0 : 1.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out.re(j, i) = a.re(i, j);
      out.im(j, i) = sign * a.im(i, j);
    }
  }
}

struct Moments {
  SplitMatrix signal;  // <a^dag a>
  SplitMatrix idler;   // <b^dag b>
  SplitMatrix pairs;   // <a b>

  explicit Moments(std::size_t n) : signal(n, n), idler(n, n), pairs(n, n) {}
};

// Interaction-picture generator for the type-II block structure:
//   dDa/dz = -eta_s Da + i G (P - P^dag),        P = conj(X) J^T
//   dDb/dz = -eta_i Db + i G (Q - Q^dag),        Q = X^dag J
//   dX/dz  = -eta_bar X + i G (Da^T J + J Db + J)
class MomentIntegrator {
 public:
  MomentIntegrator(const SolverConfig& config, const WaveguideSpec& spec, const PumpSpec& pump)
      : n_(config.grid.size()),
        gain_(config.gain_per_m),
        eta_s_(spec.eta_s_per_m),
        eta_i_(spec.eta_i_per_m),
        amplitude_(n_ * n_),
        mismatch_(n_ * n_),
        kernels_(simd::active()),
        stages_{Moments(n_), Moments(n_), Moments(n_), Moments(n_)},
        probe_(n_),
        j_(n_, n_),
        j_half_(n_, n_),
        j_full_(n_, n_),
        half_rotation_(n_, n_),
        jt_(n_, n_),
        lhs_(n_, n_),
        prod_(n_, n_),
        skew_(n_, n_) {
    const FrequencyGrid& grid = config.grid;
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        amplitude_[r * n_ + c] = pump_spectrum(grid[r] + grid[c], pump).real();
        mismatch_[r * n_ + c] = phase_mismatch(grid[r], grid[c], spec);
      }
    }
  }

  Moments run(double length_m, std::size_t steps) {
    Moments y(n_);
    const double h = length_m / static_cast<double>(steps);
    const std::size_t nn = n_ * n_;
    for (std::size_t k = 0; k < nn; ++k) {
      const double angle = 0.5 * mismatch_[k] * h;
      half_rotation_.span().re[k] = std::cos(angle);
      half_rotation_.span().im[k] = std::sin(angle);
    }

    for (std::size_t step = 0; step < steps; ++step) {
      const double z = static_cast<double>(step) * h;
      coupling_at(z, j_);
      kernels_.cmul(nn, j_.view(), half_rotation_.view(), j_half_.span());
      kernels_.cmul(nn, j_half_.view(), half_rotation_.view(), j_full_.span());

      derivative(y, j_, stages_[0]);
      combine(y, 0.5 * h, stages_[0], probe_);
      derivative(probe_, j_half_, stages_[1]);
      combine(y, 0.5 * h, stages_[1], probe_);
      derivative(probe_, j_half_, stages_[2]);
      combine(y, h, stages_[2], probe_);
      derivative(probe_, j_full_, stages_[3]);

      const double w = h / 6.0;
      auto finish = [&](SplitMatrix Moments::*field) {
        kernels_.rk4_combine(nn, w, (stages_[0].*field).view(), (stages_[1].*field).view(),
                             (stages_[2].*field).view(), (stages_[3].*field).view(),
                             (y.*field).span());
      };
      finish(&Moments::signal);
      finish(&Moments::idler);
      finish(&Moments::pairs);

      if (!finite(y)) {
        throw BlowupError("integrator produced NaN/Inf at step " + std::to_string(step + 1) +
                          " of " + std::to_string(steps) + " (z = " + std::to_string(z + h) + " m)");
      }
    }
    return y;
  }

 private:
  void coupling_at(double z, SplitMatrix& out) const {
    for (std::size_t k = 0; k < n_ * n_; ++k) {
      const double phase = mismatch_[k] * z;
      out.span().re[k] = amplitude_[k] * std::cos(phase);
      out.span().im[k] = amplitude_[k] * std::sin(phase);
    }
  }

  void combine(const Moments& base, double s, const Moments& k, Moments& out) const {
    const std::size_t nn = n_ * n_;
    kernels_.axpy(nn, s, base.signal.view(), k.signal.view(), out.signal.span());
    kernels_.axpy(nn, s, base.idler.view(), k.idler.view(), out.idler.span());
    kernels_.axpy(nn, s, base.pairs.view(), k.pairs.view(), out.pairs.span());
  }

  void derivative(const Moments& y, const SplitMatrix& j, Moments& dy) {
    const std::size_t nn = n_ * n_;
    transpose(j, jt_, false);

    // conj(X) J^T
    for (std::size_t k = 0; k < nn; ++k) {
      lhs_.span().re[k] = y.pairs.view().re[k];
      lhs_.span().im[k] = -y.pairs.view().im[k];
    }
    kernels_.cgemm(n_, n_, n_, lhs_.view(), jt_.view(), prod_.span(), false);
    anti_hermitian_part(prod_, skew_);
    kernels_.damped_drive(nn, eta_s_, gain_, y.signal.view(), skew_.view(), dy.signal.span());

    // X^dag J
    transpose(y.pairs, lhs_, true);
    kernels_.cgemm(n_, n_, n_, lhs_.view(), j.view(), prod_.span(), false);
    anti_hermitian_part(prod_, skew_);
    kernels_.damped_drive(nn, eta_i_, gain_, y.idler.view(), skew_.view(), dy.idler.span());

    // Da^T J + J Db + J
    transpose(y.signal, lhs_, false);
    kernels_.cgemm(n_, n_, n_, lhs_.view(), j.view(), prod_.span(), false);
    kernels_.cgemm(n_, n_, n_, j.view(), y.idler.view(), prod_.span(), true);
    kernels_.axpy(nn, 1.0, prod_.view(), j.view(), prod_.span());
    kernels_.damped_drive(nn, 0.5 * (eta_s_ + eta_i_), gain_, y.pairs.view(), prod_.view(),
                          dy.pairs.span());
  }

  bool finite(const Moments& y) const {
    double acc = 0.0;
    for (const SplitMatrix* m : {&y.signal, &y.idler, &y.pairs}) {
      for (std::size_t k = 0; k < m->size(); ++k) acc += m->real_plane()[k] + m->imag_plane()[k];
    }
    return std::isfinite(acc);
  }

  std::size_t n_;
  double gain_;
  double eta_s_;
  double eta_i_;
  std::vector<double> amplitude_;
  std::vector<double> mismatch_;
  const simd::KernelTable& kernels_;
  Moments stages_[4];
  Moments probe_;
  SplitMatrix j_, j_half_, j_full_, half_rotation_, jt_, lhs_, prod_, skew_;
};

CMatrix to_eigen(const SplitMatrix& m) {
  CMatrix out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cdouble(m.re(i, j), m.im(i, j));
    }
  }
  return out;
}

CorrelationState assemble(const FrequencyGrid& grid, const Moments& y, double z) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  CMatrix d = CMatrix::Zero(2 * n, 2 * n);
  CMatrix c = CMatrix::Zero(2 * n, 2 * n);
  d.topLeftCorner(n, n) = to_eigen(y.signal);
  d.bottomRightCorner(n, n) = to_eigen(y.idler);
  const CMatrix x = to_eigen(y.pairs);
  c.topRightCorner(n, n) = x;
  c.bottomLeftCorner(n, n) = x.transpose();
  return CorrelationState(grid, std::move(d), std::move(c), z);
}

double trace_signal(const Moments& y) {
  double t = 0.0;
  for (std::size_t i = 0; i < y.signal.rows(); ++i) t += y.signal.re(i, i);
  return t;
}

}  // namespace

CorrelationState integrate_interaction_frame(const SolverConfig& config, const WaveguideSpec& spec,
                                             const PumpSpec& pump) {
  config.validate();
  spec.validate();
  pump.validate();

  MomentIntegrator integrator(config, spec, pump);
  Moments y = integrator.run(spec.length_m, config.steps);
  if (config.step_check) {
    const Moments fine = integrator.run(spec.length_m, 2 * config.steps);
    const double coarse_n = trace_signal(y);
    const double fine_n = trace_signal(fine);
    const double rel = std::abs(fine_n - coarse_n) / std::max(std::abs(fine_n), 1e-300);
    if (fine_n != 0.0 && rel >= 1e-4) {
      throw StepCountError("step-doubling check failed: Tr<a^dag a> changed by " + std::to_string(rel) +
                           " (relative) between " + std::to_string(config.steps) + " and " +
                           std::to_string(2 * config.steps) + " steps");
    }
  }
  return assemble(config.grid, y, spec.length_m);
}

CorrelationState integrate(const SolverConfig& config, const WaveguideSpec& spec, const PumpSpec& pump) {
  return to_lab_frame(integrate_interaction_frame(config, spec, pump), spec);
}

CVector free_propagation_phases(Field field, const FrequencyGrid& grid, const WaveguideSpec& spec,
                                double z_m) {
  CVector t(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    t(static_cast<Eigen::Index>(k)) = std::polar(1.0, wavevector(field, grid[k], spec) * z_m);
  }
  return t;
}

CorrelationState to_interaction_frame(const CorrelationState& lab, const WaveguideSpec& spec) {
  const CVector ta = free_propagation_phases(Field::kSignal, lab.grid(), spec, lab.z()).conjugate();
  const CVector tb = free_propagation_phases(Field::kIdler, lab.grid(), spec, lab.z()).conjugate();
  return apply_external_loss(lab, ta, tb);
}

CorrelationState to_lab_frame(const CorrelationState& interaction, const WaveguideSpec& spec) {
  const CVector ta = free_propagation_phases(Field::kSignal, interaction.grid(), spec, interaction.z());
  const CVector tb = free_propagation_phases(Field::kIdler, interaction.grid(), spec, interaction.z());
  return apply_external_loss(interaction, ta, tb);
}

RMatrix jsi(const CorrelationState& state) {
  const RMatrix mag2 = state.pair_amplitudes().cwiseAbs2();
  const double peak = mag2.size() == 0 ? 0.0 : mag2.maxCoeff();
  if (!(peak > 0.0)) throw NormalizationError("jsi: all pair amplitudes are zero");
  return mag2 / peak;
}

double signal_photons(const CorrelationState& state, PhotonTarget target) {
  const CMatrix da = state.signal_photons();
  if (target == PhotonTarget::kTotal) return da.trace().real();
  const CMatrix herm = 0.5 * (da + da.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

}  // namespace lossypdc::pdc
