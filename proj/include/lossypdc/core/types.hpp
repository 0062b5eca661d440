#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lossypdc {

using cdouble = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

// Uniform angular-frequency grid shared by the signal and idler subsystems.
class FrequencyGrid {
 public:
  // `count` points centred on `center_rad_s`, first and last at +-half_span.
  static FrequencyGrid uniform(double center_rad_s, double half_span_rad_s, std::size_t count);

  // Throws InvalidInput unless the points are strictly increasing and evenly
  // spaced to 1e-9 of the spacing.
  explicit FrequencyGrid(std::vector<double> omegas_rad_s);

  std::size_t size() const { return omegas_.size(); }
  double spacing() const { return spacing_; }
  double operator[](std::size_t i) const { return omegas_[i]; }
  std::span<const double> omegas() const { return omegas_; }

 private:
  std::vector<double> omegas_;
  double spacing_ = 0.0;
};

// Normal-ordered (D = <c^dag c>) and anomalous (C = <c c>) second moments of
// a zero-mean bipartite Gaussian state. Modes 0..N-1 are the signal (a),
// N..2N-1 the idler (b).
class CorrelationState {
 public:
  // Checks shapes only; see check_invariants() for the physical conditions.
  CorrelationState(FrequencyGrid grid, CMatrix d, CMatrix c, double z_m = 0.0);

  static CorrelationState vacuum(FrequencyGrid grid, double z_m = 0.0);

  const FrequencyGrid& grid() const { return grid_; }
  std::size_t modes_per_part() const { return grid_.size(); }
  const CMatrix& d() const { return d_; }
  const CMatrix& c() const { return c_; }
  double z() const { return z_; }

  // <a^dag a>, <b^dag b>, <a b> blocks.
  CMatrix signal_photons() const;
  CMatrix idler_photons() const;
  CMatrix pair_amplitudes() const;

 private:
  FrequencyGrid grid_;
  CMatrix d_;
  CMatrix c_;
  double z_;
};

// Residuals against the CorrelationState invariants, each already scaled by
// (1 + max|entry|) of the relevant matrix.
struct StateDiagnostics {
  double hermiticity = 0.0;   // ||D - D^dag||_max
  double min_eigenvalue = 0.0;  // lambda_min(D)
  double symmetry = 0.0;      // ||C - C^T||_max
  double block_leak = 0.0;    // largest of the blocks that vanish for type-II
  bool ok = false;
};

StateDiagnostics check_invariants(const CorrelationState& state);

// Throws InvalidInput when check_invariants() fails.
void require_valid(const CorrelationState& state);

// Real symmetric 4N x 4N quadrature covariance (hbar = 2, vacuum = identity)
// in the order (q^a_1, p^a_1, ..., q^b_N, p^b_N).
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(RMatrix sigma);

  const RMatrix& matrix() const { return sigma_; }
  std::size_t modes() const { return static_cast<std::size_t>(sigma_.rows() / 2); }

 private:
  RMatrix sigma_;
};

// Unit-norm spectral amplitude vector of one broadband mode.
class BroadbandMode {
 public:
  explicit BroadbandMode(CVector amplitudes);
  static BroadbandMode normalized(const CVector& v);
  static BroadbandMode unit(std::size_t size, std::size_t index);

  const CVector& amplitudes() const { return amps_; }
  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }

 private:
  CVector amps_;
};

}  // namespace lossypdc
