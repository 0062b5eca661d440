#include "lossypdc/core/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "lossypdc/core/errors.hpp"

namespace lossypdc {
namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kHermiticityTol = 1e-10;
constexpr double kPsdTol = 1e-8;
constexpr double kBlockTol = 1e-8;
constexpr double kUnitaryTol = 1e-10;
constexpr double kNormTol = 1e-12;

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const RMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_symmetric(const RMatrix& sigma, const char* what) {
  if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0 || sigma.rows() == 0) {
    throw InvalidInput(std::string(what) + ": expected a non-empty square matrix of even size");
  }
  const double asym = max_abs(RMatrix(sigma - sigma.transpose()));
  if (asym > kSymmetryTol * (1.0 + max_abs(sigma))) {
    throw InvalidInput(std::string(what) + ": matrix is not symmetric");
  }
}

void require_unitary(const CMatrix& u, std::size_t n, const char* name) {
  if (static_cast<std::size_t>(u.rows()) != n || static_cast<std::size_t>(u.cols()) != n) {
    throw InvalidInput(std::string(name) + ": expected an N x N matrix");
  }
  const CMatrix residual = u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols());
  if (max_abs(residual) > kUnitaryTol) {
    throw InvalidInput(std::string(name) + " is not unitary");
  }
}

// Sign convention shared by every real eigenvector we hand out: the
// largest-magnitude component (lowest index on ties) is positive.
void fix_sign(RVector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-14) best = i;
  }
  if (v(best) < 0) v = -v;
}

}  // namespace

FrequencyGrid FrequencyGrid::uniform(double center_rad_s, double half_span_rad_s,
                                     std::size_t count) {
  if (count == 0) throw InvalidInput("FrequencyGrid: count must be positive");
  if (count == 1) return FrequencyGrid({center_rad_s});
  if (!(half_span_rad_s > 0.0)) throw InvalidInput("FrequencyGrid: half span must be positive");
  std::vector<double> omegas(count);
  const double step = 2.0 * half_span_rad_s / static_cast<double>(count - 1);
  const auto mid = static_cast<double>(count - 1) / 2.0;
  for (std::size_t k = 0; k < count; ++k) {
    omegas[k] = center_rad_s + (static_cast<double>(k) - mid) * step;
  }
  return FrequencyGrid(std::move(omegas));
}

FrequencyGrid::FrequencyGrid(std::vector<double> omegas_rad_s) : omegas_(std::move(omegas_rad_s)) {
  if (omegas_.empty()) throw InvalidInput("FrequencyGrid: at least one point required");
  if (omegas_.size() == 1) return;
  spacing_ = (omegas_.back() - omegas_.front()) / static_cast<double>(omegas_.size() - 1);
  if (!(spacing_ > 0.0)) throw InvalidInput("FrequencyGrid: frequencies must increase");
  for (std::size_t k = 0; k + 1 < omegas_.size(); ++k) {
    if (std::abs(omegas_[k + 1] - omegas_[k] - spacing_) > 1e-9 * spacing_) {
      throw InvalidInput("FrequencyGrid: points are not uniformly spaced");
    }
  }
}

CorrelationState::CorrelationState(FrequencyGrid grid, CMatrix d, CMatrix c, double z_m)
    : grid_(std::move(grid)), d_(std::move(d)), c_(std::move(c)), z_(z_m) {
  const auto n2 = static_cast<Eigen::Index>(2 * grid_.size());
  if (d_.rows() != n2 || d_.cols() != n2 || c_.rows() != n2 || c_.cols() != n2) {
    throw InvalidInput("CorrelationState: D and C must both be 2N x 2N for an N-point grid");
  }
}

CorrelationState CorrelationState::vacuum(FrequencyGrid grid, double z_m) {
  const auto n2 = static_cast<Eigen::Index>(2 * grid.size());
  return CorrelationState(std::move(grid), CMatrix::Zero(n2, n2), CMatrix::Zero(n2, n2), z_m);
}

CMatrix CorrelationState::signal_photons() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  return d_.topLeftCorner(n, n);
}

CMatrix CorrelationState::idler_photons() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  return d_.bottomRightCorner(n, n);
}

CMatrix CorrelationState::pair_amplitudes() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  return c_.topRightCorner(n, n);
}

StateDiagnostics check_invariants(const CorrelationState& state) {
  const auto n = static_cast<Eigen::Index>(state.modes_per_part());
  const CMatrix& d = state.d();
  const CMatrix& c = state.c();
  const double dmax = max_abs(d);
  const double cmax = max_abs(c);
  const double scale = 1.0 + std::max(dmax, cmax);

  StateDiagnostics out;
  out.hermiticity = max_abs(CMatrix(d - d.adjoint())) / (1.0 + dmax);
  out.symmetry = max_abs(CMatrix(c - c.transpose())) / (1.0 + cmax);
  const CMatrix herm = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues()(0) / (1.0 + dmax);
  out.block_leak = std::max({max_abs(CMatrix(d.topRightCorner(n, n))),
                             max_abs(CMatrix(d.bottomLeftCorner(n, n))),
                             max_abs(CMatrix(c.topLeftCorner(n, n))),
                             max_abs(CMatrix(c.bottomRightCorner(n, n)))}) /
                   scale;
  out.ok = out.hermiticity <= kHermiticityTol && out.symmetry <= kHermiticityTol &&
           out.min_eigenvalue >= -kPsdTol && out.block_leak <= kBlockTol;
  return out;
}

void require_valid(const CorrelationState& state) {
  const auto diag = check_invariants(state);
  if (!diag.ok) {
    throw InvalidInput("CorrelationState violates its invariants (hermiticity " +
                       std::to_string(diag.hermiticity) + ", min eigenvalue " +
                       std::to_string(diag.min_eigenvalue) + ", symmetry " +
                       std::to_string(diag.symmetry) + ", block leak " +
                       std::to_string(diag.block_leak) + ")");
  }
}

CovarianceMatrix::CovarianceMatrix(RMatrix sigma) : sigma_(std::move(sigma)) {
  require_symmetric(sigma_, "CovarianceMatrix");
}

BroadbandMode::BroadbandMode(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw InvalidInput("BroadbandMode: empty amplitude vector");
  if (std::abs(amps_.norm() - 1.0) > kNormTol) {
    throw InvalidInput("BroadbandMode: amplitudes must have unit norm");
  }
}

BroadbandMode BroadbandMode::normalized(const CVector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidInput("BroadbandMode: cannot normalize a zero vector");
  }
  return BroadbandMode(v / norm);
}

BroadbandMode BroadbandMode::unit(std::size_t size, std::size_t index) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(size));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return BroadbandMode(std::move(v));
}

RMatrix symplectic_form(std::size_t modes) {
  const auto m = static_cast<Eigen::Index>(modes);
  RMatrix omega = RMatrix::Zero(2 * m, 2 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

CovarianceMatrix cov_from_correlations(const CorrelationState& state) {
  const CMatrix& d = state.d();
  const CMatrix& c = state.c();
  const Eigen::Index modes = d.rows();
  RMatrix sigma(2 * modes, 2 * modes);
  for (Eigen::Index i = 0; i < modes; ++i) {
    for (Eigen::Index j = 0; j < modes; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      const cdouble dij = d(i, j);
      const cdouble cij = c(i, j);
      sigma(2 * i, 2 * j) = delta + 2.0 * (dij.real() + cij.real());
      sigma(2 * i + 1, 2 * j + 1) = delta + 2.0 * (dij.real() - cij.real());
      sigma(2 * i + 1, 2 * j) = 2.0 * (cij.imag() - dij.imag());
      sigma(2 * i, 2 * j + 1) = 2.0 * (cij.imag() + dij.imag());
    }
  }
  // Exact symmetrization: rounding in D, C must not leak into the symmetry check.
  RMatrix sym = 0.5 * (sigma + sigma.transpose());
  return CovarianceMatrix(std::move(sym));
}

Correlations correlations_from_cov(const CovarianceMatrix& cov) {
  const RMatrix& s = cov.matrix();
  const Eigen::Index modes = s.rows() / 2;
  Correlations out{CMatrix(modes, modes), CMatrix(modes, modes)};
  for (Eigen::Index i = 0; i < modes; ++i) {
    for (Eigen::Index j = 0; j < modes; ++j) {
      const double delta = i == j ? 1.0 : 0.0;
      const double qq = s(2 * i, 2 * j);
      const double pp = s(2 * i + 1, 2 * j + 1);
      const double qp = s(2 * i, 2 * j + 1);
      const double pq = s(2 * i + 1, 2 * j);
      out.d(i, j) = cdouble((qq + pp) / 4.0 - delta / 2.0, (qp - pq) / 4.0);
      out.c(i, j) = cdouble((qq - pp) / 4.0, (qp + pq) / 4.0);
    }
  }
  return out;
}

CorrelationState apply_passive_transform(const CorrelationState& state, const CMatrix& u_a,
                                         const CMatrix& u_b) {
  const std::size_t n = state.modes_per_part();
  require_unitary(u_a, n, "U_A");
  require_unitary(u_b, n, "U_B");
  const auto ni = static_cast<Eigen::Index>(n);
  CMatrix u = CMatrix::Zero(2 * ni, 2 * ni);
  u.topLeftCorner(ni, ni) = u_a;
  u.bottomRightCorner(ni, ni) = u_b;
  CMatrix d = u.conjugate() * state.d() * u.transpose();
  CMatrix c = u * state.c() * u.transpose();
  return CorrelationState(state.grid(), std::move(d), std::move(c), state.z());
}

CorrelationState apply_external_loss(const CorrelationState& state, const CVector& t_a,
                                     const CVector& t_b) {
  const auto n = static_cast<Eigen::Index>(state.modes_per_part());
  if (t_a.size() != n || t_b.size() != n) {
    throw InvalidInput("apply_external_loss: transmission vectors must have N entries");
  }
  CVector t(2 * n);
  t << t_a, t_b;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (!(std::abs(t(i)) <= 1.0 + 1e-12)) {
      throw InvalidInput("apply_external_loss: |t| > 1 is amplification, not loss");
    }
  }
  CMatrix d = state.d();
  CMatrix c = state.c();
  for (Eigen::Index j = 0; j < 2 * n; ++j) {
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      d(i, j) *= std::conj(t(i)) * t(j);
      c(i, j) *= t(i) * t(j);
    }
  }
  return CorrelationState(state.grid(), std::move(d), std::move(c), state.z());
}

std::vector<double> symplectic_spectrum(const CovarianceMatrix& sigma) {
  return symplectic_spectrum(sigma.matrix());
}

std::vector<double> symplectic_spectrum(const RMatrix& sigma) {
  require_symmetric(sigma, "symplectic_spectrum");
  const Eigen::Index dim = sigma.rows();
  const auto modes = static_cast<std::size_t>(dim / 2);
  const RMatrix sym = 0.5 * (sigma + sigma.transpose());
  const RMatrix omega = symplectic_form(modes);

  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym);
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(dim));
  if (es.eigenvalues()(0) > 0.0) {
    // Positive definite: iOmega.Sigma is similar to the Hermitian matrix
    // -i Sigma^1/2 Omega Sigma^1/2, whose spectrum is +-nu.
    const RMatrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                         es.eigenvectors().transpose();
    const RMatrix k = root * omega * root;
    const CMatrix h = cdouble(0.0, -1.0) * k.cast<cdouble>();
    Eigen::SelfAdjointEigenSolver<CMatrix> hs(h, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < dim; ++i) all.push_back(std::abs(hs.eigenvalues()(i)));
  } else {
    Eigen::EigenSolver<RMatrix> gs(omega * sym, false);
    for (Eigen::Index i = 0; i < dim; ++i) all.push_back(std::abs(gs.eigenvalues()(i)));
  }
  std::sort(all.begin(), all.end(), std::greater<>());
  std::vector<double> out(modes);
  for (std::size_t k = 0; k < modes; ++k) out[k] = 0.5 * (all[2 * k] + all[2 * k + 1]);
  return out;
}

MinEigen smallest_cov_eigenvalue(const CovarianceMatrix& cov) {
  const RMatrix& sigma = cov.matrix();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sigma);
  const RVector& vals = es.eigenvalues();
  const double lmin = vals(0);
  const double tol = 1e-10 * (1.0 + std::abs(vals(vals.size() - 1)));
  const Eigen::Index half = sigma.rows() / 2;

  MinEigen out;
  out.value = lmin;
  Eigen::Index best = 0;
  double best_norm = -1.0;
  for (Eigen::Index k = 0; k < vals.size() && vals(k) - lmin <= tol; ++k) {
    ++out.multiplicity;
    const double signal_norm = es.eigenvectors().col(k).head(half).squaredNorm();
    if (signal_norm > best_norm + 1e-12) {
      best_norm = signal_norm;
      best = k;
    }
  }
  out.vector = es.eigenvectors().col(best);
  fix_sign(out.vector);
  return out;
}

}  // namespace lossypdc
