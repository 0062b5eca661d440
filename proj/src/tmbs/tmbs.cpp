#include "lossypdc/tmbs/tmbs.hpp"

#include <cmath>
#include <string>

#include "lossypdc/core/errors.hpp"

namespace lossypdc::tmbs {

RMatrix TmbsCov::matrix() const {
  RMatrix s = RMatrix::Zero(4, 4);
  s(0, 0) = s(1, 1) = alpha;
  s(2, 2) = s(3, 3) = beta;
  s(0, 2) = s(2, 0) = gamma;
  s(1, 3) = s(3, 1) = -gamma;
  return s;
}

RMatrix TmbsCov::partial_transpose() const {
  RMatrix s = matrix();
  s.row(3) *= -1.0;
  s.col(3) *= -1.0;
  return s;
}

void TmbsCov::validate() const {
  if (!(alpha >= 1.0 - 1e-9) || !(beta >= 1.0 - 1e-9) || !(gamma >= -1e-9)) {
    throw InvalidInput("TMBS covariance needs alpha, beta >= 1 and gamma >= 0");
  }
  // Symplectic eigenvalues of the matrix itself: nu = (sqrt((a+b)^2 - 4g^2) +- (a-b)) / 2.
  const double root = std::sqrt(std::max(0.0, (alpha + beta) * (alpha + beta) - 4.0 * gamma * gamma));
  if (0.5 * (root - std::abs(alpha - beta)) < 1.0 - 1e-6) {
    throw InvalidInput("TMBS covariance violates the uncertainty principle");
  }
}

Reduced reduce(const CorrelationState& state, const decomp::ModePair& modes) {
  const std::size_t n = state.modes_per_part();
  if (modes.signal.size() != n || modes.idler.size() != n) {
    throw InvalidInput("mode length " + std::to_string(modes.signal.size()) + "/" +
                       std::to_string(modes.idler.size()) + " does not match grid size " + std::to_string(n));
  }
  const CVector& ua = modes.signal.amplitudes();
  const CVector& ub = modes.idler.amplitudes();
  // <A^dag A> = sum u*_i u_j <a_i^dag a_j>, <A B> = u_A^T X u_B.
  const double n_a = (ua.adjoint() * state.signal_photons() * ua)(0).real();
  const double n_b = (ub.adjoint() * state.idler_photons() * ub)(0).real();
  const cdouble ab = (ua.transpose() * state.pair_amplitudes() * ub)(0);

  Reduced out{{1.0 + 2.0 * n_a, 1.0 + 2.0 * n_b, 2.0 * std::abs(ab)}, modes, n_a, n_b};
  if (std::abs(ab) > 0.0) {
    out.modes.signal = BroadbandMode::normalized(ua * std::polar(1.0, -std::arg(ab)));
  }
  return out;
}

TmbsCov build_tmbs(const CorrelationState& state, const decomp::ModePair& modes) {
  return reduce(state, modes).cov;
}

std::pair<double, double> symplectic_values_pt(const TmbsCov& cov) {
  // The partial transpose turns the TMBS into [[a, g], [g, b]] (x) I in the
  // (x_A, p_B) / (p_A, x_B) planes; its symplectic values are the eigenvalues
  // of that 2 x 2 block.
  const double mean = 0.5 * (cov.alpha + cov.beta);
  const double half = 0.5 * std::hypot(cov.alpha - cov.beta, 2.0 * cov.gamma);
  return {mean - half, mean + half};
}

std::pair<double, double> tmbs_eigenvalues(const TmbsCov& cov) {
  const double d = cov.alpha - cov.beta;
  const double root = std::sqrt(d * d + 4.0 * cov.gamma * cov.gamma);
  return {0.5 * (cov.alpha + cov.beta - root), 0.5 * (cov.alpha + cov.beta + root)};
}

double log_negativity(double nu_minus) {
  if (!(nu_minus > 0.0)) throw InvalidInput("log_negativity: nu_- must be positive");
  return std::max(-std::log(nu_minus), 0.0);
}

double squeezing_db(double lambda_minus) {
  if (!(lambda_minus > 0.0)) throw InvalidInput("squeezing_db: lambda_- must be positive");
  return 10.0 * std::log10(lambda_minus);
}

double purity(const TmbsCov& cov) {
  const double det = cov.alpha * cov.beta - cov.gamma * cov.gamma;
  if (!(det > 0.0)) throw InvalidInput("purity: covariance determinant must be positive");
  return 1.0 / det;
}

Report report(const CorrelationState& state, const decomp::ModePair& modes) {
  const Reduced red = reduce(state, modes);
  red.cov.validate();
  Report r{red.modes, red.cov, red.n_a, red.n_b};
  std::tie(r.nu_minus, r.nu_plus) = symplectic_values_pt(red.cov);
  std::tie(r.lambda_minus, r.lambda_plus) = tmbs_eigenvalues(red.cov);
  if (std::abs(r.lambda_minus - r.nu_minus) > 1e-8 * std::abs(r.nu_minus) ||
      std::abs(r.lambda_plus - r.nu_plus) > 1e-8 * std::abs(r.nu_plus)) {
    throw NumericalError("TMBS eigenvalues and partial-transpose symplectic values disagree");
  }
  r.log_negativity = log_negativity(r.nu_minus);
  r.squeezing_db = squeezing_db(r.lambda_minus);
  r.purity = purity(red.cov);
  return r;
}

}  // namespace lossypdc::tmbs
