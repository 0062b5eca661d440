#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/core/gaussian.hpp"
#include "lossypdc/decomp/modes.hpp"

namespace lossypdc::decomp {
namespace {

constexpr double kPhysicalFloor = 1e-6;
constexpr double kUnsqueezedTol = 1e-8;

}  // namespace

RMatrix WilliamsonEulerResult::symplectic() const {
  return o_left * squeeze_diag.asDiagonal() * o_right;
}

RMatrix WilliamsonEulerResult::reconstruct() const {
  const RMatrix s = symplectic();
  return s * symplectic_diag.asDiagonal() * s.transpose();
}

WilliamsonEulerResult williamson_euler(const CovarianceMatrix& cov) {
  const RMatrix& sigma = cov.matrix();
  const Eigen::Index dim = sigma.rows();
  const Eigen::Index modes = dim / 2;
  const RMatrix omega = symplectic_form(static_cast<std::size_t>(modes));

  Eigen::SelfAdjointEigenSolver<RMatrix> es(sigma);
  if (es.eigenvalues()(0) <= 0.0) throw InvalidInput("williamson_euler: covariance is not positive definite");
  const RMatrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                       es.eigenvectors().transpose();

  // -i K is Hermitian with eigenvalues +-nu; the eigenvector v of +nu gives the
  // orthonormal pair (sqrt2 Re v, sqrt2 Im v) with O^T K O = (+) nu omega.
  const RMatrix k = root * omega * root;
  const CMatrix h = cdouble{0.0, -1.0} * k.cast<cdouble>();
  Eigen::SelfAdjointEigenSolver<CMatrix> hs(h);
  RMatrix o(dim, dim);
  RVector nu(modes);
  for (Eigen::Index m = 0; m < modes; ++m) {
    const Eigen::Index src = dim - 1 - m;
    nu(m) = hs.eigenvalues()(src);
    const CVector v = hs.eigenvectors().col(src);
    o.col(2 * m) = std::sqrt(2.0) * v.real();
    o.col(2 * m + 1) = std::sqrt(2.0) * v.imag();
  }
  if (nu(modes - 1) < 1.0 - kPhysicalFloor) {
    throw InvalidInput("williamson_euler: symplectic eigenvalue " + std::to_string(nu(modes - 1)) +
                       " below 1, not a physical state");
  }

  RVector d_diag(dim);
  for (Eigen::Index m = 0; m < modes; ++m) d_diag(2 * m) = d_diag(2 * m + 1) = nu(m);
  const RMatrix s = root * o * d_diag.cwiseInverse().cwiseSqrt().asDiagonal();

  // Euler step: S S^T = O_l Lambda^2 O_l^T.
  Eigen::SelfAdjointEigenSolver<RMatrix> ps(s * s.transpose());
  const RVector& lam = ps.eigenvalues();
  const RMatrix& vec = ps.eigenvectors();
  const double tol = kUnsqueezedTol * std::max(1.0, lam(dim - 1));
  Eigen::Index squeezed = 0;
  while (squeezed < modes && lam(dim - 1 - squeezed) > 1.0 + tol) ++squeezed;

  WilliamsonEulerResult out;
  out.o_left.resize(dim, dim);
  out.squeeze_diag.resize(dim);
  out.squeezing.resize(modes);
  for (Eigen::Index m = 0; m < squeezed; ++m) {
    const RVector x = vec.col(dim - 1 - m);
    out.o_left.col(2 * m) = x;
    out.o_left.col(2 * m + 1) = omega.transpose() * x;
    out.squeezing(m) = 0.5 * std::log(lam(dim - 1 - m));
  }

  // Unsqueezed block: the middle eigenvectors span an Omega-invariant space,
  // paired up by symplectic Gram-Schmidt.
  std::vector<RVector> pool;
  for (Eigen::Index c = squeezed; c < dim - squeezed; ++c) pool.emplace_back(vec.col(c));
  for (Eigen::Index m = squeezed; m < modes; ++m) {
    std::size_t pick = 0;
    double pick_norm = -1.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      RVector& r = pool[c];
      // Earlier columns were projected out in previous rounds.
      for (Eigen::Index j = std::max<Eigen::Index>(0, 2 * m - 2); j < 2 * m; ++j) {
        r -= out.o_left.col(j).dot(r) * out.o_left.col(j);
      }
      if (r.norm() > pick_norm) {
        pick_norm = r.norm();
        pick = c;
      }
    }
    if (pick_norm < 1e-6) throw NumericalError("williamson_euler: symplectic Gram-Schmidt broke down");
    const RVector x = pool[pick] / pick_norm;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    out.o_left.col(2 * m) = x;
    out.o_left.col(2 * m + 1) = omega.transpose() * x;
    out.squeezing(m) = 0.0;
  }

  for (Eigen::Index m = 0; m < modes; ++m) {
    out.squeeze_diag(2 * m) = std::exp(out.squeezing(m));
    out.squeeze_diag(2 * m + 1) = std::exp(-out.squeezing(m));
  }
  out.o_right = out.squeeze_diag.cwiseInverse().asDiagonal() * out.o_left.transpose() * s;
  out.symplectic_diag = d_diag;
  return out;
}

}  // namespace lossypdc::decomp
