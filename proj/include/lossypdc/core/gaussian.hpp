#pragma once

#include <vector>

#include "lossypdc/core/types.hpp"

namespace lossypdc {

// Omega = (+) [[0, 1], [-1, 0]] over `modes` modes.
RMatrix symplectic_form(std::size_t modes);

CovarianceMatrix cov_from_correlations(const CorrelationState& state);

// Inverse of cov_from_correlations for zero-mean states: reads D and C back
// out of the quadrature covariance.
struct Correlations {
  CMatrix d;
  CMatrix c;
};
Correlations correlations_from_cov(const CovarianceMatrix& sigma);

// D' = U^* D U^T, C' = U C U^T with U = U_A (+) U_B.
CorrelationState apply_passive_transform(const CorrelationState& state, const CMatrix& u_a,
                                         const CMatrix& u_b);

// a_n -> t^a_n a_n, b_n -> t^b_n b_n. Unit-modulus t is a pure phase
// rotation; |t| > 1 is rejected.
CorrelationState apply_external_loss(const CorrelationState& state, const CVector& t_a,
                                     const CVector& t_b);

// Symplectic eigenvalues, one per mode, sorted descending.
std::vector<double> symplectic_spectrum(const CovarianceMatrix& sigma);
std::vector<double> symplectic_spectrum(const RMatrix& sigma);

struct MinEigen {
  double value = 0.0;
  RVector vector;            // unit eigenvector chosen by the tie-break rule
  std::size_t multiplicity = 0;  // eigenvalues within the degeneracy cluster
};

// Smallest ordinary eigenvalue of sigma. Within a degenerate cluster the
// eigenvector with the largest signal-part norm wins, ties to the lowest index.
MinEigen smallest_cov_eigenvalue(const CovarianceMatrix& sigma);

}  // namespace lossypdc
