#pragma once

#include <cstdint>
#include <utility>

#include "lossypdc/core/types.hpp"
#include "lossypdc/decomp/modes.hpp"

namespace lossypdc::tmbs {

// Standard-form two-mode covariance
//   [[alpha I, gamma Z], [gamma Z, beta I]],  Z = diag(1, -1).
struct TmbsCov {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;

  RMatrix matrix() const;
  RMatrix partial_transpose() const;  // p_B -> -p_B
  // Throws InvalidInput unless alpha, beta >= 1 and gamma >= 0 (to 1e-9) and
  // the symplectic eigenvalues of the matrix itself are >= 1 - 1e-6.
  void validate() const;
};

// TMBS data for the pair (A, B) with A = sum u_A a, B = sum u_B b. The phase of
// u_A is rotated so that <A B> is real and non-negative.
struct Reduced {
  TmbsCov cov;
  decomp::ModePair modes;
  double n_a = 0.0;
  double n_b = 0.0;
};
Reduced reduce(const CorrelationState& state, const decomp::ModePair& modes);
TmbsCov build_tmbs(const CorrelationState& state, const decomp::ModePair& modes);

// (nu_-, nu_+) of the partially transposed matrix, closed form.
std::pair<double, double> symplectic_values_pt(const TmbsCov& cov);
// (lambda_-, lambda_+): the two distinct ordinary eigenvalues, closed form.
std::pair<double, double> tmbs_eigenvalues(const TmbsCov& cov);

double log_negativity(double nu_minus);    // max(-ln nu_-, 0), nats
double squeezing_db(double lambda_minus);  // 10 log10 lambda_-
double purity(const TmbsCov& cov);         // 1 / sqrt(det)

struct Report {
  decomp::ModePair modes;
  TmbsCov cov;
  double n_a = 0.0;
  double n_b = 0.0;
  double nu_minus = 0.0;
  double nu_plus = 0.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  double log_negativity = 0.0;
  double squeezing_db = 0.0;
  double purity = 0.0;
};

// Throws NumericalError if lambda_+- and nu_+- disagree by more than 1e-8
// relative.
Report report(const CorrelationState& state, const decomp::ModePair& modes);

struct SearchOptions {
  std::size_t steps = 1000;
  double scale_start = 0.3;
  double scale_end = 1e-3;
  unsigned threads = 1;
};

struct OptimalityResult {
  double best_found = 0.0;  // smallest lambda_- reached by the search
  double msq_value = 0.0;   // lambda_- of the MSq pair
  std::size_t evaluations = 0;
};

// Randomized local search for the mode pair minimizing lambda_-, independent
// of the eigen-construction behind the MSq modes. Deterministic for a given
// seed regardless of thread count.
OptimalityResult verify_msq_optimality(const CorrelationState& state, std::size_t trials,
                                       std::uint64_t seed, const SearchOptions& options = {});

}  // namespace lossypdc::tmbs
