#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/core/gaussian.hpp"
#include "lossypdc/decomp/modes.hpp"
#include "lossypdc/pdc/integrator.hpp"
#include "lossypdc/tmbs/tmbs.hpp"
#include "support/oracles.hpp"

using namespace lossypdc;
using namespace lossypdc::tmbs;
using decomp::Basis;
using decomp::ModePair;
using oracle::max_abs;

namespace {

ModePair random_pair(oracle::Rng& rng, Eigen::Index n) {
  return {BroadbandMode::normalized(rng.unit(n)), BroadbandMode::normalized(rng.unit(n)), Basis::kCustom};
}

// Two distinct eigenvalues of the 4x4 matrix by a dense solver, each expected twice.
std::pair<double, double> dense_eigs(const RMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(m, Eigen::EigenvaluesOnly);
  const auto& e = es.eigenvalues();
  CHECK(e(0) == doctest::Approx(e(1)).epsilon(1e-10));
  CHECK(e(2) == doctest::Approx(e(3)).epsilon(1e-10));
  return {e(0), e(3)};
}

const pdc::PumpSpec kPump{};

CorrelationState solver_state(double db, double r, std::size_t points, double gain, std::size_t steps = 300) {
  const auto spec = pdc::with_losses(pdc::reference_waveguide(kPump), {db, r});
  return pdc::integrate({pdc::default_grid(spec, kPump, points), gain, steps, false}, spec, kPump);
}

}  // namespace

TEST_CASE("standard-form matrix and partial transpose") {
  const TmbsCov t{3, 2, 1};
  CHECK(max_abs(RMatrix(t.matrix() - oracle::tmbs_matrix(3, 2, 1))) == 0.0);
  RMatrix flip = RMatrix::Identity(4, 4);
  flip(3, 3) = -1;
  CHECK(max_abs(RMatrix(t.partial_transpose() - flip * t.matrix() * flip)) == 0.0);
  CHECK_NOTHROW(t.validate());
  CHECK_THROWS_AS((TmbsCov{0.5, 1, 0}.validate()), InvalidInput);
  CHECK_THROWS_AS((TmbsCov{1, 1, -0.1}.validate()), InvalidInput);
  CHECK_THROWS_AS((TmbsCov{1, 1, 0.5}.validate()), InvalidInput);
}

TEST_CASE("closed forms on the reference examples") {
  auto [vm, vp] = symplectic_values_pt({1, 1, 0});
  CHECK(vm == 1.0);
  CHECK(vp == 1.0);
  auto [lm, lp] = tmbs_eigenvalues({1, 1, 0});
  CHECK(lm == 1.0);
  CHECK(lp == 1.0);

  const double s5 = std::sqrt(5.0);
  std::tie(vm, vp) = symplectic_values_pt({3, 2, 1});
  CHECK(vm == doctest::Approx((5 - s5) / 2).epsilon(1e-14));
  CHECK(vp == doctest::Approx((5 + s5) / 2).epsilon(1e-14));
  CHECK(vm == doctest::Approx(1.382).epsilon(1e-3));
  CHECK(vp == doctest::Approx(3.618).epsilon(1e-3));
  const auto pt = symplectic_spectrum(TmbsCov{3, 2, 1}.partial_transpose());
  CHECK(pt[1] == doctest::Approx(vm).epsilon(1e-10));
  CHECK(pt[0] == doctest::Approx(vp).epsilon(1e-10));
  const auto direct = oracle::symplectic_eigs(TmbsCov{3, 2, 1}.partial_transpose());
  CHECK(direct[1] == doctest::Approx(vm).epsilon(1e-10));

  std::tie(lm, lp) = tmbs_eigenvalues({3, 2, 1});
  const auto [dm, dp] = dense_eigs(oracle::tmbs_matrix(3, 2, 1));
  CHECK(lm == doctest::Approx(dm).epsilon(1e-12));
  CHECK(lp == doctest::Approx(dp).epsilon(1e-12));

  const TmbsCov n40{81, 81, std::sqrt(81.0 * 81.0 - 1)};
  CHECK(symplectic_values_pt(n40).first == doctest::Approx(0.006174).epsilon(1e-3));
  CHECK(log_negativity(symplectic_values_pt(n40).first) == doctest::Approx(5.09).epsilon(1e-3));
  CHECK(purity(n40) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("scalar metrics") {
  CHECK(log_negativity(1.0) == 0.0);
  CHECK(log_negativity(1.55) == 0.0);
  CHECK(log_negativity(0.5) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(log_negativity(0.0), InvalidInput);
  CHECK_THROWS_AS(log_negativity(-1.0), InvalidInput);

  CHECK(squeezing_db(1.0) == 0.0);
  CHECK(squeezing_db(0.1) == doctest::Approx(-10.0).epsilon(1e-14));
  CHECK(std::abs(squeezing_db(0.12) - (-9.2)) <= 0.2);
  CHECK(std::abs(squeezing_db(0.124) - (-9.07)) <= 0.02);
  CHECK_THROWS_AS(squeezing_db(0.0), InvalidInput);

  CHECK(purity({1, 1, 0}) == 1.0);
  CHECK(purity({2, 2, 0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(purity({2, 2, 0}) == doctest::Approx(1.0 / std::sqrt(oracle::tmbs_matrix(2, 2, 0).determinant())));
}

TEST_CASE("build_tmbs: vacuum and analytic two-mode squeezer") {
  const auto vac = CorrelationState::vacuum(oracle::toy_grid(3));
  const ModePair u{BroadbandMode::unit(3, 1), BroadbandMode::unit(3, 2), Basis::kCustom};
  const TmbsCov v = build_tmbs(vac, u);
  CHECK(v.alpha == 1.0);
  CHECK(v.beta == 1.0);
  CHECK(v.gamma == 0.0);

  for (double r : {0.1, 0.7, 1.9}) {
    const auto s = oracle::tmsv_product(oracle::toy_grid(1), {r});
    const ModePair one{BroadbandMode::unit(1, 0), BroadbandMode::unit(1, 0), Basis::kCustom};
    const TmbsCov t = build_tmbs(s, one);
    CHECK(t.alpha == doctest::Approx(std::cosh(2 * r)).epsilon(1e-13));
    CHECK(t.beta == doctest::Approx(std::cosh(2 * r)).epsilon(1e-13));
    CHECK(t.gamma == doctest::Approx(std::sinh(2 * r)).epsilon(1e-13));
    // Pure limit: gamma = sqrt(alpha^2 - 1).
    CHECK(t.gamma == doctest::Approx(std::sqrt(t.alpha * t.alpha - 1)).epsilon(1e-10));
  }
  const ModePair bad{BroadbandMode::unit(2, 0), BroadbandMode::unit(3, 0), Basis::kCustom};
  CHECK_THROWS_AS(build_tmbs(vac, bad), InvalidInput);
}

TEST_CASE("reduction: phase fixing, moments and idempotence") {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const CorrelationState s = oracle::random_state(rng, 4);
    const ModePair p = random_pair(rng, 4);
    const Reduced r = reduce(s, p);
    const CVector& ua = r.modes.signal.amplitudes();
    const CVector& ub = r.modes.idler.amplitudes();
    const cdouble ab = (ua.transpose() * s.pair_amplitudes() * ub)(0);
    CHECK(std::abs(ab.imag()) <= 1e-12 * (1 + std::abs(ab)));
    CHECK(ab.real() >= 0);
    CHECK(r.cov.gamma == doctest::Approx(2 * std::abs(ab)));
    // <A^dag A> = u_A^* D u_A^T in row-vector notation.
    const double na = (ua.conjugate().transpose() * s.signal_photons() * ua)(0).real();
    CHECK(r.n_a == doctest::Approx(na));
    CHECK(r.cov.alpha == doctest::Approx(1 + 2 * na));
    // The phase rotation is the only change to the modes.
    CHECK(std::abs(std::abs(ua.dot(p.signal.amplitudes())) - 1.0) < 1e-12);
    CHECK(max_abs(CVector(ub - p.idler.amplitudes())) == 0.0);

    const Reduced again = reduce(s, r.modes);
    CHECK(again.cov.alpha == doctest::Approx(r.cov.alpha).epsilon(1e-14));
    CHECK(again.cov.beta == doctest::Approx(r.cov.beta).epsilon(1e-14));
    CHECK(again.cov.gamma == doctest::Approx(r.cov.gamma).epsilon(1e-14));
    CHECK(max_abs(CVector(again.modes.signal.amplitudes() - ua)) <= 1e-14);

    // Against the full covariance read through the mode quadratures.
    const RMatrix sig = cov_from_correlations(s).matrix();
    RMatrix proj = RMatrix::Zero(4, 16);
    for (Eigen::Index k = 0; k < 4; ++k) {
      // A = sum u_k a_k: q_A = Re u q - Im u p, p_A = Im u q + Re u p.
      proj(0, 2 * k) = ua(k).real();
      proj(0, 2 * k + 1) = -ua(k).imag();
      proj(1, 2 * k) = ua(k).imag();
      proj(1, 2 * k + 1) = ua(k).real();
      proj(2, 8 + 2 * k) = ub(k).real();
      proj(2, 8 + 2 * k + 1) = -ub(k).imag();
      proj(3, 8 + 2 * k) = ub(k).imag();
      proj(3, 8 + 2 * k + 1) = ub(k).real();
    }
    const RMatrix small = proj * sig * proj.transpose();
    CHECK(max_abs(RMatrix(small - r.cov.matrix())) <= 1e-10 * (1 + max_abs(small)));
  }
}

TEST_CASE("lambda/nu identity, no single-mode squeezing, physicality") {
  oracle::Rng rng(32);
  const CorrelationState solver = solver_state(4.0, 1.0 / 3.0, 15, 500.0);
  for (int trial = 0; trial < 500; ++trial) {
    const CorrelationState s = trial % 2 ? solver : oracle::random_state(rng, 15);
    const TmbsCov t = build_tmbs(s, random_pair(rng, 15));
    CHECK(t.alpha >= 1 - 1e-9);
    CHECK(t.beta >= 1 - 1e-9);
    const auto [vm, vp] = symplectic_values_pt(t);
    const auto [lm, lp] = tmbs_eigenvalues(t);
    CHECK(std::abs(lm - vm) <= 1e-8 * vm);
    CHECK(std::abs(lp - vp) <= 1e-8 * vp);
    CHECK(purity(t) <= 1 + 1e-8);
    CHECK(purity(t) > 0);
    const auto own = symplectic_spectrum(t.matrix());
    CHECK(own.back() >= 1 - 1e-6);
  }
}

TEST_CASE("report composes the metrics") {
  oracle::Rng rng(33);
  const CorrelationState s = oracle::random_state(rng, 5);
  const ModePair p = decomp::msq_modes(s);
  const Report r = report(s, p);
  const auto [vm, vp] = symplectic_values_pt(r.cov);
  CHECK(r.nu_minus == vm);
  CHECK(r.nu_plus == vp);
  CHECK(r.log_negativity == doctest::Approx(std::max(0.0, -std::log(vm))));
  CHECK(r.squeezing_db == doctest::Approx(10 * std::log10(r.lambda_minus)));
  CHECK(r.purity == doctest::Approx(purity(r.cov)));
  CHECK(r.modes.label == Basis::kMaxSqueezed);

  const auto vac = report(CorrelationState::vacuum(oracle::toy_grid(2)), random_pair(rng, 2));
  CHECK(vac.lambda_minus == 1.0);
  CHECK(vac.log_negativity == 0.0);
  CHECK(vac.purity == 1.0);
}

TEST_CASE("pure solver states: purity one and symmetric photon numbers in every basis") {
  const CorrelationState s = solver_state(0.0, 0.0, 21, 350.0, 2000);
  for (Basis b : {Basis::kMercerWolf, Basis::kWilliamsonEuler, Basis::kMaxSqueezed}) {
    CAPTURE(decomp::basis_label(b));
    const Report r = report(s, decomp::modes_for(b, s));
    CHECK(std::abs(r.cov.alpha * r.cov.beta - r.cov.gamma * r.cov.gamma - 1) <= 1e-6);
    CHECK(std::abs(r.cov.alpha - r.cov.beta) <= 1e-6 * r.cov.alpha);
  }
}

TEST_CASE("MSq optimality search") {
  const auto vac = CorrelationState::vacuum(oracle::toy_grid(3));
  const auto v = verify_msq_optimality(vac, 2, 1, {200});
  CHECK(v.best_found == doctest::Approx(1.0));
  CHECK(v.msq_value == doctest::Approx(1.0));

  oracle::Rng rng(34);
  for (int trial = 0; trial < 4; ++trial) {
    const CorrelationState s = oracle::random_state(rng, 5);
    const auto r = verify_msq_optimality(s, 8, 100 + trial, {400});
    CHECK(r.best_found >= r.msq_value - 1e-6);
    CHECK(r.best_found <= r.msq_value + 1e-3);
    CHECK(r.evaluations > 0);
  }
  // Thread count does not change the result.
  const CorrelationState s = oracle::random_state(rng, 6);
  SearchOptions one{300}, many{300};
  many.threads = 4;
  const auto a = verify_msq_optimality(s, 6, 9, one);
  const auto b = verify_msq_optimality(s, 6, 9, many);
  CHECK(a.best_found == b.best_found);
  CHECK(a.evaluations == b.evaluations);

  CHECK_THROWS_AS(verify_msq_optimality(s, 0, 1), InvalidInput);
  SearchOptions bad;
  bad.scale_end = 0;
  CHECK_THROWS_AS(verify_msq_optimality(s, 1, 1, bad), InvalidInput);
}
