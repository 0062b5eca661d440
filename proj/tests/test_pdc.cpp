#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/core/gaussian.hpp"
#include "lossypdc/pdc/integrator.hpp"
#include "lossypdc/pdc/waveguide.hpp"
#include "support/oracles.hpp"

using namespace lossypdc;
using namespace lossypdc::pdc;
using oracle::max_abs;

namespace {

const PumpSpec kPump{};
constexpr double kC = kSpeedOfLight;

WaveguideSpec device(double db = 0.0, double r = 0.0) { return with_losses(reference_waveguide(kPump), {db, r}); }

FrequencyGrid single_point() { return FrequencyGrid::uniform(kPump.center_rad_s() / 2, 1.0, 1); }

double rel_err(const CMatrix& got, const CMatrix& ref) {
  return max_abs(CMatrix(got - ref)) / std::max(max_abs(ref), 1e-300);
}

// Largest per-entry deviation, relative to the entry itself where it is non-zero
// and to the matrix scale where it vanishes.
double elementwise_rel(const CMatrix& got, const CMatrix& ref) {
  const double scale = max_abs(ref);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < ref.rows(); ++i)
    for (Eigen::Index j = 0; j < ref.cols(); ++j) {
      const double denom = std::abs(ref(i, j)) > 1e-12 * scale ? std::abs(ref(i, j)) : scale;
      worst = std::max(worst, std::abs(got(i, j) - ref(i, j)) / denom);
    }
  return worst;
}

}  // namespace

TEST_CASE("refractive index and wave vectors") {
  const WaveguideSpec s = device();
  for (Field f : {Field::kPump, Field::kSignal, Field::kIdler}) {
    const auto& fd = s.field(f);
    CHECK(refractive_index(f, fd.omega0_rad_s, s) == fd.n0);
    CHECK(wavevector(f, fd.omega0_rad_s, s) == doctest::Approx(fd.n0 * fd.omega0_rad_s / kC).epsilon(1e-15));
    // Derivative of the linear model by central difference.
    const double w0 = fd.omega0_rad_s, h = 1e-4 * w0;
    const double fd_slope = (refractive_index(f, w0 + h, s) - refractive_index(f, w0 - h, s)) / (2 * h);
    const double slope = (kC / fd.vg_m_s - fd.n0) / w0;
    CHECK(std::abs(fd_slope - slope) <= 1e-6 * std::abs(slope));
  }
  const double vgp = 0.9 * kC / 1.9;
  CHECK(s.signal.vg_m_s == doctest::Approx(0.96 * vgp));
  const double w = 1.01 * s.signal.omega0_rad_s;
  CHECK(refractive_index(Field::kSignal, w, s) == doctest::Approx(1.9 + 0.01 * (kC / (0.96 * vgp) - 1.9)).epsilon(1e-14));

  const double wp = kPump.center_rad_s();
  CHECK(s.k_qpm_rad_m == doctest::Approx(0.05 * wp / kC).epsilon(1e-9));
  const double kp = wavevector(Field::kPump, wp, s);
  CHECK(std::abs(phase_mismatch(wp / 2, wp / 2, s)) <= 1e-6 * kp);

  CHECK_THROWS_AS(refractive_index(Field::kSignal, -1.0, s), InvalidInput);
  CHECK_THROWS_AS(refractive_index(static_cast<Field>(7), wp, s), InvalidInput);
}

TEST_CASE("pump spectrum: peak, width and time-domain FWHM") {
  const double wp = kPump.center_rad_s();
  const double sig = 2 * std::sqrt(std::log(2.0)) / kPump.fwhm_s;
  CHECK(kPump.sigma_rad_s() == doctest::Approx(sig));
  CHECK(pump_spectrum(wp, kPump) == cdouble(1.0, 0.0));
  CHECK(pump_spectrum(wp + sig, kPump).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(pump_spectrum(wp - sig, kPump).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(pump_spectrum(wp + 0.3 * sig, kPump).imag() == 0.0);

  // |FT S|^2 on a fine time grid; half-maximum crossings by linear interpolation.
  const int nw = 801, nt = 4001;
  const double wspan = 10 * sig, dw = 2 * wspan / (nw - 1);
  const double tspan = 2 * kPump.fwhm_s;
  std::vector<double> t(nt), inten(nt);
  for (int k = 0; k < nt; ++k) {
    t[k] = -tspan + 2 * tspan * k / (nt - 1);
    cdouble e = 0;
    for (int m = 0; m < nw; ++m) {
      const double dwm = -wspan + m * dw;
      e += pump_spectrum(wp + dwm, kPump) * std::polar(1.0, -dwm * t[k]) * dw;
    }
    inten[k] = std::norm(e);
  }
  const double peak = *std::max_element(inten.begin(), inten.end());
  double left = 0, right = 0;
  for (int k = 1; k < nt; ++k) {
    const double a = inten[k - 1] - peak / 2, b = inten[k] - peak / 2;
    if (a < 0 && b >= 0) left = t[k - 1] + (t[k] - t[k - 1]) * (-a) / (b - a);
    if (a >= 0 && b < 0) right = t[k - 1] + (t[k] - t[k - 1]) * a / (a - b);
  }
  CHECK(std::abs((right - left) - kPump.fwhm_s) <= 0.01 * kPump.fwhm_s);
}

TEST_CASE("coupling matrix structure") {
  const WaveguideSpec s = device();
  const FrequencyGrid g = default_grid(s, kPump, 9);
  const SolverConfig cfg{g, 1.0, 100, false};
  const CMatrix m0 = coupling_matrix(0.0, cfg, s, kPump);
  CHECK(m0(4, 9 + 4) == cdouble(1.0, 0.0));
  oracle::Rng rng(11);
  for (int k = 0; k < 10; ++k) {
    const CMatrix m = coupling_matrix(rng.uniform(0, s.length_m), cfg, s, kPump);
    CHECK(max_abs(CMatrix(m - m.transpose())) == 0.0);
    CHECK(max_abs(CMatrix(m.topLeftCorner(9, 9))) == 0.0);
    CHECK(max_abs(CMatrix(m.bottomRightCorner(9, 9))) == 0.0);
    CHECK(max_abs(RMatrix(m.cwiseAbs() - m0.cwiseAbs())) < 1e-14);
  }
}

TEST_CASE("loss coefficients") {
  auto [s0, i0] = loss_coefficients({0.0, 0.0}, 0.01);
  CHECK(s0 == 0.0);
  CHECK(i0 == 0.0);
  auto [s1, i1] = loss_coefficients({3.0, 0.0}, 0.01);
  CHECK(s1 == doctest::Approx(69.08).epsilon(1e-4));
  CHECK(i1 == s1);
  auto [s2, i2] = loss_coefficients({5.0, 1.0 / 3.0}, 0.01);
  CHECK(s2 == doctest::Approx(2 * i2).epsilon(1e-14));
  CHECK((s2 + i2) / 2 == doctest::Approx(std::log(10.0) / 10 * 5 / 0.01));
  // eta_bar dB is total attenuation: exp(-eta_bar L) == 10^(-dB/10).
  CHECK(std::exp(-(s2 + i2) / 2 * 0.01) == doctest::Approx(std::pow(10.0, -0.5)));
  CHECK_THROWS_AS(loss_coefficients({-1.0, 0.0}, 0.01), InvalidInput);
  CHECK_THROWS_AS(loss_coefficients({1.0, 1.5}, 0.01), InvalidInput);
  CHECK_THROWS_AS(loss_coefficients({1.0, 0.0}, 0.0), InvalidInput);
}

TEST_CASE("spec validation") {
  WaveguideSpec s = device();
  CHECK_NOTHROW(s.validate());
  s.length_m = 0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = device();
  s.idler.vg_m_s = -1;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = device();
  s.eta_s_per_m = -0.1;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  CHECK_THROWS_AS((PumpSpec{0.0, 1e-12}.validate()), InvalidInput);
  const SolverConfig few{single_point(), 1.0, 99, false};
  CHECK_THROWS_AS(few.validate(), InvalidInput);
  const SolverConfig neg{single_point(), -1.0, 100, false};
  CHECK_THROWS_AS(neg.validate(), InvalidInput);
}

TEST_CASE("zero gain leaves the vacuum untouched") {
  const WaveguideSpec s = device(4.0, 1.0 / 3.0);
  const auto st = integrate({default_grid(s, kPump, 7), 0.0, 100, false}, s, kPump);
  CHECK(max_abs(st.d()) == 0.0);
  CHECK(max_abs(st.c()) == 0.0);
  CHECK(st.z() == s.length_m);
}

TEST_CASE("block integrator matches the full-matrix master equation") {
  for (auto [db, r] : {std::pair{0.0, 0.0}, std::pair{3.0, 0.0}, std::pair{6.0, 1.0 / 3.0}}) {
    CAPTURE(db);
    const WaveguideSpec s = device(db, r);
    const FrequencyGrid g = default_grid(s, kPump, 7);
    const double gain = 900.0;
    const std::size_t steps = 300;
    const auto ref = oracle::full_master_rk4(s, kPump, g, gain, steps);
    const auto got = integrate_interaction_frame({g, gain, steps, false}, s, kPump);
    CHECK(rel_err(got.d(), ref.d) < 1e-10);
    CHECK(rel_err(got.c(), ref.c) < 1e-10);

    // Lab frame is the interaction state with e^{ikL} restored.
    const auto lab = integrate({g, gain, steps, false}, s, kPump);
    CVector t(14);
    for (Eigen::Index k = 0; k < 7; ++k) {
      t(k) = std::polar(1.0, oracle::k_of(s.signal, g[k]) * s.length_m);
      t(7 + k) = std::polar(1.0, oracle::k_of(s.idler, g[k]) * s.length_m);
    }
    const auto lab_ref = oracle::attenuate(got, t);
    CHECK(rel_err(lab.d(), lab_ref.d()) < 1e-10);
    CHECK(rel_err(lab.c(), lab_ref.c()) < 1e-10);
    const auto back = to_interaction_frame(lab, s);
    CHECK(rel_err(back.d(), got.d()) < 1e-10);
    CHECK(rel_err(back.c(), got.c()) < 1e-10);
  }
}

TEST_CASE("single pair with constant coupling against the matrix exponential") {
  const double wp = kPump.center_rad_s();
  for (auto [db, r] : {std::pair{0.0, 0.0}, std::pair{5.0, 1.0 / 3.0}, std::pair{2.0, -0.5}}) {
    CAPTURE(db);
    const WaveguideSpec s = device(db, r);
    const double gain = 150.0;
    const auto got = integrate({single_point(), gain, 2000, false}, s, kPump);
    const auto ref = oracle::expm_single_pair(gain, 1.0, s.eta_s_per_m, s.eta_i_per_m, s.signal.n0 * wp / 2 / kC,
                                              s.idler.n0 * wp / 2 / kC, s.length_m);
    CHECK(elementwise_rel(got.d(), ref.d) <= 1e-8);
    CHECK(elementwise_rel(got.c(), ref.c) <= 1e-8);
    if (db == 0.0) {
      const double n = std::pow(std::sinh(gain * s.length_m), 2);
      CHECK(got.d()(0, 0).real() == doctest::Approx(n).epsilon(1e-10));
      CHECK(got.d()(1, 1).real() == doctest::Approx(n).epsilon(1e-10));
      CHECK(std::abs(got.c()(0, 1)) == doctest::Approx(0.5 * std::sinh(2 * gain * s.length_m)).epsilon(1e-10));
    }
  }
}

TEST_CASE("solver state invariants, purity and loss monotonicity") {
  const FrequencyGrid g = default_grid(device(), kPump, 21);
  const double gain = 350.0;
  const auto pure = integrate({g, gain, 1000, false}, device(), kPump);
  const auto diag = check_invariants(pure);
  CHECK(diag.ok);
  CHECK(diag.block_leak <= 1e-8);
  for (double nu : symplectic_spectrum(cov_from_correlations(pure))) CHECK(std::abs(nu - 1.0) <= 1e-5);

  double prev = pure.d().trace().real();
  for (double db = 0.5; db <= 10.0; db += 0.5) {
    const auto st = integrate({g, gain, 300, false}, device(db, 1.0 / 3.0), kPump);
    CHECK(check_invariants(st).ok);
    const auto nu = symplectic_spectrum(cov_from_correlations(st));
    CHECK(nu.back() >= 1 - 1e-6);
    const double tr = st.d().trace().real();
    CHECK(tr < prev);
    prev = tr;
  }
}

TEST_CASE("step doubling changes the scalars by less than 1e-4") {
  const WaveguideSpec s = device(5.0, 1.0 / 3.0);
  const FrequencyGrid g = default_grid(s, kPump, 21);
  const auto a = integrate({g, 400.0, 500, false}, s, kPump);
  const auto b = integrate({g, 400.0, 1000, false}, s, kPump);
  const double ta = a.d().trace().real(), tb = b.d().trace().real();
  CHECK(std::abs(ta - tb) < 1e-4 * tb);
  CHECK(signal_photons(a, PhotonTarget::kFirstMode) ==
        doctest::Approx(signal_photons(b, PhotonTarget::kFirstMode)).epsilon(1e-4));
  CHECK_NOTHROW(integrate({g, 400.0, 500, true}, s, kPump));
}

TEST_CASE("solver error paths") {
  const WaveguideSpec s = device();
  const FrequencyGrid g = default_grid(s, kPump, 5);
  // Far too coarse for this gain: doubling the steps moves the photon number.
  CHECK_THROWS_AS(integrate({g, 3000.0, 100, true}, s, kPump), StepCountError);
  CHECK_THROWS_AS(integrate({g, 1e200, 100, false}, s, kPump), BlowupError);
  CHECK_THROWS_AS(integrate({g, 1.0, 10, false}, s, kPump), InvalidInput);
}

TEST_CASE("joint spectral intensity") {
  const WaveguideSpec s = device();
  const FrequencyGrid g = default_grid(s, kPump, 41);
  CHECK_THROWS_AS(jsi(CorrelationState::vacuum(g)), NormalizationError);

  const auto st = integrate({g, 2.0, 200, false}, s, kPump);
  CHECK(st.d().trace().real() < 1e-2);
  const RMatrix m = jsi(st);
  CHECK(m.maxCoeff() == 1.0);
  CHECK(m.minCoeff() >= 0.0);
  Eigen::Index i = 0, j = 0;
  m.maxCoeff(&i, &j);
  CHECK(std::abs(i + j - 40) <= 2);
  CHECK(std::abs(i - 20) <= 10);
  // At low gain <a b> is first order in the gain, so the normalized map does
  // not move when the gain is halved.
  const auto weak = integrate({g, 1.0, 200, false}, s, kPump);
  CHECK(max_abs(RMatrix(jsi(weak) - m)) < 1e-3);
}

TEST_CASE("gain calibration") {
  const WaveguideSpec s = device();
  const FrequencyGrid g = default_grid(s, kPump, 21);
  const SolverConfig base{g, 0.0, 200, false};
  for (PhotonTarget target : {PhotonTarget::kFirstMode, PhotonTarget::kTotal}) {
    for (double n : {0.5, 10.0}) {
      const double gain = calibrate_gain(n, s, kPump, base, target);
      const auto st = integrate_interaction_frame({g, gain, 200, false}, s, kPump);
      CHECK(std::abs(signal_photons(st, target) - n) <= 1e-3 * n);
    }
  }
  oracle::Rng rng(12);
  for (int k = 0; k < 3; ++k) {
    const double gain = rng.uniform(10.0, 300.0);
    const double n1 = signal_photons(integrate_interaction_frame({g, gain, 200, false}, s, kPump), PhotonTarget::kTotal);
    const double n2 =
        signal_photons(integrate_interaction_frame({g, 2 * gain, 200, false}, s, kPump), PhotonTarget::kTotal);
    CHECK(n2 > n1);
  }
  CHECK_THROWS_AS(calibrate_gain(-1.0, s, kPump, base), InvalidInput);
  CHECK_THROWS_AS(calibrate_gain(1.0, device(1.0), kPump, base), InvalidInput);
}
