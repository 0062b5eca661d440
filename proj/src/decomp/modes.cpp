#include "lossypdc/decomp/modes.hpp"

#include <cmath>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/core/gaussian.hpp"

namespace lossypdc::decomp {
namespace {

constexpr double kDegenerateGap = 1e-10;
constexpr double kPartitionFloor = 1e-8;

// Rotates v so that its largest-magnitude entry (lowest index on ties) is
// real and positive.
void fix_phase(CVector& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double a = std::abs(v(k));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = k;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

struct Dominant {
  CVector vector;
  bool degenerate = false;
};

// Eigenvector of the largest eigenvalue of a Hermitian matrix. Inside a
// degenerate cluster the projection of the lowest-index basis vector that
// survives is used, so the result does not depend on the solver's basis.
Dominant dominant_eigenvector(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const RVector& vals = es.eigenvalues();
  const Eigen::Index n = vals.size();
  const double top = vals(n - 1);
  const double tol = kDegenerateGap * std::max(std::abs(top), 1e-300);
  Eigen::Index first = n - 1;
  while (first > 0 && top - vals(first - 1) <= tol) --first;

  Dominant out;
  if (first == n - 1) {
    out.vector = es.eigenvectors().col(n - 1);
  } else {
    out.degenerate = true;
    const CMatrix basis = es.eigenvectors().rightCols(n - first);
    for (Eigen::Index k = 0; k < n; ++k) {
      CVector p = basis * basis.row(k).adjoint();
      const double norm = p.norm();
      if (norm > 1e-8) {
        out.vector = p / norm;
        break;
      }
    }
  }
  fix_phase(out.vector);
  return out;
}

}  // namespace

std::string_view basis_label(Basis basis) {
  switch (basis) {
    case Basis::kMercerWolf: return "MW";
    case Basis::kWilliamsonEuler: return "WE";
    case Basis::kMaxSqueezed: return "MSq";
    case Basis::kCustom: return "custom";
  }
  return "custom";
}

std::optional<Basis> parse_basis(std::string_view label) {
  for (Basis b : {Basis::kMercerWolf, Basis::kWilliamsonEuler, Basis::kMaxSqueezed, Basis::kCustom}) {
    if (basis_label(b) == label) return b;
  }
  return std::nullopt;
}

ModePair mercer_wolf_modes(const CorrelationState& state) {
  const Dominant a = dominant_eigenvector(state.signal_photons());
  const Dominant b = dominant_eigenvector(state.idler_photons());
  // <A B> = v_a^T X v_b for A = sum v_a a. Rotating both modes by e^{-i phi/2}
  // brings it onto the positive real axis.
  const cdouble ab = a.vector.transpose() * state.pair_amplitudes() * b.vector;
  const cdouble rot = std::abs(ab) > 0.0 ? std::polar(1.0, -0.5 * std::arg(ab)) : cdouble{1.0, 0.0};
  return {BroadbandMode::normalized(a.vector * rot), BroadbandMode::normalized(b.vector * rot),
          Basis::kMercerWolf, state.pair_amplitudes().cwiseAbs().maxCoeff() > 0.0,
          a.degenerate || b.degenerate};
}

ModePair unpack_joint_mode(const RVector& v, std::size_t modes_per_part, Basis label) {
  const auto n = static_cast<Eigen::Index>(modes_per_part);
  if (v.size() != 4 * n) throw InvalidInput("unpack_joint_mode: expected 4N entries");
  CVector ua(n), ub(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    ua(k) = {v(2 * k + 1), v(2 * k)};
    ub(k) = {v(2 * n + 2 * k + 1), v(2 * n + 2 * k)};
  }
  const double total = v.norm();
  if (ua.norm() <= kPartitionFloor * total || ub.norm() <= kPartitionFloor * total) {
    throw PartitionDegeneracyError("joint mode has no weight in one partition");
  }
  return {BroadbandMode::normalized(ua), BroadbandMode::normalized(ub), label, true, false};
}

ModePair williamson_euler_modes(const CorrelationState& state) {
  const std::size_t n = state.modes_per_part();
  const WilliamsonEulerResult we = williamson_euler(cov_from_correlations(state));
  if (we.squeezing.size() == 0 || we.squeezing(0) <= 0.0) {
    return {BroadbandMode::unit(n, 0), BroadbandMode::unit(n, 0), Basis::kWilliamsonEuler, false, false};
  }
  RVector col = we.o_left.col(0);
  Eigen::Index best = 0;
  col.cwiseAbs().maxCoeff(&best);
  if (col(best) < 0.0) col = -col;
  ModePair out = unpack_joint_mode(col, n, Basis::kWilliamsonEuler);
  out.degenerate = we.squeezing.size() > 1 &&
                   we.squeezing(0) - we.squeezing(1) <= kDegenerateGap * we.squeezing(0);
  return out;
}

ModePair msq_modes(const CorrelationState& state) {
  const std::size_t n = state.modes_per_part();
  const MinEigen me = smallest_cov_eigenvalue(cov_from_correlations(state));
  if (me.value >= 1.0 - 1e-12) {
    return {BroadbandMode::unit(n, 0), BroadbandMode::unit(n, 0), Basis::kMaxSqueezed, false, false};
  }
  ModePair out = unpack_joint_mode(me.vector, n, Basis::kMaxSqueezed);
  // The a -> ia, b -> -ib symmetry always doubles this eigenvalue; only a
  // larger multiplicity means a genuine choice between mode pairs.
  out.degenerate = me.multiplicity > 2;
  return out;
}

ModePair modes_for(Basis basis, const CorrelationState& state) {
  switch (basis) {
    case Basis::kMercerWolf: return mercer_wolf_modes(state);
    case Basis::kWilliamsonEuler: return williamson_euler_modes(state);
    case Basis::kMaxSqueezed: return msq_modes(state);
    case Basis::kCustom: break;
  }
  throw InvalidInput("modes_for: custom modes must be supplied by the caller");
}

}  // namespace lossypdc::decomp
