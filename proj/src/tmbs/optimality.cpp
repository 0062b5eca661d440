#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "lossypdc/core/errors.hpp"
#include "lossypdc/tmbs/tmbs.hpp"

namespace lossypdc::tmbs {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Blocks {
  CMatrix da, db, x;
};

double lambda_from(double alpha, double beta, double gamma) {
  return 0.5 * (alpha + beta - std::hypot(alpha - beta, 2.0 * gamma));
}

double lambda_minus(const Blocks& b, const CVector& ua, const CVector& ub) {
  const double alpha = 1.0 + 2.0 * ua.dot(b.da * ua).real();
  const double beta = 1.0 + 2.0 * ub.dot(b.db * ub).real();
  const double gamma = 2.0 * std::abs((ua.transpose() * b.x * ub)(0));
  return lambda_from(alpha, beta, gamma);
}

cdouble bilinear(const CVector& u, const CVector& w) { return (u.array() * w.array()).sum(); }

// Everything needed to evaluate lambda_- along
//   u_A(t) = (u_A + t d_A) / |.|,  u_B(t) = (u_B + t d_B) / |.|
// in O(1) per point.
struct Line {
  double a0, a1, a2, na1, na2;  // u^H Da u, Re u^H Da d, d^H Da d, Re u^H d, |d|^2
  double b0, b1, b2, nb1, nb2;
  cdouble c0, c1, c2;           // u_A^T X u_B expanded in t

  double operator()(double t) const {
    const double qa = 1.0 + 2.0 * t * na1 + t * t * na2;
    const double qb = 1.0 + 2.0 * t * nb1 + t * t * nb2;
    const double alpha = 1.0 + 2.0 * (a0 + 2.0 * t * a1 + t * t * a2) / qa;
    const double beta = 1.0 + 2.0 * (b0 + 2.0 * t * b1 + t * t * b2) / qb;
    const double gamma = 2.0 * std::abs(c0 + t * c1 + t * t * c2) / std::sqrt(qa * qb);
    return lambda_from(alpha, beta, gamma);
  }
};

struct Point {
  CVector ua, ub;
  double value = 0.0;
};

CVector random_unit(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = {g(rng), g(rng)};
  return v.normalized();
}

Point search_one(const Blocks& b, std::uint64_t seed, const SearchOptions& opt, std::size_t& evals) {
  std::mt19937_64 rng(seed);
  const Eigen::Index n = b.da.rows();
  Point p{random_unit(rng, n), random_unit(rng, n), 0.0};
  p.value = lambda_minus(b, p.ua, p.ub);
  ++evals;
  std::normal_distribution<double> g;
  std::uniform_int_distribution<Eigen::Index> pick(0, 2 * n - 1);

  const std::size_t steps = std::max<std::size_t>(opt.steps, 2);
  CVector dir_a, dir_b, ga_prev, gb_prev;
  double len = opt.scale_start;
  for (std::size_t t = 0; t < steps; ++t) {
    const double frac = static_cast<double>(t) / static_cast<double>(steps - 1);
    const double scale = opt.scale_start * std::pow(opt.scale_end / opt.scale_start, frac);

    // Riemannian gradient of lambda_- on the product of unit spheres
    // (Wirtinger derivative, tangent projection).
    const CVector da_u = b.da * p.ua;
    const CVector db_u = b.db * p.ub;
    const CVector x_ub = b.x * p.ub;
    const CVector xt_ua = b.x.transpose() * p.ua;
    const double alpha = 1.0 + 2.0 * p.ua.dot(da_u).real();
    const double beta = 1.0 + 2.0 * p.ub.dot(db_u).real();
    const cdouble c = bilinear(p.ua, x_ub);
    const double gamma = 2.0 * std::abs(c);
    const double s = std::max(std::hypot(alpha - beta, 2.0 * gamma), 1e-300);
    const cdouble phase = std::abs(c) > 0.0 ? c / std::abs(c) : cdouble{0.0, 0.0};
    CVector ga = 2.0 * ((1.0 - (alpha - beta) / s) * da_u - (2.0 * gamma / s) * phase * x_ub.conjugate());
    CVector gb = 2.0 * ((1.0 + (alpha - beta) / s) * db_u - (2.0 * gamma / s) * phase * xt_ua.conjugate());
    ga -= p.ua.dot(ga).real() * p.ua;
    gb -= p.ub.dot(gb).real() * p.ub;

    // Polak-Ribiere conjugate direction, reset when it is not a descent
    // direction.
    if (ga_prev.size() == 0) {
      dir_a = -ga;
      dir_b = -gb;
    } else {
      const double prev = ga_prev.squaredNorm() + gb_prev.squaredNorm();
      const double pr = std::max(
          0.0, (ga.dot(ga - ga_prev).real() + gb.dot(gb - gb_prev).real()) / std::max(prev, 1e-300));
      dir_a = -ga + pr * dir_a;
      dir_b = -gb + pr * dir_b;
      dir_a -= p.ua.dot(dir_a).real() * p.ua;
      dir_b -= p.ub.dot(dir_b).real() * p.ub;
      if (ga.dot(dir_a).real() + gb.dot(dir_b).real() >= 0.0) {
        dir_a = -ga;
        dir_b = -gb;
      }
    }
    ga_prev = ga;
    gb_prev = gb;

    bool moved = false;
    const double dnorm = std::sqrt(dir_a.squaredNorm() + dir_b.squaredNorm());
    if (dnorm > 0.0) {
      const CVector da_d = b.da * dir_a;
      const CVector db_d = b.db * dir_b;
      const CVector x_db = b.x * dir_b;
      const Line line{p.ua.dot(da_u).real(), p.ua.dot(da_d).real(), dir_a.dot(da_d).real(),
                      p.ua.dot(dir_a).real(), dir_a.squaredNorm(),
                      p.ub.dot(db_u).real(), p.ub.dot(db_d).real(), dir_b.dot(db_d).real(),
                      p.ub.dot(dir_b).real(), dir_b.squaredNorm(),
                      c, bilinear(dir_a, x_ub) + bilinear(p.ua, x_db), bilinear(dir_a, x_db)};
      // Backtrack to the first improvement, then expand while it improves.
      len = std::min(2.0 * len, 1.0);
      double best_t = 0.0;
      double best_v = p.value;
      for (int k = 0; k < 60; ++k, len *= 0.5) {
        const double v = line(len / dnorm);
        ++evals;
        if (v < best_v) {
          best_t = len / dnorm;
          best_v = v;
          break;
        }
      }
      if (best_t > 0.0) {
        for (int k = 0; k < 60; ++k) {
          const double v = line(2.0 * best_t);
          ++evals;
          if (!(v < best_v)) break;
          best_t *= 2.0;
          best_v = v;
          len *= 2.0;
        }
        const CVector ua = (p.ua + best_t * dir_a).normalized();
        const CVector ub = (p.ub + best_t * dir_b).normalized();
        const double v = lambda_minus(b, ua, ub);
        ++evals;
        if (v < p.value) {
          p = {ua, ub, v};
          moved = true;
        }
      }
    }
    if (moved) continue;
    ga_prev.resize(0);
    len = scale;

    // Stalled: single-coordinate complex kick at the annealed scale.
    CVector ua = p.ua;
    CVector ub = p.ub;
    const Eigen::Index k = pick(rng);
    const cdouble kick{scale * g(rng), scale * g(rng)};
    if (k < n) {
      ua(k) += kick;
      ua.normalize();
    } else {
      ub(k - n) += kick;
      ub.normalize();
    }
    const double v = lambda_minus(b, ua, ub);
    ++evals;
    if (v < p.value) p = {ua, ub, v};
  }
  return p;
}

}  // namespace

OptimalityResult verify_msq_optimality(const CorrelationState& state, std::size_t trials,
                                       std::uint64_t seed, const SearchOptions& options) {
  if (trials == 0) throw InvalidInput("verify_msq_optimality: need at least one trial");
  if (!(options.scale_start > 0.0) || !(options.scale_end > 0.0)) {
    throw InvalidInput("verify_msq_optimality: perturbation scales must be positive");
  }
  const Blocks blocks{state.signal_photons(), state.idler_photons(), state.pair_amplitudes()};

  OptimalityResult out;
  const decomp::ModePair msq = decomp::msq_modes(state);
  out.msq_value = lambda_minus(blocks, msq.signal.amplitudes(), msq.idler.amplitudes());

  std::vector<double> best(trials, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> evals(trials, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      best[i] = search_one(blocks, splitmix(seed ^ splitmix(i)), options, evals[i]).value;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(trials)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  out.best_found = *std::min_element(best.begin(), best.end());
  for (std::size_t e : evals) out.evaluations += e;
  return out;
}

}  // namespace lossypdc::tmbs
