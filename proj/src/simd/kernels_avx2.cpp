#include <immintrin.h>

#include <cstdint>

#include "kernel_tables.hpp"

namespace lossypdc::simd::detail {
namespace {

// Lane mask for the first `width` (0..4) doubles of a 256-bit vector.
inline __m256i lane_mask(std::size_t width) {
  const __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<std::int64_t>(width)), idx);
}

inline std::size_t clamp4(std::size_t w) { return w > 4 ? 4 : w; }

// R rows x 8 columns of c. When Full is false only `width` (< 8) columns are
// live and every load/store is masked.
template <int R, bool Full>
inline void block(std::size_t inner, std::size_t cols, const double* ar, const double* ai,
                  const double* br, const double* bi, double* cr, double* ci,
                  std::size_t width, bool accumulate) {
  const __m256i m0 = lane_mask(clamp4(width));
  const __m256i m1 = lane_mask(width > 4 ? width - 4 : 0);
  auto load = [&](const double* p, int half) {
    if constexpr (Full) {
      return _mm256_loadu_pd(p + 4 * half);
    } else {
      return _mm256_maskload_pd(p + 4 * half, half == 0 ? m0 : m1);
    }
  };
  auto store = [&](double* p, int half, __m256d v) {
    if constexpr (Full) {
      _mm256_storeu_pd(p + 4 * half, v);
    } else {
      _mm256_maskstore_pd(p + 4 * half, half == 0 ? m0 : m1, v);
    }
  };

  __m256d accr[R][2];
  __m256d acci[R][2];
  for (int r = 0; r < R; ++r) {
    for (int h = 0; h < 2; ++h) {
      if (accumulate) {
        accr[r][h] = load(cr + r * cols, h);
        acci[r][h] = load(ci + r * cols, h);
      } else {
        accr[r][h] = _mm256_setzero_pd();
        acci[r][h] = _mm256_setzero_pd();
      }
    }
  }
  for (std::size_t l = 0; l < inner; ++l) {
    const __m256d b0r = load(br + l * cols, 0);
    const __m256d b1r = load(br + l * cols, 1);
    const __m256d b0i = load(bi + l * cols, 0);
    const __m256d b1i = load(bi + l * cols, 1);
    for (int r = 0; r < R; ++r) {
      const __m256d xr = _mm256_broadcast_sd(ar + r * inner + l);
      const __m256d xi = _mm256_broadcast_sd(ai + r * inner + l);
      accr[r][0] = _mm256_fnmadd_pd(xi, b0i, _mm256_fmadd_pd(xr, b0r, accr[r][0]));
      acci[r][0] = _mm256_fmadd_pd(xi, b0r, _mm256_fmadd_pd(xr, b0i, acci[r][0]));
      accr[r][1] = _mm256_fnmadd_pd(xi, b1i, _mm256_fmadd_pd(xr, b1r, accr[r][1]));
      acci[r][1] = _mm256_fmadd_pd(xi, b1r, _mm256_fmadd_pd(xr, b1i, acci[r][1]));
    }
  }
  for (int r = 0; r < R; ++r) {
    for (int h = 0; h < 2; ++h) {
      store(cr + r * cols, h, accr[r][h]);
      store(ci + r * cols, h, acci[r][h]);
    }
  }
}

template <int R>
inline void row_panel(std::size_t i, std::size_t inner, std::size_t cols, ConstSplit a,
                      ConstSplit b, MutSplit c, bool accumulate) {
  const double* ar = a.re + i * inner;
  const double* ai = a.im + i * inner;
  std::size_t j = 0;
  for (; j + 8 <= cols; j += 8) {
    block<R, true>(inner, cols, ar, ai, b.re + j, b.im + j, c.re + i * cols + j,
                   c.im + i * cols + j, 8, accumulate);
  }
  if (j < cols) {
    block<R, false>(inner, cols, ar, ai, b.re + j, b.im + j, c.re + i * cols + j,
                    c.im + i * cols + j, cols - j, accumulate);
  }
}

void cgemm(std::size_t rows, std::size_t inner, std::size_t cols, ConstSplit a,
           ConstSplit b, MutSplit c, bool accumulate) {
  std::size_t i = 0;
  for (; i + 2 <= rows; i += 2) row_panel<2>(i, inner, cols, a, b, c, accumulate);
  if (i < rows) row_panel<1>(i, inner, cols, a, b, c, accumulate);
}

void axpy(std::size_t n, double s, ConstSplit x, ConstSplit k, MutSplit y) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y.re + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(k.re + i), _mm256_loadu_pd(x.re + i)));
    _mm256_storeu_pd(y.im + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(k.im + i), _mm256_loadu_pd(x.im + i)));
  }
  for (; i < n; ++i) {
    y.re[i] = x.re[i] + s * k.re[i];
    y.im[i] = x.im[i] + s * k.im[i];
  }
}

void rk4_combine(std::size_t n, double s, ConstSplit k1, ConstSplit k2, ConstSplit k3,
                 ConstSplit k4, MutSplit y) {
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d two = _mm256_set1_pd(2.0);
  auto lane = [&](const double* p1, const double* p2, const double* p3, const double* p4,
                  double* out, std::size_t i) {
    __m256d t = _mm256_add_pd(_mm256_loadu_pd(p2 + i), _mm256_loadu_pd(p3 + i));
    t = _mm256_fmadd_pd(two, t, _mm256_add_pd(_mm256_loadu_pd(p1 + i), _mm256_loadu_pd(p4 + i)));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vs, t, _mm256_loadu_pd(out + i)));
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lane(k1.re, k2.re, k3.re, k4.re, y.re, i);
    lane(k1.im, k2.im, k3.im, k4.im, y.im, i);
  }
  for (; i < n; ++i) {
    y.re[i] += s * ((k1.re[i] + k4.re[i]) + 2.0 * (k2.re[i] + k3.re[i]));
    y.im[i] += s * ((k1.im[i] + k4.im[i]) + 2.0 * (k2.im[i] + k3.im[i]));
  }
}

void cmul(std::size_t n, ConstSplit x, ConstSplit r, MutSplit y) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xr = _mm256_loadu_pd(x.re + i);
    const __m256d xi = _mm256_loadu_pd(x.im + i);
    const __m256d rr = _mm256_loadu_pd(r.re + i);
    const __m256d ri = _mm256_loadu_pd(r.im + i);
    _mm256_storeu_pd(y.re + i, _mm256_fmsub_pd(xr, rr, _mm256_mul_pd(xi, ri)));
    _mm256_storeu_pd(y.im + i, _mm256_fmadd_pd(xr, ri, _mm256_mul_pd(xi, rr)));
  }
  for (; i < n; ++i) {
    const double re = x.re[i] * r.re[i] - x.im[i] * r.im[i];
    const double im = x.re[i] * r.im[i] + x.im[i] * r.re[i];
    y.re[i] = re;
    y.im[i] = im;
  }
}

void damped_drive(std::size_t n, double decay, double gain, ConstSplit y, ConstSplit w,
                  MutSplit out) {
  const __m256d nd = _mm256_set1_pd(-decay);
  const __m256d g = _mm256_set1_pd(gain);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yr = _mm256_loadu_pd(y.re + i);
    const __m256d yi = _mm256_loadu_pd(y.im + i);
    const __m256d wr = _mm256_loadu_pd(w.re + i);
    const __m256d wi = _mm256_loadu_pd(w.im + i);
    _mm256_storeu_pd(out.re + i, _mm256_fnmadd_pd(g, wi, _mm256_mul_pd(nd, yr)));
    _mm256_storeu_pd(out.im + i, _mm256_fmadd_pd(g, wr, _mm256_mul_pd(nd, yi)));
  }
  for (; i < n; ++i) {
    const double re = -decay * y.re[i] - gain * w.im[i];
    const double im = -decay * y.im[i] + gain * w.re[i];
    out.re[i] = re;
    out.im[i] = im;
  }
}

}  // namespace

const KernelTable kAvx2Kernels{Isa::kAvx2, cgemm, axpy, rk4_combine, cmul, damped_drive};

}  // namespace lossypdc::simd::detail
