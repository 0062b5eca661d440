#include <immintrin.h>

#include "kernel_tables.hpp"

namespace lossypdc::simd::detail {
namespace {

inline __mmask8 tail_mask(std::size_t width) {
  return width >= 8 ? static_cast<__mmask8>(0xFF) : static_cast<__mmask8>((1u << width) - 1u);
}

// R rows x 16 columns of c; masked when Full is false.
template <int R, bool Full>
inline void block(std::size_t inner, std::size_t cols, const double* ar, const double* ai,
                  const double* br, const double* bi, double* cr, double* ci,
                  std::size_t width, bool accumulate) {
  const __mmask8 m0 = tail_mask(width);
  const __mmask8 m1 = tail_mask(width > 8 ? width - 8 : 0);
  auto load = [&](const double* p, int half) {
    if constexpr (Full) {
      return _mm512_loadu_pd(p + 8 * half);
    } else {
      return _mm512_maskz_loadu_pd(half == 0 ? m0 : m1, p + 8 * half);
    }
  };
  auto store = [&](double* p, int half, __m512d v) {
    if constexpr (Full) {
      _mm512_storeu_pd(p + 8 * half, v);
    } else {
      _mm512_mask_storeu_pd(p + 8 * half, half == 0 ? m0 : m1, v);
    }
  };

  __m512d accr[R][2];
  __m512d acci[R][2];
  for (int r = 0; r < R; ++r) {
    for (int h = 0; h < 2; ++h) {
      if (accumulate) {
        accr[r][h] = load(cr + r * cols, h);
        acci[r][h] = load(ci + r * cols, h);
      } else {
        accr[r][h] = _mm512_setzero_pd();
        acci[r][h] = _mm512_setzero_pd();
      }
    }
  }
  for (std::size_t l = 0; l < inner; ++l) {
    const __m512d b0r = load(br + l * cols, 0);
    const __m512d b1r = load(br + l * cols, 1);
    const __m512d b0i = load(bi + l * cols, 0);
    const __m512d b1i = load(bi + l * cols, 1);
    for (int r = 0; r < R; ++r) {
      const __m512d xr = _mm512_set1_pd(ar[r * inner + l]);
      const __m512d xi = _mm512_set1_pd(ai[r * inner + l]);
      accr[r][0] = _mm512_fnmadd_pd(xi, b0i, _mm512_fmadd_pd(xr, b0r, accr[r][0]));
      acci[r][0] = _mm512_fmadd_pd(xi, b0r, _mm512_fmadd_pd(xr, b0i, acci[r][0]));
      accr[r][1] = _mm512_fnmadd_pd(xi, b1i, _mm512_fmadd_pd(xr, b1r, accr[r][1]));
      acci[r][1] = _mm512_fmadd_pd(xi, b1r, _mm512_fmadd_pd(xr, b1i, acci[r][1]));
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
  for (; j + 16 <= cols; j += 16) {
    block<R, true>(inner, cols, ar, ai, b.re + j, b.im + j, c.re + i * cols + j,
                   c.im + i * cols + j, 16, accumulate);
  }
  if (j < cols) {
    block<R, false>(inner, cols, ar, ai, b.re + j, b.im + j, c.re + i * cols + j,
                    c.im + i * cols + j, cols - j, accumulate);
  }
}

void cgemm(std::size_t rows, std::size_t inner, std::size_t cols, ConstSplit a,
           ConstSplit b, MutSplit c, bool accumulate) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) row_panel<4>(i, inner, cols, a, b, c, accumulate);
  for (; i + 2 <= rows; i += 2) row_panel<2>(i, inner, cols, a, b, c, accumulate);
  if (i < rows) row_panel<1>(i, inner, cols, a, b, c, accumulate);
}

void axpy(std::size_t n, double s, ConstSplit x, ConstSplit k, MutSplit y) {
  const __m512d vs = _mm512_set1_pd(s);
  for (std::size_t i = 0; i < n; i += 8) {
    const __mmask8 m = tail_mask(n - i);
    const __m512d r = _mm512_fmadd_pd(vs, _mm512_maskz_loadu_pd(m, k.re + i), _mm512_maskz_loadu_pd(m, x.re + i));
    const __m512d im = _mm512_fmadd_pd(vs, _mm512_maskz_loadu_pd(m, k.im + i), _mm512_maskz_loadu_pd(m, x.im + i));
    _mm512_mask_storeu_pd(y.re + i, m, r);
    _mm512_mask_storeu_pd(y.im + i, m, im);
  }
}

void rk4_combine(std::size_t n, double s, ConstSplit k1, ConstSplit k2, ConstSplit k3,
                 ConstSplit k4, MutSplit y) {
  const __m512d vs = _mm512_set1_pd(s);
  const __m512d two = _mm512_set1_pd(2.0);
  auto lane = [&](const double* p1, const double* p2, const double* p3, const double* p4,
                  double* out, std::size_t i, __mmask8 m) {
    __m512d t = _mm512_add_pd(_mm512_maskz_loadu_pd(m, p2 + i), _mm512_maskz_loadu_pd(m, p3 + i));
    t = _mm512_fmadd_pd(two, t, _mm512_add_pd(_mm512_maskz_loadu_pd(m, p1 + i), _mm512_maskz_loadu_pd(m, p4 + i)));
    _mm512_mask_storeu_pd(out + i, m, _mm512_fmadd_pd(vs, t, _mm512_maskz_loadu_pd(m, out + i)));
  };
  for (std::size_t i = 0; i < n; i += 8) {
    const __mmask8 m = tail_mask(n - i);
    lane(k1.re, k2.re, k3.re, k4.re, y.re, i, m);
    lane(k1.im, k2.im, k3.im, k4.im, y.im, i, m);
  }
}

void cmul(std::size_t n, ConstSplit x, ConstSplit r, MutSplit y) {
  for (std::size_t i = 0; i < n; i += 8) {
    const __mmask8 m = tail_mask(n - i);
    const __m512d xr = _mm512_maskz_loadu_pd(m, x.re + i);
    const __m512d xi = _mm512_maskz_loadu_pd(m, x.im + i);
    const __m512d rr = _mm512_maskz_loadu_pd(m, r.re + i);
    const __m512d ri = _mm512_maskz_loadu_pd(m, r.im + i);
    _mm512_mask_storeu_pd(y.re + i, m, _mm512_fmsub_pd(xr, rr, _mm512_mul_pd(xi, ri)));
    _mm512_mask_storeu_pd(y.im + i, m, _mm512_fmadd_pd(xr, ri, _mm512_mul_pd(xi, rr)));
  }
}

void damped_drive(std::size_t n, double decay, double gain, ConstSplit y, ConstSplit w,
                  MutSplit out) {
  const __m512d nd = _mm512_set1_pd(-decay);
  const __m512d g = _mm512_set1_pd(gain);
  for (std::size_t i = 0; i < n; i += 8) {
    const __mmask8 m = tail_mask(n - i);
    const __m512d yr = _mm512_maskz_loadu_pd(m, y.re + i);
    const __m512d yi = _mm512_maskz_loadu_pd(m, y.im + i);
    const __m512d wr = _mm512_maskz_loadu_pd(m, w.re + i);
    const __m512d wi = _mm512_maskz_loadu_pd(m, w.im + i);
    _mm512_mask_storeu_pd(out.re + i, m, _mm512_fnmadd_pd(g, wi, _mm512_mul_pd(nd, yr)));
    _mm512_mask_storeu_pd(out.im + i, m, _mm512_fmadd_pd(g, wr, _mm512_mul_pd(nd, yi)));
  }
}

}  // namespace

const KernelTable kAvx512Kernels{Isa::kAvx512, cgemm, axpy, rk4_combine, cmul, damped_drive};

}  // namespace lossypdc::simd::detail
