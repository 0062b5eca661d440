#include "kernel_tables.hpp"

namespace lossypdc::simd::detail {
namespace {

void cgemm(std::size_t rows, std::size_t inner, std::size_t cols, ConstSplit a,
           ConstSplit b, MutSplit c, bool accumulate) {
  if (!accumulate) {
    for (std::size_t k = 0; k < rows * cols; ++k) {
      c.re[k] = 0.0;
      c.im[k] = 0.0;
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    double* cr = c.re + i * cols;
    double* ci = c.im + i * cols;
    for (std::size_t l = 0; l < inner; ++l) {
      const double xr = a.re[i * inner + l];
      const double xi = a.im[i * inner + l];
      const double* br = b.re + l * cols;
      const double* bi = b.im + l * cols;
      for (std::size_t j = 0; j < cols; ++j) {
        cr[j] += xr * br[j] - xi * bi[j];
        ci[j] += xr * bi[j] + xi * br[j];
      }
    }
  }
}

void axpy(std::size_t n, double s, ConstSplit x, ConstSplit k, MutSplit y) {
  for (std::size_t i = 0; i < n; ++i) {
    y.re[i] = x.re[i] + s * k.re[i];
    y.im[i] = x.im[i] + s * k.im[i];
  }
}

void rk4_combine(std::size_t n, double s, ConstSplit k1, ConstSplit k2,
                 ConstSplit k3, ConstSplit k4, MutSplit y) {
  for (std::size_t i = 0; i < n; ++i) {
    y.re[i] += s * (k1.re[i] + 2.0 * k2.re[i] + 2.0 * k3.re[i] + k4.re[i]);
    y.im[i] += s * (k1.im[i] + 2.0 * k2.im[i] + 2.0 * k3.im[i] + k4.im[i]);
  }
}

void cmul(std::size_t n, ConstSplit x, ConstSplit r, MutSplit y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = x.re[i] * r.re[i] - x.im[i] * r.im[i];
    const double im = x.re[i] * r.im[i] + x.im[i] * r.re[i];
    y.re[i] = re;
    y.im[i] = im;
  }
}

void damped_drive(std::size_t n, double decay, double gain, ConstSplit y,
                  ConstSplit w, MutSplit out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = -decay * y.re[i] - gain * w.im[i];
    const double im = -decay * y.im[i] + gain * w.re[i];
    out.re[i] = re;
    out.im[i] = im;
  }
}

}  // namespace

const KernelTable kScalarKernels{Isa::kScalar, cgemm, axpy, rk4_combine, cmul,
                                 damped_drive};

}  // namespace lossypdc::simd::detail
