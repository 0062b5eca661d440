#pragma once

// Runtime-selected numeric kernels for the integrator hot loop.
//
// Every kernel has a scalar reference implementation; AVX2/FMA and AVX-512F
// variants are compiled in separate translation units with their own target
// flags and are only ever called after a CPUID check. Complex matrices are
// passed in split layout (separate real and imaginary planes, row-major), which
// keeps the vector code free of lane shuffles.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace lossypdc::simd {

enum class Isa { kScalar, kAvx2, kAvx512 };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

struct ConstSplit {
  const double* re;
  const double* im;
};

struct MutSplit {
  double* re;
  double* im;
};

struct KernelTable {
  Isa isa;

  // c[rows x cols] (+)= a[rows x inner] * b[inner x cols], all row-major and
  // densely packed (leading dimension == column count).
  void (*cgemm)(std::size_t rows, std::size_t inner, std::size_t cols,
                ConstSplit a, ConstSplit b, MutSplit c, bool accumulate);

  // y = x + s * k
  void (*axpy)(std::size_t n, double s, ConstSplit x, ConstSplit k, MutSplit y);

  // y += s * (k1 + 2 k2 + 2 k3 + k4)
  void (*rk4_combine)(std::size_t n, double s, ConstSplit k1, ConstSplit k2,
                      ConstSplit k3, ConstSplit k4, MutSplit y);

  // y = x * r, elementwise complex product. y may alias x.
  void (*cmul)(std::size_t n, ConstSplit x, ConstSplit r, MutSplit y);

  // out = -decay * y + i * gain * w
  void (*damped_drive)(std::size_t n, double decay, double gain, ConstSplit y,
                       ConstSplit w, MutSplit out);
};

bool supported(Isa isa);
Isa best_supported();
std::vector<Isa> supported_isas();

// Throws std::invalid_argument when the CPU lacks the instruction set.
const KernelTable& table(Isa isa);

// The process-wide kernel set. Defaults to best_supported(), or to the value
// of LOSSYPDC_ISA (scalar|avx2|avx512) when that variable is set.
const KernelTable& active();
void set_active(Isa isa);

}  // namespace lossypdc::simd
