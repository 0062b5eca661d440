#pragma once

#include "lossypdc/simd/dispatch.hpp"

namespace lossypdc::simd::detail {

extern const KernelTable kScalarKernels;
extern const KernelTable kAvx2Kernels;
extern const KernelTable kAvx512Kernels;

}  // namespace lossypdc::simd::detail
