#include <cstdlib>
#include <string>

#include "simd_internal.hpp"

namespace hardnet::simd {

namespace {

constexpr Kernels kScalarKernels{Isa::kScalar, detail::affine_scalar, detail::xor_words_scalar,
                                 detail::min_abs_scalar, detail::hadamard_scalar};

#if defined(HARDNET_HAVE_AVX2_KERNELS)
constexpr Kernels kAvx2Kernels{Isa::kAvx2, detail::affine_avx2, detail::xor_words_avx2,
                               detail::min_abs_avx2, detail::hadamard_avx2};
#endif

Isa select_active() {
  if (const char* forced = std::getenv("HARDNET_SIMD"); forced && std::string(forced) == "scalar") {
    return Isa::kScalar;
  }
  return detect();
}

}  // namespace

std::string_view name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

Isa detect() {
#if defined(HARDNET_HAVE_AVX2_KERNELS)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::kAvx2;
#endif
  return Isa::kScalar;
}

Isa active() {
  static const Isa isa = select_active();
  return isa;
}

const Kernels& kernels_for(Isa isa) {
#if defined(HARDNET_HAVE_AVX2_KERNELS)
  if (isa == Isa::kAvx2) return kAvx2Kernels;
#endif
  (void)isa;
  return kScalarKernels;
}

const Kernels& kernels() {
  static const Kernels& selected = kernels_for(active());
  return selected;
}

void pack_panel(const double* weights, std::size_t rows, std::size_t cols, double* panel) {
  const std::size_t blocks = rows / 4;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t k = 0; k < 4; ++k) {
        panel[(b * cols + j) * 4 + k] = weights[(b * 4 + k) * cols + j];
      }
    }
  }
}

}  // namespace hardnet::simd
