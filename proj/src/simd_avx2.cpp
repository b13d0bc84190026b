#include "simd_internal.hpp"

#if defined(HARDNET_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <cmath>
#include <limits>

#define HARDNET_AVX2 __attribute__((target("avx2")))

namespace hardnet::simd::detail {

HARDNET_AVX2 void affine_avx2(const DenseLayerView& layer, const double* in, double* out) {
  const std::size_t blocks = layer.rows / 4;
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t b = 0; b < blocks; ++b) {
    const double* panel = layer.panel + b * layer.cols * 4;
    __m256d acc = zero;
    for (std::size_t j = 0; j < layer.cols; ++j) {
      const __m256d w = _mm256_loadu_pd(panel + j * 4);
      const __m256d x = _mm256_broadcast_sd(in + j);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(w, x));
    }
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(layer.bias + b * 4));
    // max_pd(a, 0) is a > 0 ? a : 0, matching the scalar select.
    if (layer.relu) acc = _mm256_max_pd(acc, zero);
    _mm256_storeu_pd(out + b * 4, acc);
  }
  for (std::size_t i = blocks * 4; i < layer.rows; ++i) {
    const double* row = layer.weights + i * layer.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < layer.cols; ++j) acc = acc + row[j] * in[j];
    acc = acc + layer.bias[i];
    out[i] = layer.relu ? (acc > 0.0 ? acc : 0.0) : acc;
  }
}

HARDNET_AVX2 void xor_words_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    auto* d = reinterpret_cast<__m256i*>(dst + i);
    const auto* s = reinterpret_cast<const __m256i*>(src + i);
    _mm256_storeu_si256(d, _mm256_xor_si256(_mm256_loadu_si256(d), _mm256_loadu_si256(s)));
  }
  for (; i < words; ++i) dst[i] ^= src[i];
}

HARDNET_AVX2 double min_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    best = _mm256_min_pd(best, _mm256_and_pd(_mm256_loadu_pd(x + i), sign_mask));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double result = lanes[0];
  for (int k = 1; k < 4; ++k) {
    if (lanes[k] < result) result = lanes[k];
  }
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a < result) result = a;
  }
  return result;
}

HARDNET_AVX2 void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace hardnet::simd::detail

#endif
