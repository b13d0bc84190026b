#include <cmath>
#include <limits>

#include "simd_internal.hpp"

namespace hardnet::simd::detail {

void affine_scalar(const DenseLayerView& layer, const double* in, double* out) {
  for (std::size_t i = 0; i < layer.rows; ++i) {
    const double* row = layer.weights + i * layer.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < layer.cols; ++j) acc = acc + row[j] * in[j];
    acc = acc + layer.bias[i];
    out[i] = layer.relu ? (acc > 0.0 ? acc : 0.0) : acc;
  }
}

void xor_words_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) dst[i] ^= src[i];
}

double min_abs_scalar(const double* x, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a < best) best = a;
  }
  return best;
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace hardnet::simd::detail
