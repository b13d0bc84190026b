#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// Every AVX2 kernel is bit-identical to its scalar twin: the affine kernel
// vectorizes across output units and keeps the per-unit ascending-index
// multiply-then-add order, and the remaining kernels are exact (xor, min,
// elementwise products).

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace hardnet::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view name(Isa isa);

/// Best ISA supported by this CPU.
Isa detect();

/// ISA used by kernels(). Defaults to detect(); the HARDNET_SIMD=scalar
/// environment variable pins the scalar path.
Isa active();

/// Read-only view of one FLOAT64 affine layer. `weights` is row-major
/// rows x cols. `panel` holds the same entries regrouped in blocks of four
/// rows: panel[(b * cols + j) * 4 + k] == weights[(4b + k) * cols + j].
struct DenseLayerView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  const double* weights = nullptr;
  const double* panel = nullptr;
  const double* bias = nullptr;
  bool relu = false;
};

struct Kernels {
  Isa isa;
  /// out[i] = act(sum_j w[i][j] * in[j] (j ascending, starting from 0.0) + bias[i]).
  void (*affine)(const DenseLayerView& layer, const double* in, double* out);
  /// dst[i] ^= src[i].
  void (*xor_words)(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);
  /// min_i |x[i]|; +inf for n == 0.
  double (*min_abs)(const double* x, std::size_t n);
  /// out[i] = a[i] * b[i].
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
};

const Kernels& kernels();
const Kernels& kernels_for(Isa isa);

/// Builds the four-row panel layout for a row-major matrix.
void pack_panel(const double* weights, std::size_t rows, std::size_t cols, double* panel);
inline std::size_t panel_size(std::size_t rows, std::size_t cols) { return (rows / 4) * cols * 4; }

}  // namespace hardnet::simd
