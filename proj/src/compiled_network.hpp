#pragma once

// Evaluation-ready forms of a network, built once at creation.

#include <cstdint>
#include <vector>

#include "hardnet/relu_ir.hpp"
#include "hardnet/simd.hpp"

namespace hardnet::detail {

/// Integer form of one layer: weights are num / weight_den and biases are
/// bias_num / bias_den with a shared denominator each. Rows are stored
/// sparsely (CSR) since most constructions are block-structured.
struct ExactLayer {
  std::vector<std::uint32_t> row_start;
  std::vector<std::uint32_t> col;
  std::vector<mpz_class> num;
  mpz_class weight_den;
  std::vector<mpz_class> bias_num;
  mpz_class bias_den;
  bool relu = false;
};

struct DenseLayer {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weights;
  std::vector<double> panel;
  std::vector<double> bias;
  bool relu = false;

  simd::DenseLayerView view() const {
    return {rows, cols, weights.data(), panel.data(), bias.data(), relu};
  }
};

struct CompiledNetwork {
  std::vector<ExactLayer> exact;
  std::vector<DenseLayer> dense;
  std::size_t max_width = 0;
};

CompiledNetwork compile_network(std::size_t input_dim, const std::vector<AffineLayer>& layers);

}  // namespace hardnet::detail
