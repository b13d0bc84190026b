#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "hardnet/simd.hpp"

namespace hardnet::simd {
namespace {

std::vector<Isa> available() {
  std::vector<Isa> out{Isa::kScalar};
  if (detect() == Isa::kAvx2) out.push_back(Isa::kAvx2);
  return out;
}

bool bits_equal(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

TEST(Simd, KernelTableMatchesRequest) {
  for (Isa isa : available()) EXPECT_EQ(kernels_for(isa).isa, isa);
  EXPECT_EQ(name(Isa::kScalar), "scalar");
}

TEST(Simd, PanelLayout) {
  const std::size_t rows = 9, cols = 3;
  std::vector<double> w(rows * cols);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(i);
  std::vector<double> panel(panel_size(rows, cols));
  pack_panel(w.data(), rows, cols, panel.data());
  ASSERT_EQ(panel.size(), 2u * cols * 4);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(panel[(b * cols + j) * 4 + k], w[(4 * b + k) * cols + j]);
}

TEST(Simd, AffineBitIdenticalAcrossIsas) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (std::size_t rows : {1u, 3u, 4u, 5u, 8u, 17u, 40u}) {
    for (std::size_t cols : {1u, 2u, 7u, 33u}) {
      for (bool relu : {false, true}) {
        std::vector<double> w(rows * cols), bias(rows), in(cols);
        for (auto& v : w) v = u(gen);
        for (auto& v : bias) v = u(gen);
        for (auto& v : in) v = u(gen) * 1e-3;
        std::vector<double> panel(panel_size(rows, cols));
        pack_panel(w.data(), rows, cols, panel.data());
        const DenseLayerView view{rows, cols, w.data(), panel.data(), bias.data(), relu};
        std::vector<double> expect(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          double acc = 0.0;
          for (std::size_t c = 0; c < cols; ++c) acc += w[r * cols + c] * in[c];
          acc += bias[r];
          expect[r] = relu ? (acc > 0 ? acc : 0.0) : acc;
        }
        for (Isa isa : available()) {
          std::vector<double> out(rows, -1.0);
          kernels_for(isa).affine(view, in.data(), out.data());
          for (std::size_t r = 0; r < rows; ++r) EXPECT_TRUE(bits_equal(out[r], expect[r])) << name(isa) << " row " << r;
        }
      }
    }
  }
}

TEST(Simd, XorMinAbsHadamard) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01;
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 16u, 31u, 100u}) {
    std::vector<std::uint64_t> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = gen();
      b[i] = gen();
    }
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = n01(gen);
      y[i] = n01(gen);
    }
    double ref_min = std::numeric_limits<double>::infinity();
    for (double v : x) ref_min = std::min(ref_min, std::abs(v));
    for (Isa isa : available()) {
      const auto& k = kernels_for(isa);
      auto dst = a;
      k.xor_words(dst.data(), b.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(dst[i], a[i] ^ b[i]);
      EXPECT_TRUE(bits_equal(k.min_abs(x.data(), n), ref_min)) << name(isa) << " n=" << n;
      std::vector<double> prod(n);
      k.hadamard(x.data(), y.data(), prod.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_TRUE(bits_equal(prod[i], x[i] * y[i]));
    }
  }
}

TEST(Simd, MinAbsHandlesSignedZero) {
  const double x[] = {3.0, -0.0, -2.0, 5.0, 0.5};
  for (Isa isa : available()) EXPECT_EQ(kernels_for(isa).min_abs(x, 5), 0.0);
}

}  // namespace
}  // namespace hardnet::simd
