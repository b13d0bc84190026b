#pragma once

#include "hardnet/simd.hpp"

namespace hardnet::simd::detail {

void affine_scalar(const DenseLayerView& layer, const double* in, double* out);
void xor_words_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);
double min_abs_scalar(const double* x, std::size_t n);
void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n);

#if defined(__x86_64__) || defined(__i386__)
#define HARDNET_HAVE_AVX2_KERNELS 1
void affine_avx2(const DenseLayerView& layer, const double* in, double* out);
void xor_words_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);
double min_abs_avx2(const double* x, std::size_t n);
void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n);
#endif

}  // namespace hardnet::simd::detail
