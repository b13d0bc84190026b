#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hardnet/lift.hpp"

namespace hardnet {

/// Linear system over GF(2), rows packed into 64-bit words.
class Gf2System {
 public:
  explicit Gf2System(std::size_t columns);

  void add_row(std::span<const std::uint8_t> bits, int rhs);
  std::size_t columns() const { return columns_; }
  std::size_t rows() const { return rhs_.size(); }
  bool bit(std::size_t row, std::size_t column) const;
  int rhs(std::size_t row) const { return rhs_[row]; }

 private:
  std::size_t columns_;
  std::size_t words_;
  std::vector<std::uint64_t> data_;
  std::vector<std::uint8_t> rhs_;
};

struct Gf2Solution {
  std::vector<std::uint8_t> x;  // free variables are 0
  std::size_t rank = 0;
  bool consistent = true;
};

Gf2Solution gf2_solve(const Gf2System& system);

/// Keeps examples with min_j |z_j| >= 2/d^2 and returns (sgn z, y~). Throws
/// std::runtime_error if a kept label is not 0 or 1.
std::vector<BooleanExample> filter_dataset(std::span<const RealExample> data, const GadgetParams& params,
                                           int threads = 1);

struct ParityAttackResult {
  std::vector<std::size_t> subset;  // 1-based
  int constant_bit = 0;
  std::size_t kept = 0;
  std::size_t rank = 0;
  bool underdetermined = false;
  /// z -> reference_eval of the recovered parity.
  std::function<double(std::span<const double>)> predictor;
};

/// Filters, encodes one equation per kept row (bits b_j = (1 - x_j)/2 plus an
/// affine column) and solves. Throws std::runtime_error on an inconsistent
/// system.
ParityAttackResult attack_lifted_parity(std::span<const RealExample> data, const GadgetParams& params,
                                        int threads = 1);

}  // namespace hardnet
