#include "hardnet/attacks.hpp"

#include <stdexcept>

#include "hardnet/parallel.hpp"
#include "hardnet/simd.hpp"

namespace hardnet {

Gf2System::Gf2System(std::size_t columns) : columns_(columns), words_(columns / 64 + 1) {}

void Gf2System::add_row(std::span<const std::uint8_t> bits, int rhs) {
  if (bits.size() != columns_) throw std::invalid_argument("GF(2) row has the wrong width");
  if (rhs != 0 && rhs != 1) throw std::invalid_argument("GF(2) right-hand side must be 0 or 1");
  const std::size_t base = data_.size();
  data_.resize(base + words_);
  for (std::size_t c = 0; c < columns_; ++c) {
    if (bits[c] > 1) throw std::invalid_argument("GF(2) entries must be 0 or 1");
    if (bits[c]) data_[base + c / 64] |= std::uint64_t{1} << (c % 64);
  }
  rhs_.push_back(static_cast<std::uint8_t>(rhs));
}

bool Gf2System::bit(std::size_t row, std::size_t column) const {
  return (data_[row * words_ + column / 64] >> (column % 64)) & 1;
}

Gf2Solution gf2_solve(const Gf2System& system) {
  const std::size_t cols = system.columns();
  const std::size_t words = cols / 64 + 1;  // the rhs sits at bit `cols`
  const std::size_t n = system.rows();
  std::vector<std::uint64_t> m(n * words);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c)
      if (system.bit(r, c)) m[r * words + c / 64] |= std::uint64_t{1} << (c % 64);
    if (system.rhs(r)) m[r * words + cols / 64] |= std::uint64_t{1} << (cols % 64);
  }
  auto at = [&](std::size_t r, std::size_t c) { return (m[r * words + c / 64] >> (c % 64)) & 1; };
  const auto& k = simd::kernels();

  Gf2Solution sol;
  sol.x.assign(cols, 0);
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < n; ++c) {
    std::size_t p = rank;
    while (p < n && !at(p, c)) ++p;
    if (p == n) continue;
    if (p != rank) std::swap_ranges(m.begin() + p * words, m.begin() + (p + 1) * words, m.begin() + rank * words);
    for (std::size_t r = 0; r < n; ++r) {
      if (r != rank && at(r, c)) k.xor_words(m.data() + r * words, m.data() + rank * words, words);
    }
    pivot_col.push_back(c);
    ++rank;
  }
  sol.rank = rank;
  for (std::size_t r = rank; r < n; ++r) {
    if (at(r, cols)) sol.consistent = false;
  }
  for (std::size_t r = 0; r < rank; ++r) sol.x[pivot_col[r]] = static_cast<std::uint8_t>(at(r, cols));
  return sol;
}

std::vector<BooleanExample> filter_dataset(std::span<const RealExample> data, const GadgetParams& params,
                                           int threads) {
  std::vector<std::uint8_t> keep(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) {
    const auto& ex = data[i];
    if (ex.z_exact.size() != params.d) throw std::invalid_argument("example has the wrong dimension");
    keep[i] = in_good_set(std::span<const Rational>(ex.z_exact), params);
  });
  std::vector<BooleanExample> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!keep[i]) continue;
    const auto& y = data[i].y_tilde;
    if (y != 0 && y != 1) {
      throw std::runtime_error("kept example " + std::to_string(i) + " has label " + to_string(y) +
                               " outside {0, 1}; the source is not a lifted parity");
    }
    out.push_back({sign_pattern(std::span<const Rational>(data[i].z_exact)), y});
  }
  return out;
}

ParityAttackResult attack_lifted_parity(std::span<const RealExample> data, const GadgetParams& params, int threads) {
  const auto clean = filter_dataset(data, params, threads);
  const std::size_t d = params.d;
  Gf2System system(d + 1);
  std::vector<std::uint8_t> row(d + 1);
  for (const auto& ex : clean) {
    for (std::size_t j = 0; j < d; ++j) row[j] = ex.x[j] < 0 ? 1 : 0;
    row[d] = 1;
    system.add_row(row, ex.y == 1 ? 1 : 0);
  }
  const auto sol = gf2_solve(system);
  if (!sol.consistent) throw std::runtime_error("parity constraints are inconsistent; the labels are not realizable");

  ParityAttackResult result;
  result.kept = clean.size();
  result.rank = sol.rank;
  result.underdetermined = sol.rank < d + 1;
  result.constant_bit = sol.x[d];
  for (std::size_t j = 0; j < d; ++j)
    if (sol.x[j]) result.subset.push_back(j + 1);

  std::function<double(std::span<const int>)> parity = [subset = result.subset,
                                                         c = result.constant_bit](std::span<const int> x) {
    int bit = c;
    for (auto j : subset) bit ^= x[j - 1] < 0 ? 1 : 0;
    return static_cast<double>(bit);
  };
  result.predictor = [parity, params](std::span<const double> z) { return reference_eval_f64(parity, params, z); };
  return result;
}

}  // namespace hardnet
