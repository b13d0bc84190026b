#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardnet/relu_ir.hpp"

namespace hardnet {

enum class DomainConvention { kPmOne, kZeroOne };
enum class FamilyKind { kParity, kLwr, kKeyedToy };

std::string_view family_kind_name(FamilyKind kind);

/// f = sigma(h(x)) with h integer-valued on the cube and sigma a table on T.
struct CompressibleFn {
  ReluNetwork inner_h;
  std::vector<long> range_T;        // sorted ascending
  std::vector<Rational> sigma;      // sigma[i] is the value at range_T[i]
  DomainConvention domain_convention = DomainConvention::kPmOne;
  Rational h_bound;                 // |h(x)| <= h_bound on every corner
  std::vector<Rational> label_alphabet;
  FamilyKind kind = FamilyKind::kParity;

  std::size_t dim() const { return inner_h.input_dim(); }
  std::size_t hidden_layers() const { return inner_h.hidden_layers() + 1; }
  /// Throws std::domain_error when t is not in range_T.
  const Rational& sigma_at(long t) const;
  PwlFunction sigma_pwl() const;
};

struct ParitySpec {
  std::size_t d = 0;
  std::vector<std::size_t> subset;  // 1-based coordinates

  void validate() const;
};

struct LwrInstance {
  std::size_t n = 0;
  long p = 2;
  long q = 4;
  std::vector<long> w;

  std::size_t log_q() const;
  std::size_t binary_dim() const { return n * log_q(); }
  void validate() const;
};

CompressibleFn build_parity(const ParitySpec& spec);
CompressibleFn build_lwr(const LwrInstance& inst);

/// Round-half-up of (p/q)(t mod q), reduced mod p. Any q >= 1 is accepted.
long lwr_round(long t, long p, long q);
Rational lwr_sigma(long t, long p, long q);

/// Counts of lwr_round(t) over t in Z_q, indexed by residue mod p.
std::vector<long> lwr_rounding_histogram(long p, long q);

/// Little-endian bits of each entry; q must be a power of two.
std::vector<int> encode_zq(std::span<const long> x, long q);
std::vector<long> decode_zq(std::span<const int> bits, long q);

/// Toy keyed family; NOT pseudorandom. Budget 1 is a key-chosen signed parity
/// with a key-chosen sigma table. Budget >= 2 sums three key-chosen majority
/// gates (with key-chosen input signs) and takes the parity of the count
/// shifted by a key bit. Requires d >= 3.
CompressibleFn build_keyed_toy(std::uint64_t key, std::size_t d, std::size_t depth_budget);

/// f(x) = sigma(h(x)). `x` is a corner in the family's own convention.
Rational eval_family(const CompressibleFn& cf, std::span<const int> x);
/// h(x), checked to be an integer in range_T.
long eval_inner(const CompressibleFn& cf, std::span<const int> x);

/// compose(compile_pwl(sigma), h).
ReluNetwork to_network(const CompressibleFn& cf);

/// Re-expresses a {0,1}-domain family on {-1,1} via x -> (1 - x)/2; a
/// {-1,1} family is returned unchanged.
CompressibleFn to_pm_one(const CompressibleFn& cf);

/// Bit vector of a +-1 corner: b_j = (1 - x_j)/2.
std::vector<int> pm_to_bits(std::span<const int> x);
std::vector<int> bits_to_pm(std::span<const int> bits);

/// Visits every corner of the family's cube in lexicographic bit order.
/// `fn` receives the corner in the family convention.
template <class Fn>
void for_each_corner(std::size_t d, DomainConvention convention, Fn&& fn) {
  std::vector<int> x(d);
  const std::uint64_t total = std::uint64_t{1} << d;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t j = 0; j < d; ++j) {
      const int bit = static_cast<int>((mask >> j) & 1);
      x[j] = convention == DomainConvention::kZeroOne ? bit : 1 - 2 * bit;
    }
    fn(std::span<const int>(x));
  }
}

struct RangeCertificate {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  bool exhaustive = false;
};

/// h(x) in range_T and |h(x)| <= h_bound: every corner when d <= 20,
/// otherwise `samples` seeded random corners.
RangeCertificate certify_range(const CompressibleFn& cf, std::uint64_t samples, std::uint64_t seed);

struct BooleanExample {
  std::vector<int> x;
  Rational y;
};

enum class LabelMode { kRealizable, kRandom };

/// Example i draws its corner (and, in random mode, its label from the
/// family's label alphabet) from the (seed, dataset, i) stream.
std::vector<BooleanExample> sample_dataset(const CompressibleFn& cf, std::size_t count, LabelMode mode,
                                           std::uint64_t seed, int threads = 1);
std::vector<int> random_corner(std::size_t d, DomainConvention convention, std::uint64_t seed, std::uint64_t index);

void write_dataset_jsonl(std::ostream& out, std::span<const BooleanExample> data);

/// Family spec document: {"kind": "parity", "d": .., "subset": [..]},
/// {"kind": "lwr", "n": .., "q": .., "p": .., "w": [..]} or
/// {"kind": "keyed_toy", "d": .., "key": .., "depth": ..}.
struct FamilySpec {
  FamilyKind kind = FamilyKind::kParity;
  ParitySpec parity;
  LwrInstance lwr;
  std::size_t toy_d = 8;
  std::uint64_t toy_key = 0;
  std::size_t toy_depth = 1;

  CompressibleFn build() const;
  nlohmann::ordered_json to_json() const;
  static FamilySpec from_json(const nlohmann::json& doc);
};

}  // namespace hardnet
