#include "hardnet/families.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <stdexcept>

#include "hardnet/gadgets.hpp"
#include "hardnet/parallel.hpp"
#include "hardnet/rng.hpp"

namespace hardnet {

std::string_view family_kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kParity: return "parity";
    case FamilyKind::kLwr: return "lwr";
    case FamilyKind::kKeyedToy: return "keyed_toy";
  }
  return "unknown";
}

const Rational& CompressibleFn::sigma_at(long t) const {
  const auto it = std::lower_bound(range_T.begin(), range_T.end(), t);
  if (it == range_T.end() || *it != t) throw std::domain_error("h(x) = " + std::to_string(t) + " is outside T");
  return sigma[static_cast<std::size_t>(it - range_T.begin())];
}

PwlFunction CompressibleFn::sigma_pwl() const {
  PwlFunction f;
  for (long t : range_T) f.breakpoints.emplace_back(t);
  f.values = sigma;
  return f;
}

void ParitySpec::validate() const {
  if (d == 0) throw std::invalid_argument("parity dimension must be positive");
  for (std::size_t j : subset) {
    if (j < 1 || j > d) throw std::invalid_argument("parity subset index " + std::to_string(j) + " outside 1.." + std::to_string(d));
  }
  auto sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("parity subset has repeated indices");
  }
}

namespace {

bool is_power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

std::vector<long> integer_range(long lo, long hi) {
  std::vector<long> out;
  for (long t = lo; t <= hi; ++t) out.push_back(t);
  return out;
}

std::vector<Rational> binary_alphabet() { return {Rational(0), Rational(1)}; }

}  // namespace

std::size_t LwrInstance::log_q() const {
  std::size_t bits = 0;
  while ((1L << bits) < q) ++bits;
  return bits;
}

void LwrInstance::validate() const {
  if (n == 0) throw std::invalid_argument("LWR n must be positive");
  if (p < 2 || p >= q) throw std::invalid_argument("LWR moduli need 2 <= p < q");
  if (!is_power_of_two(q)) throw std::invalid_argument("LWR q must be a power of two");
  if (q % p != 0) throw std::invalid_argument("LWR p must divide q");
  if (w.size() != n) throw std::invalid_argument("LWR secret must have n entries");
  for (long wi : w) {
    if (wi < 0 || wi >= q) throw std::invalid_argument("LWR secret entries must lie in 0..q-1");
  }
}

CompressibleFn build_parity(const ParitySpec& spec) {
  spec.validate();
  RationalMatrix weights(1, spec.d);
  for (std::size_t j : spec.subset) weights(0, j - 1) = ratio(-1, 2);
  const auto size = static_cast<long>(spec.subset.size());
  CompressibleFn cf{affine_network(std::move(weights), {ratio(size, 2)}), integer_range(0, size), {},
                    DomainConvention::kPmOne, Rational(size), binary_alphabet(), FamilyKind::kParity};
  for (long t : cf.range_T) cf.sigma.emplace_back(t % 2);
  return cf;
}

long lwr_round(long t, long p, long q) {
  if (q < 1 || p < 1) throw std::invalid_argument("moduli must be positive");
  const long r = ((t % q) + q) % q;
  // floor(p r / q + 1/2) == floor((2 p r + q) / (2 q))
  return ((2 * p * r + q) / (2 * q)) % p;
}

Rational lwr_sigma(long t, long p, long q) { return ratio(lwr_round(t, p, q), p); }

std::vector<long> lwr_rounding_histogram(long p, long q) {
  std::vector<long> counts(static_cast<std::size_t>(p));
  for (long t = 0; t < q; ++t) ++counts[static_cast<std::size_t>(lwr_round(t, p, q))];
  return counts;
}

CompressibleFn build_lwr(const LwrInstance& inst) {
  inst.validate();
  const std::size_t lq = inst.log_q();
  RationalMatrix weights(1, inst.binary_dim());
  for (std::size_t i = 0; i < inst.n; ++i) {
    for (std::size_t j = 0; j < lq; ++j) weights(0, i * lq + j) = inst.w[i] * (1L << j);
  }
  const long top = static_cast<long>(inst.n) * (inst.q - 1) * (inst.q - 1);
  CompressibleFn cf{affine_network(std::move(weights), {0}), integer_range(0, top), {},
                    DomainConvention::kZeroOne, Rational(top), {}, FamilyKind::kLwr};
  for (long t : cf.range_T) cf.sigma.push_back(lwr_sigma(t, inst.p, inst.q));
  for (long v = 0; v < inst.p; ++v) cf.label_alphabet.push_back(ratio(v, inst.p));
  return cf;
}

std::vector<int> encode_zq(std::span<const long> x, long q) {
  if (!is_power_of_two(q) || q < 2) throw std::invalid_argument("encode_zq needs q a power of two");
  std::size_t lq = 0;
  while ((1L << lq) < q) ++lq;
  std::vector<int> bits;
  bits.reserve(x.size() * lq);
  for (long v : x) {
    if (v < 0 || v >= q) throw std::invalid_argument("encode_zq entry " + std::to_string(v) + " outside Z_q");
    for (std::size_t j = 0; j < lq; ++j) bits.push_back(static_cast<int>((v >> j) & 1));
  }
  return bits;
}

std::vector<long> decode_zq(std::span<const int> bits, long q) {
  if (!is_power_of_two(q) || q < 2) throw std::invalid_argument("decode_zq needs q a power of two");
  std::size_t lq = 0;
  while ((1L << lq) < q) ++lq;
  if (bits.size() % lq != 0) throw std::invalid_argument("decode_zq bit count is not a multiple of log2(q)");
  std::vector<long> out;
  for (std::size_t i = 0; i < bits.size(); i += lq) {
    long v = 0;
    for (std::size_t j = 0; j < lq; ++j) {
      if (bits[i + j] != 0 && bits[i + j] != 1) throw std::invalid_argument("decode_zq expects bits");
      v |= static_cast<long>(bits[i + j]) << j;
    }
    out.push_back(v);
  }
  return out;
}

CompressibleFn build_keyed_toy(std::uint64_t key, std::size_t d, std::size_t depth_budget) {
  if (depth_budget < 1) throw std::invalid_argument("keyed toy needs depth budget >= 1");
  if (d < 3) throw std::invalid_argument("keyed toy needs d >= 3");
  CounterRng rng(key, Stream::kKeyedToy, 0);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<std::size_t> coord(0, d - 1);

  if (depth_budget == 1) {
    RationalMatrix weights(1, d);
    Rational bias = 0;
    long size = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (!coin(rng)) continue;
      const int s = coin(rng) ? 1 : -1;
      weights(0, j) = ratio(-s, 2);
      bias += ratio(1, 2);
      ++size;
    }
    if (size == 0) {
      weights(0, coord(rng)) = ratio(-1, 2);
      bias = ratio(1, 2);
      size = 1;
    }
    CompressibleFn cf{affine_network(std::move(weights), {bias}), integer_range(0, size), {},
                      DomainConvention::kPmOne, Rational(size), binary_alphabet(), FamilyKind::kKeyedToy};
    for (long t = 0; t <= size; ++t) cf.sigma.emplace_back(coin(rng) ? 1 : 0);
    return cf;
  }

  std::vector<WeightedNetwork> gates;
  for (int g = 0; g < 3; ++g) {
    std::vector<std::size_t> chosen;
    while (chosen.size() < 3) {
      const std::size_t c = coord(rng);
      if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) chosen.push_back(c);
    }
    RationalMatrix select(3, d);
    for (std::size_t k = 0; k < 3; ++k) select(k, chosen[k]) = coin(rng) ? 1 : -1;
    gates.push_back({1, compose(build_majority(3), affine_network(std::move(select), std::vector<Rational>(3)))});
  }
  const int shift = coin(rng) ? 1 : 0;
  CompressibleFn cf{linear_combine(gates, 0), integer_range(0, 3), {}, DomainConvention::kPmOne, Rational(3),
                    binary_alphabet(), FamilyKind::kKeyedToy};
  for (long t = 0; t <= 3; ++t) cf.sigma.emplace_back((t + shift) % 2);
  return cf;
}

long eval_inner(const CompressibleFn& cf, std::span<const int> x) {
  if (x.size() != cf.dim()) throw std::invalid_argument("corner has the wrong dimension");
  for (int v : x) {
    const bool ok = cf.domain_convention == DomainConvention::kPmOne ? (v == 1 || v == -1) : (v == 0 || v == 1);
    if (!ok) throw std::invalid_argument("corner entry " + std::to_string(v) + " does not match the domain convention");
  }
  const Rational h = eval_exact(cf.inner_h, to_rationals(x));
  if (!is_integer(h) || !h.get_num().fits_slong_p()) throw std::domain_error("h(x) is not a machine integer");
  return h.get_num().get_si();
}

Rational eval_family(const CompressibleFn& cf, std::span<const int> x) { return cf.sigma_at(eval_inner(cf, x)); }

ReluNetwork to_network(const CompressibleFn& cf) { return compose(compile_pwl(cf.sigma_pwl()), cf.inner_h); }

CompressibleFn to_pm_one(const CompressibleFn& cf) {
  if (cf.domain_convention == DomainConvention::kPmOne) return cf;
  const std::size_t d = cf.dim();
  RationalMatrix flip(d, d);
  for (std::size_t j = 0; j < d; ++j) flip(j, j) = ratio(-1, 2);
  CompressibleFn out = cf;
  out.inner_h = compose(cf.inner_h, affine_network(std::move(flip), std::vector<Rational>(d, ratio(1, 2))));
  out.domain_convention = DomainConvention::kPmOne;
  return out;
}

std::vector<int> pm_to_bits(std::span<const int> x) {
  std::vector<int> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (1 - x[j]) / 2;
  return out;
}

std::vector<int> bits_to_pm(std::span<const int> bits) {
  std::vector<int> out(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) out[j] = 1 - 2 * bits[j];
  return out;
}

std::vector<int> random_corner(std::size_t d, DomainConvention convention, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, Stream::kDataset, index);
  std::vector<int> x(d);
  std::uint64_t word = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (j % 64 == 0) word = rng();
    const int bit = static_cast<int>((word >> (j % 64)) & 1);
    x[j] = convention == DomainConvention::kZeroOne ? bit : 1 - 2 * bit;
  }
  return x;
}

RangeCertificate certify_range(const CompressibleFn& cf, std::uint64_t samples, std::uint64_t seed) {
  RangeCertificate cert;
  auto check = [&](std::span<const int> x) {
    ++cert.checked;
    const Rational h = eval_exact(cf.inner_h, to_rationals(x));
    const bool in_T = is_integer(h) && h.get_num().fits_slong_p() &&
                      std::binary_search(cf.range_T.begin(), cf.range_T.end(), h.get_num().get_si());
    if (!in_T || abs(h) > cf.h_bound) ++cert.violations;
  };
  if (cf.dim() <= 20) {
    cert.exhaustive = true;
    for_each_corner(cf.dim(), cf.domain_convention, check);
  } else {
    for (std::uint64_t i = 0; i < samples; ++i) check(random_corner(cf.dim(), cf.domain_convention, seed, i));
  }
  return cert;
}

std::vector<BooleanExample> sample_dataset(const CompressibleFn& cf, std::size_t count, LabelMode mode,
                                           std::uint64_t seed, int threads) {
  if (mode == LabelMode::kRandom && cf.label_alphabet.empty()) throw std::invalid_argument("family has no label alphabet");
  std::vector<BooleanExample> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    auto x = random_corner(cf.dim(), cf.domain_convention, seed, i);
    Rational y;
    if (mode == LabelMode::kRealizable) {
      y = eval_family(cf, x);
    } else {
      CounterRng rng(seed, Stream::kDataset, i);
      rng();  // the first word belongs to the corner
      std::uniform_int_distribution<std::size_t> pick(0, cf.label_alphabet.size() - 1);
      y = cf.label_alphabet[pick(rng)];
    }
    out[i] = {std::move(x), std::move(y)};
  });
  return out;
}

void write_dataset_jsonl(std::ostream& out, std::span<const BooleanExample> data) {
  for (const auto& ex : data) {
    nlohmann::ordered_json rec;
    rec["x"] = ex.x;
    rec["y_exact"] = to_string(ex.y);
    rec["y_float"] = to_double(ex.y);
    out << rec.dump() << '\n';
  }
}

CompressibleFn FamilySpec::build() const {
  switch (kind) {
    case FamilyKind::kParity: return build_parity(parity);
    case FamilyKind::kLwr: return build_lwr(lwr);
    case FamilyKind::kKeyedToy: return build_keyed_toy(toy_key, toy_d, toy_depth);
  }
  throw std::logic_error("unknown family kind");
}

nlohmann::ordered_json FamilySpec::to_json() const {
  nlohmann::ordered_json doc;
  doc["kind"] = family_kind_name(kind);
  switch (kind) {
    case FamilyKind::kParity:
      doc["d"] = parity.d;
      doc["subset"] = parity.subset;
      break;
    case FamilyKind::kLwr:
      doc["n"] = lwr.n;
      doc["q"] = lwr.q;
      doc["p"] = lwr.p;
      doc["w"] = lwr.w;
      break;
    case FamilyKind::kKeyedToy:
      doc["d"] = toy_d;
      doc["key"] = toy_key;
      doc["depth"] = toy_depth;
      break;
  }
  return doc;
}

namespace {

template <class T>
T field(const nlohmann::json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw std::invalid_argument(std::string("family spec is missing '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("family spec field '") + key + "' has the wrong type");
  }
}

}  // namespace

FamilySpec FamilySpec::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("family spec must be a JSON object");
  FamilySpec spec;
  const auto kind = field<std::string>(doc, "kind");
  if (kind == "parity") {
    spec.kind = FamilyKind::kParity;
    spec.parity.d = field<std::size_t>(doc, "d");
    spec.parity.subset = field<std::vector<std::size_t>>(doc, "subset");
    spec.parity.validate();
  } else if (kind == "lwr") {
    spec.kind = FamilyKind::kLwr;
    spec.lwr.n = field<std::size_t>(doc, "n");
    spec.lwr.q = field<long>(doc, "q");
    spec.lwr.p = field<long>(doc, "p");
    spec.lwr.w = field<std::vector<long>>(doc, "w");
    spec.lwr.validate();
  } else if (kind == "keyed_toy") {
    spec.kind = FamilyKind::kKeyedToy;
    spec.toy_d = field<std::size_t>(doc, "d");
    spec.toy_key = field<std::uint64_t>(doc, "key");
    spec.toy_depth = doc.contains("depth") ? field<std::size_t>(doc, "depth") : 1;
  } else {
    throw std::invalid_argument("unknown family kind '" + kind + "'");
  }
  return spec;
}

}  // namespace hardnet
