#include "hardnet/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace hardnet {

std::string to_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

namespace {

bool all_digits(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view num = text;
  std::string_view den = "1";
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  std::string_view digits = num;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (!all_digits(digits) || !all_digits(den)) {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  }
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational result(n, d);
  result.canonicalize();
  return result;
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value has no rational form");
  return Rational(value);
}

double to_double(const Rational& value) {
  if (mpz_sizeinbase(value.get_num_mpz_t(), 2) <= 53 && mpz_sizeinbase(value.get_den_mpz_t(), 2) <= 53) {
    return value.get_num().get_d() / value.get_den().get_d();
  }
  // mpq_get_d truncates; step to the neighbour when it is strictly closer.
  const double truncated = value.get_d();
  const double away = std::nextafter(truncated, sgn(value) >= 0 ? HUGE_VAL : -HUGE_VAL);
  if (!std::isfinite(away)) return truncated;
  const Rational err_t = abs(value - Rational(truncated));
  const Rational err_a = abs(value - Rational(away));
  return err_a < err_t ? away : truncated;
}

std::vector<Rational> to_rationals(std::span<const double> values) {
  std::vector<Rational> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(from_double(v));
  return out;
}

std::vector<Rational> to_rationals(std::span<const int> values) {
  std::vector<Rational> out;
  out.reserve(values.size());
  for (int v : values) out.emplace_back(v);
  return out;
}

std::vector<double> to_doubles(std::span<const Rational> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(to_double(v));
  return out;
}

}  // namespace hardnet
