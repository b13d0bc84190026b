#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hardnet {

/// Exact rational number. Network weights, labels and every identity check
/// are carried in this type; binary64 is only ever a derived view.
using Rational = mpq_class;

/// Canonical "numerator/denominator" text. The denominator is always
/// printed, so 3 becomes "3/1".
std::string to_string(const Rational& value);

/// Parses "num/den" or a bare integer "num". Throws std::invalid_argument on
/// anything else, including a zero denominator.
Rational parse_rational(std::string_view text);

/// Exact conversion; every finite double is a dyadic rational.
Rational from_double(double value);

/// Nearest binary64 to `value`.
double to_double(const Rational& value);

/// num/den in lowest terms. (mpq_class's two-argument constructor does not
/// canonicalize.)
inline Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational relu(const Rational& value) { return sgn(value) > 0 ? value : Rational(0); }

inline bool is_integer(const Rational& value) { return value.get_den() == 1; }

std::vector<Rational> to_rationals(std::span<const double> values);
std::vector<Rational> to_rationals(std::span<const int> values);
std::vector<double> to_doubles(std::span<const Rational> values);

}  // namespace hardnet
