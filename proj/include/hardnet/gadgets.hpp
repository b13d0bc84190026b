#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hardnet/relu_ir.hpp"

namespace hardnet {

enum class IndicatorVariant { kUnitSlope, kOneOverDelta };

struct GadgetParams {
  std::size_t d = 1;
  Rational delta;     // sign-ramp half-width, 1/d^2 by default
  Rational n2_scale;  // K
  Rational n3_W;
  IndicatorVariant n3_indicator_variant = IndicatorVariant::kUnitSlope;

  /// delta = 1/d^2, K = 1, W = 2d + 1.
  static GadgetParams for_dimension(std::size_t d);
  void validate() const;
};

/// Sign with sgn(0) = +1.
inline int sign_of(const Rational& t) { return sgn(t) >= 0 ? 1 : -1; }
inline int sign_of(double t) { return t >= 0.0 ? 1 : -1; }

/// (1/delta)(relu(t + delta) - relu(t - delta)) - 1; equals sgn(t) once |t| >= delta.
ReluNetwork build_n1(const GadgetParams& params);
/// N1 applied to each of the d coordinates (block-diagonal).
ReluNetwork build_n1_vec(const GadgetParams& params);

/// K * sum_j (1/delta)(relu(z_j + 2delta) + relu(z_j - 2delta) - 2 relu(z_j)).
ReluNetwork build_n2(const GadgetParams& params);
/// Closed form of build_n2: K * sum_j max(0, 2 - |z_j| / delta).
Rational n2_value(const GadgetParams& params, std::span<const Rational> z);
double n2_value(const GadgetParams& params, std::span<const double> z);

/// Inputs (s, t). relu(1 - s + 2W(t* - t)) - relu(-s + 2W(t* - t)) - ind(t),
/// where ind is the indicator subnetwork below.
ReluNetwork build_n3(const GadgetParams& params, std::span<const long> T, long t_star);
/// The 1[t < t*] subnetwork on its own: relu(t* - t) - relu(t* - 1 - t),
/// scaled by 1/delta under kOneOverDelta.
ReluNetwork build_n3_indicator(const GadgetParams& params, long t_star);

/// relu((s+1)/2) - relu((s-1)/2) on s = sum of the +-1 inputs; equals 1[s > 0]
/// for odd arity.
ReluNetwork build_majority(std::size_t arity);

}  // namespace hardnet
