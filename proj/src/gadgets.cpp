#include "hardnet/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hardnet {

GadgetParams GadgetParams::for_dimension(std::size_t d) {
  GadgetParams p;
  p.d = d;
  p.delta = Rational(1, static_cast<unsigned long>(d * d));
  p.n2_scale = 1;
  p.n3_W = static_cast<unsigned long>(2 * d + 1);
  return p;
}

void GadgetParams::validate() const {
  if (d == 0) throw std::invalid_argument("gadget dimension must be at least 1");
  if (sgn(delta) <= 0) throw std::invalid_argument("delta must be positive");
  if (n2_scale < 1) throw std::invalid_argument("N2 scale K must be at least 1");
  if (n3_W < 1) throw std::invalid_argument("N3 parameter W must be at least 1");
}

namespace {

std::vector<AffineLayer> two_layers(std::size_t in, std::size_t hidden, std::size_t out) {
  std::vector<AffineLayer> layers;
  layers.push_back({RationalMatrix(hidden, in), std::vector<Rational>(hidden), Activation::kRelu});
  layers.push_back({RationalMatrix(out, hidden), std::vector<Rational>(out), Activation::kLinear});
  return layers;
}

}  // namespace

ReluNetwork build_n1_vec(const GadgetParams& params) {
  params.validate();
  const std::size_t d = params.d;
  auto layers = two_layers(d, 2 * d, d);
  const Rational inv = 1 / params.delta;
  for (std::size_t j = 0; j < d; ++j) {
    layers[0].weights(2 * j, j) = 1;
    layers[0].bias[2 * j] = params.delta;
    layers[0].weights(2 * j + 1, j) = 1;
    layers[0].bias[2 * j + 1] = -params.delta;
    layers[1].weights(j, 2 * j) = inv;
    layers[1].weights(j, 2 * j + 1) = -inv;
    layers[1].bias[j] = -1;
  }
  return ReluNetwork::create(d, std::move(layers));
}

ReluNetwork build_n1(const GadgetParams& params) {
  GadgetParams one = params;
  one.d = 1;
  return build_n1_vec(one);
}

ReluNetwork build_n2(const GadgetParams& params) {
  params.validate();
  const std::size_t d = params.d;
  auto layers = two_layers(d, 3 * d, 1);
  const Rational c = params.n2_scale / params.delta;
  const Rational two_delta = 2 * params.delta;
  for (std::size_t j = 0; j < d; ++j) {
    layers[0].weights(3 * j, j) = 1;
    layers[0].bias[3 * j] = two_delta;
    layers[0].weights(3 * j + 1, j) = 1;
    layers[0].bias[3 * j + 1] = -two_delta;
    layers[0].weights(3 * j + 2, j) = 1;
    layers[1].weights(0, 3 * j) = c;
    layers[1].weights(0, 3 * j + 1) = c;
    layers[1].weights(0, 3 * j + 2) = -2 * c;
  }
  return ReluNetwork::create(d, std::move(layers));
}

Rational n2_value(const GadgetParams& params, std::span<const Rational> z) {
  Rational total = 0;
  for (const auto& v : z) total += relu(2 - abs(v) / params.delta);
  return params.n2_scale * total;
}

double n2_value(const GadgetParams& params, std::span<const double> z) {
  const double delta = to_double(params.delta);
  double total = 0.0;
  for (double v : z) total += std::max(0.0, 2.0 - std::abs(v) / delta);
  return to_double(params.n2_scale) * total;
}

ReluNetwork build_n3_indicator(const GadgetParams& params, long t_star) {
  params.validate();
  auto layers = two_layers(1, 2, 1);
  const Rational scale = params.n3_indicator_variant == IndicatorVariant::kUnitSlope ? Rational(1) : 1 / params.delta;
  layers[0].weights(0, 0) = -1;
  layers[0].bias[0] = t_star;
  layers[0].weights(1, 0) = -1;
  layers[0].bias[1] = t_star - 1;
  layers[1].weights(0, 0) = scale;
  layers[1].weights(0, 1) = -scale;
  return ReluNetwork::create(1, std::move(layers));
}

ReluNetwork build_n3(const GadgetParams& params, std::span<const long> T, long t_star) {
  params.validate();
  if (std::find(T.begin(), T.end(), t_star) == T.end()) {
    throw std::invalid_argument("t* = " + std::to_string(t_star) + " is not in T");
  }
  const Rational two_w = 2 * params.n3_W;
  const Rational scale = params.n3_indicator_variant == IndicatorVariant::kUnitSlope ? Rational(1) : 1 / params.delta;
  auto layers = two_layers(2, 4, 1);
  auto& h = layers[0];
  // inputs: column 0 is s, column 1 is t
  h.weights(0, 0) = -1;
  h.weights(0, 1) = -two_w;
  h.bias[0] = 1 + two_w * t_star;
  h.weights(1, 0) = -1;
  h.weights(1, 1) = -two_w;
  h.bias[1] = two_w * t_star;
  h.weights(2, 1) = -1;
  h.bias[2] = t_star;
  h.weights(3, 1) = -1;
  h.bias[3] = t_star - 1;
  auto& o = layers[1];
  o.weights(0, 0) = 1;
  o.weights(0, 1) = -1;
  o.weights(0, 2) = -scale;
  o.weights(0, 3) = scale;
  return ReluNetwork::create(2, std::move(layers));
}

ReluNetwork build_majority(std::size_t arity) {
  if (arity == 0 || arity % 2 == 0) {
    throw std::invalid_argument("majority arity must be odd, got " + std::to_string(arity));
  }
  auto layers = two_layers(arity, 2, 1);
  const Rational half(1, 2);
  for (std::size_t j = 0; j < arity; ++j) {
    layers[0].weights(0, j) = half;
    layers[0].weights(1, j) = half;
  }
  layers[0].bias[0] = half;
  layers[0].bias[1] = -half;
  layers[1].weights(0, 0) = 1;
  layers[1].weights(0, 1) = -1;
  return ReluNetwork::create(arity, std::move(layers));
}

}  // namespace hardnet
