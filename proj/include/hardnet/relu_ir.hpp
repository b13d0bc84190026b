#pragma once

// Layered affine + ReLU networks with exact rational weights.
//
// A network is a sequence of affine layers; every layer but the last applies
// a coordinatewise ReLU, the last is linear. The number of ReLU layers is the
// hidden-layer count, so an L-hidden-layer network has L nonlinear layers on
// every input-output path. Networks are immutable once created and cheap to
// copy (shared state), which makes them safe to share between threads.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardnet/rational.hpp"

namespace hardnet {

enum class Activation { kRelu, kLinear };

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const Rational> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const RationalMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
std::vector<Rational> operator*(const RationalMatrix& a, std::span<const Rational> x);

struct AffineLayer {
  RationalMatrix weights;  // rows = output units
  std::vector<Rational> bias;
  Activation activation = Activation::kRelu;

  std::size_t input_width() const { return weights.cols(); }
  std::size_t output_width() const { return weights.rows(); }
  bool operator==(const AffineLayer&) const = default;
};

struct NetworkMeta {
  std::size_t hidden_layers = 0;
  std::size_t unit_count = 0;  // total width of the ReLU layers
  Rational weight_bound;       // max |entry| over all weights and biases

  bool operator==(const NetworkMeta&) const = default;
};

/// Structural or dimensional failure. `layer_index()` names the offending
/// layer when there is one.
class NetworkError : public std::invalid_argument {
 public:
  explicit NetworkError(const std::string& message, std::optional<std::size_t> layer = std::nullopt);
  std::optional<std::size_t> layer_index() const { return layer_; }

 private:
  std::optional<std::size_t> layer_;
};

namespace detail {
struct CompiledNetwork;
}

class ReluNetwork {
 public:
  /// Validates shapes and activations and recomputes the metadata.
  static ReluNetwork create(std::size_t input_dim, std::vector<AffineLayer> layers);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  const std::vector<AffineLayer>& layers() const;
  const NetworkMeta& meta() const;
  std::size_t hidden_layers() const { return meta().hidden_layers; }

  /// Field-by-field equality of dimensions, weights, biases and activations.
  bool operator==(const ReluNetwork& other) const;

  const detail::CompiledNetwork& compiled() const;

 private:
  struct State;
  explicit ReluNetwork(std::shared_ptr<const State> state) : state_(std::move(state)) {}
  std::shared_ptr<const State> state_;
};

// --- evaluation ------------------------------------------------------------

/// Exact evaluation: rational affine maps and max(0, .) per hidden layer.
std::vector<Rational> eval_vec_exact(const ReluNetwork& net, std::span<const Rational> z);
/// Scalar-output convenience; throws NetworkError unless output_dim() == 1.
Rational eval_exact(const ReluNetwork& net, std::span<const Rational> z);

/// Straightforward rational evaluation, one canonicalized operation at a
/// time. Kept as the reference for the integer-numerator fast path above.
std::vector<Rational> eval_vec_reference(const ReluNetwork& net, std::span<const Rational> z);

/// binary64 evaluation; each unit sums w_j * z_j in ascending j, then adds
/// its bias, so results are reproducible bit for bit.
std::vector<double> eval_vec_f64(const ReluNetwork& net, std::span<const double> z);
double eval_f64(const ReluNetwork& net, std::span<const double> z);

// --- construction ----------------------------------------------------------

/// 0-hidden-layer network x -> W x + b.
ReluNetwork affine_network(RationalMatrix weights, std::vector<Rational> bias);

/// outer(inner(z)). The inner network's final linear layer is fused into the
/// outer network's first layer, so hidden layers add.
ReluNetwork compose(const ReluNetwork& outer, const ReluNetwork& inner);

/// Identity on R^width built from t = relu(t) - relu(-t), with exactly
/// `hidden` ReLU layers.
ReluNetwork identity_network(std::size_t width, std::size_t hidden);

/// Pointwise-equal network with exactly `target_hidden` hidden layers.
ReluNetwork depth_pad(const ReluNetwork& net, std::size_t target_hidden);

/// Runs the networks side by side on a shared input and concatenates their
/// outputs. Shallower networks are padded to the deepest one.
ReluNetwork parallel(std::span<const ReluNetwork> nets);

struct WeightedNetwork {
  Rational coefficient;
  ReluNetwork network;
};

/// offset + sum_i coefficient_i * net_i(z). All terms must share input_dim
/// and have scalar output; hidden layers of the result = max over terms.
ReluNetwork linear_combine(std::span<const WeightedNetwork> terms, const Rational& offset);

enum class Extrapolation { kConstant };

/// Piecewise-linear function given by its values at strictly increasing
/// breakpoints, held constant outside the breakpoint range.
struct PwlFunction {
  std::vector<Rational> breakpoints;
  std::vector<Rational> values;
  Extrapolation extrapolation = Extrapolation::kConstant;

  void validate() const;
  Rational operator()(const Rational& t) const;
};

/// One-hidden-layer scalar network equal to `f` everywhere, with at most one
/// unit per breakpoint.
ReluNetwork compile_pwl(const PwlFunction& f);

}  // namespace hardnet
