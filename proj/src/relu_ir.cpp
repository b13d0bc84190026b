#include "hardnet/relu_ir.hpp"

#include <algorithm>

#include "compiled_network.hpp"

namespace hardnet {

NetworkError::NetworkError(const std::string& message, std::optional<std::size_t> layer)
    : std::invalid_argument(layer ? "layer " + std::to_string(*layer) + ": " + message : message),
      layer_(layer) {}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.rows()) throw NetworkError("matrix product shape mismatch");
  RationalMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Rational& aik = a(i, k);
      if (sgn(aik) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        if (sgn(b(k, j)) != 0) out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

std::vector<Rational> operator*(const RationalMatrix& a, std::span<const Rational> x) {
  if (a.cols() != x.size()) throw NetworkError("matrix-vector shape mismatch");
  std::vector<Rational> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (sgn(a(i, j)) != 0) out[i] += a(i, j) * x[j];
    }
  }
  return out;
}

// --- ReluNetwork -------------------------------------------------------------

struct ReluNetwork::State {
  std::size_t input_dim = 0;
  std::vector<AffineLayer> layers;
  NetworkMeta meta;
  detail::CompiledNetwork compiled;
};

namespace {

NetworkMeta compute_meta(const std::vector<AffineLayer>& layers) {
  NetworkMeta meta;
  for (const auto& layer : layers) {
    if (layer.activation == Activation::kRelu) {
      ++meta.hidden_layers;
      meta.unit_count += layer.output_width();
    }
    for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
      for (const auto& w : layer.weights.row(r)) {
        if (abs(w) > meta.weight_bound) meta.weight_bound = abs(w);
      }
    }
    for (const auto& b : layer.bias) {
      if (abs(b) > meta.weight_bound) meta.weight_bound = abs(b);
    }
  }
  return meta;
}

void validate_layers(std::size_t input_dim, const std::vector<AffineLayer>& layers) {
  if (input_dim == 0) throw NetworkError("input_dim must be positive");
  if (layers.empty()) throw NetworkError("a network needs at least one layer");
  std::size_t width = input_dim;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    if (layer.input_width() != width) {
      throw NetworkError("expected input width " + std::to_string(width) + ", got " +
                             std::to_string(layer.input_width()),
                         i);
    }
    if (layer.output_width() == 0) throw NetworkError("layer has no units", i);
    if (layer.bias.size() != layer.output_width()) {
      throw NetworkError("bias length " + std::to_string(layer.bias.size()) + " != row count " +
                             std::to_string(layer.output_width()),
                         i);
    }
    const bool last = i + 1 == layers.size();
    const Activation expected = last ? Activation::kLinear : Activation::kRelu;
    if (layer.activation != expected) {
      throw NetworkError(last ? "final layer must be linear" : "hidden layer must be relu", i);
    }
    width = layer.output_width();
  }
}

}  // namespace

ReluNetwork ReluNetwork::create(std::size_t input_dim, std::vector<AffineLayer> layers) {
  validate_layers(input_dim, layers);
  auto state = std::make_shared<State>();
  state->input_dim = input_dim;
  state->meta = compute_meta(layers);
  state->compiled = detail::compile_network(input_dim, layers);
  state->layers = std::move(layers);
  return ReluNetwork(std::move(state));
}

std::size_t ReluNetwork::input_dim() const { return state_->input_dim; }
std::size_t ReluNetwork::output_dim() const { return state_->layers.back().output_width(); }
const std::vector<AffineLayer>& ReluNetwork::layers() const { return state_->layers; }
const NetworkMeta& ReluNetwork::meta() const { return state_->meta; }
const detail::CompiledNetwork& ReluNetwork::compiled() const { return state_->compiled; }

bool ReluNetwork::operator==(const ReluNetwork& other) const {
  if (state_ == other.state_) return true;
  return input_dim() == other.input_dim() && layers() == other.layers();
}

// --- compilation ---------------------------------------------------------------

namespace detail {

namespace {

mpz_class lcm_of_denominators(std::span<const Rational> values, mpz_class start) {
  for (const auto& v : values) {
    if (v.get_den() != 1) mpz_lcm(start.get_mpz_t(), start.get_mpz_t(), v.get_den_mpz_t());
  }
  return start;
}

ExactLayer compile_exact(const AffineLayer& layer) {
  ExactLayer out;
  out.relu = layer.activation == Activation::kRelu;
  out.weight_den = 1;
  for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
    out.weight_den = lcm_of_denominators(layer.weights.row(r), out.weight_den);
  }
  out.bias_den = lcm_of_denominators(layer.bias, mpz_class(1));
  out.row_start.reserve(layer.weights.rows() + 1);
  out.row_start.push_back(0);
  for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
    const auto row = layer.weights.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (sgn(row[c]) == 0) continue;
      out.col.push_back(static_cast<std::uint32_t>(c));
      out.num.push_back(row[c].get_num() * (out.weight_den / row[c].get_den()));
    }
    out.row_start.push_back(static_cast<std::uint32_t>(out.col.size()));
  }
  out.bias_num.reserve(layer.bias.size());
  for (const auto& b : layer.bias) out.bias_num.push_back(b.get_num() * (out.bias_den / b.get_den()));
  return out;
}

DenseLayer compile_dense(const AffineLayer& layer) {
  DenseLayer out;
  out.rows = layer.output_width();
  out.cols = layer.input_width();
  out.relu = layer.activation == Activation::kRelu;
  out.weights.reserve(out.rows * out.cols);
  for (std::size_t r = 0; r < out.rows; ++r) {
    for (const auto& w : layer.weights.row(r)) out.weights.push_back(to_double(w));
  }
  out.bias = to_doubles(layer.bias);
  out.panel.resize(simd::panel_size(out.rows, out.cols));
  simd::pack_panel(out.weights.data(), out.rows, out.cols, out.panel.data());
  return out;
}

}  // namespace

CompiledNetwork compile_network(std::size_t input_dim, const std::vector<AffineLayer>& layers) {
  CompiledNetwork out;
  out.max_width = input_dim;
  for (const auto& layer : layers) {
    out.exact.push_back(compile_exact(layer));
    out.dense.push_back(compile_dense(layer));
    out.max_width = std::max(out.max_width, layer.output_width());
  }
  return out;
}

}  // namespace detail

// --- evaluation ------------------------------------------------------------------

namespace {

void check_input(const ReluNetwork& net, std::size_t got) {
  if (got != net.input_dim()) {
    throw NetworkError("expected input width " + std::to_string(net.input_dim()) + ", got " +
                           std::to_string(got),
                       0);
  }
}

}  // namespace

std::vector<Rational> eval_vec_exact(const ReluNetwork& net, std::span<const Rational> z) {
  check_input(net, z.size());
  // Values are carried as integer numerators over one shared denominator per
  // layer, which avoids a gcd per operation.
  mpz_class den = 1;
  for (const auto& v : z) {
    if (v.get_den() != 1) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
  }
  std::vector<mpz_class> cur(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) cur[j] = z[j].get_num() * (den / z[j].get_den());

  std::vector<mpz_class> next;
  mpz_class acc, prod_den, next_den, scale_w, scale_b;
  for (const auto& layer : net.compiled().exact) {
    const std::size_t rows = layer.bias_num.size();
    next.resize(rows);
    prod_den = layer.weight_den * den;
    mpz_lcm(next_den.get_mpz_t(), prod_den.get_mpz_t(), layer.bias_den.get_mpz_t());
    scale_w = next_den / prod_den;
    scale_b = next_den / layer.bias_den;
    const bool unit_w = scale_w == 1;
    for (std::size_t r = 0; r < rows; ++r) {
      acc = 0;
      for (std::uint32_t k = layer.row_start[r]; k < layer.row_start[r + 1]; ++k) {
        mpz_addmul(acc.get_mpz_t(), layer.num[k].get_mpz_t(), cur[layer.col[k]].get_mpz_t());
      }
      if (!unit_w) acc *= scale_w;
      mpz_addmul(acc.get_mpz_t(), layer.bias_num[r].get_mpz_t(), scale_b.get_mpz_t());
      if (layer.relu && sgn(acc) < 0) acc = 0;
      next[r].swap(acc);
    }
    cur.swap(next);
    den.swap(next_den);
    if (mpz_sizeinbase(den.get_mpz_t(), 2) > 512) {
      mpz_class g = den;
      for (const auto& v : cur) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
      if (g != 1) {
        den /= g;
        for (auto& v : cur) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
      }
    }
  }
  std::vector<Rational> out(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) {
    out[i] = Rational(cur[i], den);
    out[i].canonicalize();
  }
  return out;
}

Rational eval_exact(const ReluNetwork& net, std::span<const Rational> z) {
  if (net.output_dim() != 1) {
    throw NetworkError("scalar evaluation of a network with output width " + std::to_string(net.output_dim()));
  }
  return eval_vec_exact(net, z).front();
}

std::vector<Rational> eval_vec_reference(const ReluNetwork& net, std::span<const Rational> z) {
  check_input(net, z.size());
  std::vector<Rational> cur(z.begin(), z.end());
  for (const auto& layer : net.layers()) {
    std::vector<Rational> next = layer.weights * std::span<const Rational>(cur);
    for (std::size_t r = 0; r < next.size(); ++r) {
      next[r] += layer.bias[r];
      if (layer.activation == Activation::kRelu) next[r] = relu(next[r]);
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<double> eval_vec_f64(const ReluNetwork& net, std::span<const double> z) {
  check_input(net, z.size());
  const auto& compiled = net.compiled();
  const auto& kernels = simd::kernels();
  std::vector<double> a(compiled.max_width), b(compiled.max_width);
  std::copy(z.begin(), z.end(), a.begin());
  for (const auto& layer : compiled.dense) {
    kernels.affine(layer.view(), a.data(), b.data());
    a.swap(b);
  }
  a.resize(net.output_dim());
  return a;
}

double eval_f64(const ReluNetwork& net, std::span<const double> z) {
  if (net.output_dim() != 1) {
    throw NetworkError("scalar evaluation of a network with output width " + std::to_string(net.output_dim()));
  }
  return eval_vec_f64(net, z).front();
}

// --- construction -----------------------------------------------------------------

ReluNetwork affine_network(RationalMatrix weights, std::vector<Rational> bias) {
  const std::size_t input_dim = weights.cols();
  std::vector<AffineLayer> layers;
  layers.push_back({std::move(weights), std::move(bias), Activation::kLinear});
  return ReluNetwork::create(input_dim, std::move(layers));
}

ReluNetwork compose(const ReluNetwork& outer, const ReluNetwork& inner) {
  if (inner.output_dim() != outer.input_dim()) {
    throw NetworkError("compose: inner output width " + std::to_string(inner.output_dim()) +
                       " != outer input width " + std::to_string(outer.input_dim()));
  }
  const auto& in_layers = inner.layers();
  const auto& out_layers = outer.layers();
  std::vector<AffineLayer> layers(in_layers.begin(), in_layers.end() - 1);

  const AffineLayer& last = in_layers.back();
  const AffineLayer& first = out_layers.front();
  AffineLayer fused;
  fused.weights = first.weights * last.weights;
  fused.bias = first.weights * std::span<const Rational>(last.bias);
  for (std::size_t r = 0; r < fused.bias.size(); ++r) fused.bias[r] += first.bias[r];
  fused.activation = first.activation;
  layers.push_back(std::move(fused));

  layers.insert(layers.end(), out_layers.begin() + 1, out_layers.end());
  return ReluNetwork::create(inner.input_dim(), std::move(layers));
}

ReluNetwork identity_network(std::size_t width, std::size_t hidden) {
  if (hidden == 0) return affine_network(RationalMatrix::identity(width), std::vector<Rational>(width));
  std::vector<AffineLayer> layers;
  AffineLayer split{RationalMatrix(2 * width, width), std::vector<Rational>(2 * width), Activation::kRelu};
  for (std::size_t i = 0; i < width; ++i) {
    split.weights(i, i) = 1;
    split.weights(width + i, i) = -1;
  }
  layers.push_back(std::move(split));
  for (std::size_t h = 1; h < hidden; ++h) {
    AffineLayer carry{RationalMatrix(2 * width, 2 * width), std::vector<Rational>(2 * width), Activation::kRelu};
    for (std::size_t i = 0; i < width; ++i) {
      carry.weights(i, i) = 1;
      carry.weights(i, width + i) = -1;
      carry.weights(width + i, i) = -1;
      carry.weights(width + i, width + i) = 1;
    }
    layers.push_back(std::move(carry));
  }
  AffineLayer merge{RationalMatrix(width, 2 * width), std::vector<Rational>(width), Activation::kLinear};
  for (std::size_t i = 0; i < width; ++i) {
    merge.weights(i, i) = 1;
    merge.weights(i, width + i) = -1;
  }
  layers.push_back(std::move(merge));
  return ReluNetwork::create(width, std::move(layers));
}

ReluNetwork depth_pad(const ReluNetwork& net, std::size_t target_hidden) {
  if (target_hidden < net.hidden_layers()) {
    throw NetworkError("depth_pad: target " + std::to_string(target_hidden) + " below current depth " +
                       std::to_string(net.hidden_layers()));
  }
  if (target_hidden == net.hidden_layers()) return net;
  return compose(identity_network(net.output_dim(), target_hidden - net.hidden_layers()), net);
}

ReluNetwork parallel(std::span<const ReluNetwork> nets) {
  if (nets.empty()) throw NetworkError("parallel: no networks");
  const std::size_t input_dim = nets.front().input_dim();
  std::size_t depth = 0;
  for (const auto& n : nets) {
    if (n.input_dim() != input_dim) throw NetworkError("parallel: mismatched input_dim");
    depth = std::max(depth, n.hidden_layers());
  }
  std::vector<ReluNetwork> padded;
  padded.reserve(nets.size());
  for (const auto& n : nets) padded.push_back(depth_pad(n, depth));

  std::vector<AffineLayer> layers;
  for (std::size_t l = 0; l <= depth; ++l) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    for (const auto& n : padded) {
      rows += n.layers()[l].output_width();
      cols += n.layers()[l].input_width();
    }
    if (l == 0) cols = input_dim;
    AffineLayer layer{RationalMatrix(rows, cols), {}, l == depth ? Activation::kLinear : Activation::kRelu};
    layer.bias.reserve(rows);
    std::size_t row_off = 0;
    std::size_t col_off = 0;
    for (const auto& n : padded) {
      const AffineLayer& src = n.layers()[l];
      for (std::size_t r = 0; r < src.output_width(); ++r) {
        for (std::size_t c = 0; c < src.input_width(); ++c) {
          layer.weights(row_off + r, (l == 0 ? 0 : col_off) + c) = src.weights(r, c);
        }
      }
      layer.bias.insert(layer.bias.end(), src.bias.begin(), src.bias.end());
      row_off += src.output_width();
      col_off += src.input_width();
    }
    layers.push_back(std::move(layer));
  }
  return ReluNetwork::create(input_dim, std::move(layers));
}

ReluNetwork linear_combine(std::span<const WeightedNetwork> terms, const Rational& offset) {
  if (terms.empty()) throw NetworkError("linear_combine: empty term list");
  std::vector<ReluNetwork> nets;
  nets.reserve(terms.size());
  for (const auto& t : terms) {
    if (t.network.output_dim() != 1) throw NetworkError("linear_combine: terms must have scalar output");
    if (t.network.input_dim() != terms.front().network.input_dim()) {
      throw NetworkError("linear_combine: mismatched input_dim");
    }
    nets.push_back(t.network);
  }
  RationalMatrix coefficients(1, terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) coefficients(0, i) = terms[i].coefficient;
  return compose(affine_network(std::move(coefficients), {offset}), parallel(nets));
}

// --- piecewise linear --------------------------------------------------------------

void PwlFunction::validate() const {
  if (breakpoints.empty()) throw NetworkError("piecewise-linear function needs at least one breakpoint");
  if (breakpoints.size() != values.size()) throw NetworkError("breakpoint and value counts differ");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i - 1] < breakpoints[i])) throw NetworkError("breakpoints must be strictly increasing");
  }
}

Rational PwlFunction::operator()(const Rational& t) const {
  if (t <= breakpoints.front()) return values.front();
  if (t >= breakpoints.back()) return values.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), t) -
                                           breakpoints.begin());
  const std::size_t lo = hi - 1;
  const Rational frac = (t - breakpoints[lo]) / (breakpoints[hi] - breakpoints[lo]);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ReluNetwork compile_pwl(const PwlFunction& f) {
  f.validate();
  const std::size_t k = f.breakpoints.size();
  // f(t) = v_0 + sum_i c_i relu(t - b_i), where c_i is the slope change at b_i.
  std::vector<Rational> slope_change(k);
  Rational previous = 0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const Rational slope = (f.values[i + 1] - f.values[i]) / (f.breakpoints[i + 1] - f.breakpoints[i]);
    slope_change[i] = slope - previous;
    previous = slope;
  }
  slope_change[k - 1] = -previous;

  std::vector<std::size_t> units;
  for (std::size_t i = 0; i < k; ++i) {
    if (sgn(slope_change[i]) != 0) units.push_back(i);
  }
  if (units.empty()) units.push_back(0);  // constant function; keep one idle unit

  AffineLayer hidden{RationalMatrix(units.size(), 1), {}, Activation::kRelu};
  AffineLayer output{RationalMatrix(1, units.size()), {f.values.front()}, Activation::kLinear};
  for (std::size_t u = 0; u < units.size(); ++u) {
    hidden.weights(u, 0) = 1;
    hidden.bias.push_back(-f.breakpoints[units[u]]);
    output.weights(0, u) = slope_change[units[u]];
  }
  std::vector<AffineLayer> layers;
  layers.push_back(std::move(hidden));
  layers.push_back(std::move(output));
  return ReluNetwork::create(1, std::move(layers));
}

}  // namespace hardnet
