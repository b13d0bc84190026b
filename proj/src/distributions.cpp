#include "hardnet/distributions.hpp"

#include <numbers>
#include <random>
#include <stdexcept>

namespace hardnet {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double CoordinateSpec::pdf(double x) const {
  switch (law) {
    case CoordinateLaw::kGaussian: {
      const double u = x / scale;
      return std::exp(-0.5 * u * u) / (scale * std::sqrt(2.0 * std::numbers::pi));
    }
    case CoordinateLaw::kUniform: return std::abs(x) <= scale ? 0.5 / scale : 0.0;
    case CoordinateLaw::kLaplace: return std::exp(-std::abs(x) / scale) / (2.0 * scale);
  }
  return 0.0;
}

double CoordinateSpec::cdf(double x) const {
  switch (law) {
    case CoordinateLaw::kGaussian: return standard_normal_cdf(x / scale);
    case CoordinateLaw::kUniform: return std::clamp((x + scale) / (2.0 * scale), 0.0, 1.0);
    case CoordinateLaw::kLaplace:
      return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
  }
  return 0.0;
}

double CoordinateSpec::sample_half(CounterRng& rng) const {
  switch (law) {
    case CoordinateLaw::kGaussian: return std::abs(std::normal_distribution<double>(0.0, scale)(rng));
    case CoordinateLaw::kUniform: return std::uniform_real_distribution<double>(0.0, scale)(rng);
    case CoordinateLaw::kLaplace: return std::exponential_distribution<double>(1.0 / scale)(rng);
  }
  return 0.0;
}

DistributionSpec DistributionSpec::gaussian() { return {DistributionKind::kGaussian, 1.0, {}}; }

DistributionSpec DistributionSpec::symmetric_uniform(double half_width) {
  if (!(half_width > 0)) throw std::invalid_argument("uniform half-width must be positive");
  return {DistributionKind::kSymmetricUniform, half_width, {}};
}

DistributionSpec DistributionSpec::custom_product(std::vector<CoordinateSpec> coords) {
  if (coords.empty()) throw std::invalid_argument("custom product needs at least one coordinate law");
  for (const auto& c : coords) {
    if (!(c.scale > 0)) throw std::invalid_argument("coordinate scale must be positive");
  }
  return {DistributionKind::kCustomProduct, 1.0, std::move(coords)};
}

CoordinateSpec DistributionSpec::coordinate(std::size_t j) const {
  switch (kind) {
    case DistributionKind::kGaussian: return {CoordinateLaw::kGaussian, scale};
    case DistributionKind::kSymmetricUniform: return {CoordinateLaw::kUniform, scale};
    case DistributionKind::kCustomProduct: return coordinates[j % coordinates.size()];
  }
  return {};
}

std::string DistributionSpec::name() const {
  switch (kind) {
    case DistributionKind::kGaussian: return "gaussian";
    case DistributionKind::kSymmetricUniform: return "uniform";
    case DistributionKind::kCustomProduct: return "custom";
  }
  return "unknown";
}

double DistributionSpec::interval_mass(std::size_t j, double width) const {
  const CoordinateSpec c = coordinate(j);
  double hi = width;
  if (c.law == CoordinateLaw::kUniform) hi = std::min(hi, c.scale);
  // symmetric density; integrate one side, where it is smooth
  return 2.0 * simpson([&](double x) { return c.pdf(x); }, 0.0, hi);
}

AnticoncentrationCertificate DistributionSpec::certify(std::size_t d) const {
  AnticoncentrationCertificate cert;
  if (d < 2) return cert;
  const double dd = static_cast<double>(d);
  const double width = 2.0 / (dd * dd);
  cert.a = 2.0 - std::log(4.0) / std::log(dd);
  cert.b = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d; ++j) cert.b = std::min(cert.b, -std::log(interval_mass(j, width)) / std::log(dd));
  return cert;
}

}  // namespace hardnet
