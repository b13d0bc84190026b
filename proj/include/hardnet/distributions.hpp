#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hardnet/rational.hpp"
#include "hardnet/rng.hpp"

namespace hardnet {

enum class CoordinateLaw { kGaussian, kUniform, kLaplace };

/// One symmetric coordinate law. `scale` is the standard deviation
/// (Gaussian), the half-width (uniform) or the rate inverse b (Laplace).
struct CoordinateSpec {
  CoordinateLaw law = CoordinateLaw::kGaussian;
  double scale = 1.0;

  double pdf(double x) const;
  double cdf(double x) const;
  /// A draw of |X|.
  double sample_half(CounterRng& rng) const;
};

enum class DistributionKind { kGaussian, kSymmetricUniform, kCustomProduct };

/// Interval of width >= d^-a around the median holding mass <= d^-b.
struct AnticoncentrationCertificate {
  double a = 0;
  double b = 0;
  bool valid() const { return b > 1.0; }
};

struct DistributionSpec {
  DistributionKind kind = DistributionKind::kGaussian;
  double scale = 1.0;
  std::vector<CoordinateSpec> coordinates;  // used by kCustomProduct

  static DistributionSpec gaussian();
  static DistributionSpec symmetric_uniform(double half_width = 1.0);
  static DistributionSpec custom_product(std::vector<CoordinateSpec> coords);

  CoordinateSpec coordinate(std::size_t j) const;
  std::string name() const;

  /// Mass of (-width, width) under coordinate j, by composite Simpson
  /// integration of the density (absolute error far below 1e-6).
  double interval_mass(std::size_t j, double width) const;

  /// Certificate for the interval (-2/d^2, 2/d^2): a = 2 - log_d(4), b is the
  /// largest exponent with mass <= d^-b over all coordinates.
  AnticoncentrationCertificate certify(std::size_t d) const;
};

/// Composite Simpson rule with `panels` (even) subintervals.
template <class Fn>
double simpson(Fn&& f, double lo, double hi, int panels = 2000) {
  const double h = (hi - lo) / panels;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf);

double standard_normal_cdf(double x);

}  // namespace hardnet

#include <algorithm>
#include <cmath>

template <class Cdf>
double hardnet::ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max({worst, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return worst;
}
