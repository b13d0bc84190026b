#include "hardnet/sq.hpp"

#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

#include "hardnet/parallel.hpp"
#include "hardnet/report.hpp"

namespace hardnet {

namespace {
std::atomic<std::uint64_t> g_clamps{0};
}

double clamp_query(double value) {
  if (std::isnan(value)) throw std::domain_error("query returned NaN");
  if (value >= -1.0 && value <= 1.0) return value;
  if (g_clamps.fetch_add(1) == 0) std::cerr << "warning: query value " << value << " clamped to [-1, 1]\n";
  return value > 1.0 ? 1.0 : -1.0;
}

std::uint64_t clamp_count() { return g_clamps.load(); }

void ExactDoubleSum::add(double x) {
  if (!std::isfinite(x)) throw std::domain_error("exact summation of a non-finite value");
  std::size_t kept = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[kept++] = lo;
    x = hi;
  }
  partials_.resize(kept);
  partials_.push_back(x);
}

Rational ExactDoubleSum::value() const {
  Rational total = 0;
  for (double p : partials_) total += from_double(p);
  return total;
}

Rational exact_expectation(const CornerQuery& phi, const CornerFn& f, std::size_t d) {
  if (d > 20) throw std::invalid_argument("exact expectation enumerates 2^d corners; d must be <= 20");
  ExactDoubleSum sum;
  for_each_corner(d, DomainConvention::kPmOne, [&](std::span<const int> x) { sum.add(clamp_query(phi.eval(x, f(x)))); });
  return sum.value() / Rational(mpz_class(1) << static_cast<mp_bitcnt_t>(d));
}

ExactBooleanOracle::ExactBooleanOracle(const CornerFn& f, std::size_t d) : d_(d) {
  if (d > 20) throw std::invalid_argument("exact oracle enumerates 2^d corners; d must be <= 20");
  for_each_corner(d, DomainConvention::kPmOne, [&](std::span<const int> x) {
    corners_.insert(corners_.end(), x.begin(), x.end());
    labels_.push_back(f(x));
  });
}

Rational ExactBooleanOracle::exact_answer(const CornerQuery& phi) {
  ++queries_;
  ExactDoubleSum sum;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    sum.add(clamp_query(phi.eval(std::span<const int>(corners_.data() + i * d_, d_), labels_[i])));
  }
  return sum.value() / Rational(static_cast<unsigned long>(labels_.size()));
}

double ExactBooleanOracle::answer(const CornerQuery& phi, double) { return to_double(exact_answer(phi)); }

double hoeffding_half_width(std::uint64_t samples, double alpha) {
  return std::sqrt(2.0 * std::log(2.0 / alpha) / static_cast<double>(samples));
}

double MonteCarloBooleanOracle::half_width(double alpha) const { return hoeffding_half_width(samples_, alpha); }

double MonteCarloBooleanOracle::answer(const CornerQuery& phi, double) {
  const std::uint64_t query = queries_++;
  double sum = 0;
  std::vector<int> x(d_);
  for (std::uint64_t i = 0; i < samples_; ++i) {
    CounterRng rng(seed_, Stream::kMonteCarlo, (query << 32) | i);
    std::uint64_t word = 0;
    for (std::size_t j = 0; j < d_; ++j) {
      if (j % 64 == 0) word = rng();
      x[j] = (word >> (j % 64)) & 1 ? -1 : 1;
    }
    sum += clamp_query(phi.eval(x, f_(x)));
  }
  return sum / static_cast<double>(samples_);
}

MonteCarloEstimate monte_carlo_real(const RealQuery& psi, const std::function<double(std::span<const int>)>& f,
                                    const GadgetParams& params, const DistributionSpec& dist, std::uint64_t samples,
                                    std::uint64_t seed, double alpha, int threads) {
  std::vector<double> values(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    CounterRng rng(seed, Stream::kMonteCarlo, i);
    std::vector<double> z(params.d);
    for (std::size_t j = 0; j < params.d; ++j) {
      const double mag = dist.coordinate(j).sample_half(rng);
      z[j] = (rng() >> 63) ? -mag : mag;
    }
    const double y = reference_eval_f64(f, params, z);
    values[i] = clamp_query(psi.eval(z, from_double(y)));
  });
  MonteCarloEstimate est;
  double sum = 0;
  for (double v : values) sum += v;
  est.samples = samples;
  est.mean = samples ? sum / static_cast<double>(samples) : 0.0;
  est.half_width = hoeffding_half_width(samples, alpha);
  return est;
}

SimulatorConfig SimulatorConfig::for_tolerance(double tau, double delta, std::uint64_t query_budget) {
  if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("tolerance must lie in (0, 1]");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("confidence delta must lie in (0, 1)");
  if (query_budget == 0) throw std::invalid_argument("query budget must be positive");
  SimulatorConfig c;
  c.delta = delta;
  c.query_budget = query_budget;
  c.batch_m = static_cast<std::uint64_t>(
      std::ceil(8.0 / (tau * tau) * std::log(2.0 * static_cast<double>(query_budget) / delta)));
  return c;
}

SqSimulator::SqSimulator(BooleanSqOracle& oracle, GadgetParams params, const DistributionSpec& dist,
                         SimulatorConfig config, std::uint64_t seed)
    : oracle_(oracle), params_(std::move(params)), config_(config) {
  if (config_.batch_m == 0) throw std::invalid_argument("simulator batch must be positive");
  batch_.reserve(config_.batch_m);
  n2_.reserve(config_.batch_m);
  for (std::uint64_t i = 0; i < config_.batch_m; ++i) {
    batch_.push_back(draw_half_sample(params_.d, dist, Stream::kSimulate, seed, i));
    n2_.push_back(n2_value(params_, to_rationals(batch_.back())));
  }
}

CornerQuery SqSimulator::corner_query(const RealQuery& psi, std::size_t i) const {
  const std::vector<double>* g = &batch_[i];
  const Rational* n2 = &n2_[i];
  const bool untouched = sgn(*n2) == 0;
  return {[psi, g, n2, untouched](std::span<const int> x, const Rational& y) {
    thread_local std::vector<double> z;
    z.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (*g)[j] * x[j];
    if (untouched) return psi.eval(z, y);
    static const Rational zero = 0;
    if (y <= *n2) return psi.eval(z, zero);
    return psi.eval(z, Rational(y - *n2));
  }};
}

double SqSimulator::simulate(const RealQuery& psi, double tau) {
  double sum = 0;
  for (std::size_t i = 0; i < batch_.size(); ++i) sum += oracle_.answer(corner_query(psi, i), tau / 2);
  return sum / static_cast<double>(batch_.size());
}

// --- ensembles ---------------------------------------------------------------------

void FamilyEnsemble::validate() const {
  if (labels.empty()) throw std::invalid_argument("ensemble has no keys");
  if (alphabet.empty() || alphabet.size() > 255) throw std::invalid_argument("ensemble alphabet size out of range");
  for (const auto& row : labels) {
    if (row.size() != domain_size) throw std::invalid_argument("ensemble rows must cover the whole domain");
    for (auto v : row) {
      if (v >= alphabet.size()) throw std::invalid_argument("ensemble label outside the alphabet");
    }
  }
}

FamilyEnsemble lwr_ensemble(long n, long q, long p) {
  if (n < 1 || q < 2 || p < 2 || p > 255) throw std::invalid_argument("LWR ensemble needs n >= 1, q >= 2, 2 <= p <= 255");
  std::size_t size = 1;
  for (long i = 0; i < n; ++i) {
    size *= static_cast<std::size_t>(q);
    if (size > 65536) throw std::invalid_argument("LWR ensemble domain q^n too large");
  }
  auto digits = [&](std::size_t index) {
    std::vector<long> v(static_cast<std::size_t>(n));
    for (auto& d : v) {
      d = static_cast<long>(index % static_cast<std::size_t>(q));
      index /= static_cast<std::size_t>(q);
    }
    return v;
  };
  FamilyEnsemble e;
  e.name = "lwr(n=" + std::to_string(n) + ",q=" + std::to_string(q) + ",p=" + std::to_string(p) + ")";
  e.domain_size = size;
  for (long v = 0; v < p; ++v) e.alphabet.push_back(ratio(v, p));
  e.lwr_n = n;
  e.lwr_q = q;
  e.labels.assign(size, std::vector<std::uint8_t>(size));
  for (std::size_t k = 0; k < size; ++k) {
    const auto w = digits(k);
    for (std::size_t xi = 0; xi < size; ++xi) {
      const auto x = digits(xi);
      long dot = 0;
      for (long i = 0; i < n; ++i) dot += w[i] * x[i];
      e.labels[k][xi] = static_cast<std::uint8_t>(lwr_round(dot, p, q));
    }
  }
  return e;
}

FamilyEnsemble all_functions_ensemble(std::size_t bits) {
  if (bits > 4) throw std::invalid_argument("all-functions ensemble needs bits <= 4");
  FamilyEnsemble e;
  e.name = "all_functions(bits=" + std::to_string(bits) + ")";
  e.domain_size = std::size_t{1} << bits;
  e.alphabet = {Rational(0), Rational(1)};
  const std::size_t keys = std::size_t{1} << e.domain_size;
  e.labels.assign(keys, std::vector<std::uint8_t>(e.domain_size));
  for (std::size_t k = 0; k < keys; ++k)
    for (std::size_t x = 0; x < e.domain_size; ++x) e.labels[k][x] = static_cast<std::uint8_t>((k >> x) & 1);
  return e;
}

PairwiseReport pairwise_check(const FamilyEnsemble& e, int threads) {
  e.validate();
  const std::size_t X = e.domain_size, C = e.keys(), Y = e.alphabet.size();
  if (static_cast<double>(X) * static_cast<double>(X) * static_cast<double>(C) > 1e8) {
    throw std::invalid_argument("pairwise check exceeds the 1e8 work budget");
  }
  std::vector<std::uint64_t> bad(X);
  std::vector<std::uint8_t> nonuniform(X);
  parallel_for(X, threads, [&](std::size_t x) {
    std::vector<std::uint64_t> hist(Y * Y);
    for (std::size_t x2 = 0; x2 < X; ++x2) {
      std::fill(hist.begin(), hist.end(), 0);
      for (std::size_t k = 0; k < C; ++k) ++hist[e.labels[k][x] * Y + e.labels[k][x2]];
      for (auto h : hist) {
        if (h * Y * Y != C) {
          ++bad[x];
          break;
        }
      }
    }
    std::vector<std::uint64_t> marg(Y);
    for (std::size_t k = 0; k < C; ++k) ++marg[e.labels[k][x]];
    const bool constant = std::count(marg.begin(), marg.end(), 0u) == static_cast<long>(Y) - 1;
    if (!constant) {
      for (auto m : marg) {
        if (m * Y != C) {
          nonuniform[x] = 1;
          break;
        }
      }
    }
  });
  PairwiseReport r;
  r.pairs = X * X;
  for (auto b : bad) r.bad_pairs += b;
  for (auto n : nonuniform) r.nonuniform_inputs += n;
  r.eta_actual = Rational(static_cast<unsigned long>(r.bad_pairs)) / Rational(static_cast<unsigned long>(r.pairs));
  r.marginal_uniform = r.nonuniform_inputs == 0;
  if (e.lwr_n && e.lwr_q) {
    mpz_class power;
    mpz_ui_pow_ui(power.get_mpz_t(), static_cast<unsigned long>(*e.lwr_q), static_cast<unsigned long>(*e.lwr_n - 1));
    r.eta_bound = Rational(2) / Rational(power);
  }
  return r;
}

std::vector<Rational> per_key_expectations(const FamilyEnsemble& e, const QueryTable& phi, int threads) {
  if (phi.size() != e.domain_size) throw std::invalid_argument("query table must cover the domain");
  for (const auto& row : phi) {
    if (row.size() != e.alphabet.size()) throw std::invalid_argument("query table rows must cover the alphabet");
    for (const auto& v : row) {
      if (abs(v) > 1) throw std::invalid_argument("query table entries must lie in [-1, 1]");
    }
  }
  std::vector<Rational> out(e.keys());
  const Rational size(static_cast<unsigned long>(e.domain_size));
  parallel_for(e.keys(), threads, [&](std::size_t k) {
    Rational sum = 0;
    for (std::size_t x = 0; x < e.domain_size; ++x) sum += phi[x][e.labels[k][x]];
    out[k] = sum / size;
  });
  return out;
}

VarianceReport variance_check(const FamilyEnsemble& e, const QueryTable& phi, const Rational& eta_actual,
                              int threads) {
  const auto means = per_key_expectations(e, phi, threads);
  const Rational count(static_cast<unsigned long>(means.size()));
  Rational mean = 0;
  for (const auto& m : means) mean += m;
  mean /= count;
  Rational var = 0;
  for (const auto& m : means) var += (m - mean) * (m - mean);
  return {var / count, 2 * eta_actual};
}

QueryTable random_query_table(const FamilyEnsemble& e, std::uint64_t seed, std::uint64_t index, long den) {
  CounterRng rng(seed, Stream::kGame, index);
  std::uniform_int_distribution<long> pick(-den, den);
  QueryTable t(e.domain_size, std::vector<Rational>(e.alphabet.size()));
  for (auto& row : t)
    for (auto& v : row) v = ratio(pick(rng), den);
  return t;
}

// --- game ---------------------------------------------------------------------------

AdversarialGame::AdversarialGame(const FamilyEnsemble& ensemble, Rational eta_actual, Rational tau, int threads)
    : ensemble_(ensemble), eta_(std::move(eta_actual)), threads_(threads) {
  ensemble_.validate();
  if (sgn(tau) <= 0 || tau > 1) throw std::invalid_argument("tolerance must lie in (0, 1]");
  state_.surviving.assign(ensemble_.keys(), true);
  state_.tau = std::move(tau);
  state_.ruled_out_fraction = 0;
}

GameStep AdversarialGame::respond(const QueryTable& phi) {
  const auto means = per_key_expectations(ensemble_, phi, threads_);
  const Rational keys(static_cast<unsigned long>(means.size()));
  GameStep step;
  for (const auto& m : means) step.answer += m;
  step.answer /= keys;
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (abs(means[k] - step.answer) > state_.tau) {
      ++step.far_keys;
      if (state_.surviving[k]) {
        state_.surviving[k] = false;
        ++step.newly_ruled_out;
      }
    }
  }
  ++state_.queries_made;
  const auto alive = static_cast<unsigned long>(std::count(state_.surviving.begin(), state_.surviving.end(), true));
  state_.ruled_out_fraction = 1 - Rational(alive) / keys;
  step.per_query_fraction = Rational(static_cast<unsigned long>(step.far_keys)) / keys;
  step.per_query_bound = 2 * eta_ / (state_.tau * state_.tau);
  step.cumulative_fraction = state_.ruled_out_fraction;
  step.cumulative_bound = Rational(static_cast<unsigned long>(state_.queries_made)) * step.per_query_bound;
  step.per_query_ok = step.per_query_fraction <= step.per_query_bound;
  step.cumulative_ok = step.cumulative_fraction <= step.cumulative_bound;
  return step;
}

std::string_view strategy_name(GameStrategy s) {
  switch (s) {
    case GameStrategy::kRandomTables: return "random_tables";
    case GameStrategy::kKeyProbe: return "key_probe";
    case GameStrategy::kScripted: return "scripted";
  }
  return "unknown";
}

nlohmann::ordered_json GameTranscript::to_json() const {
  nlohmann::ordered_json doc;
  doc["keys"] = keys;
  put_rational(doc, "tau", tau);
  put_rational(doc, "eta_actual", eta_actual);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    nlohmann::ordered_json row;
    row["query"] = query_names[i];
    put_rational(row, "answer", s.answer);
    row["far_keys"] = s.far_keys;
    row["newly_ruled_out"] = s.newly_ruled_out;
    row["surviving"] = surviving_curve[i];
    put_rational(row, "per_query_fraction", s.per_query_fraction);
    put_rational(row, "per_query_bound", s.per_query_bound);
    put_rational(row, "cumulative_fraction", s.cumulative_fraction);
    put_rational(row, "cumulative_bound", s.cumulative_bound);
    row["per_query_ok"] = s.per_query_ok;
    row["cumulative_ok"] = s.cumulative_ok;
    rows.push_back(std::move(row));
  }
  doc["transcript"] = std::move(rows);
  put_rational(doc, "final_surviving_fraction", final_surviving_fraction);
  doc["all_ok"] = all_ok;
  return doc;
}

GameTranscript run_game(const FamilyEnsemble& e, GameStrategy strategy, std::uint64_t queries, const Rational& tau,
                        std::uint64_t seed, int threads) {
  const auto pairwise = pairwise_check(e, threads);
  AdversarialGame game(e, pairwise.eta_actual, tau, threads);
  GameTranscript t;
  t.eta_actual = pairwise.eta_actual;
  t.tau = tau;
  t.keys = e.keys();
  for (std::uint64_t qi = 0; qi < queries; ++qi) {
    CounterRng rng(seed, Stream::kGame, ~qi);
    GameStrategy kind = strategy;
    int scripted_kind = 0;
    if (strategy == GameStrategy::kScripted) {
      scripted_kind = static_cast<int>(qi % 3);
      kind = scripted_kind == 0 ? GameStrategy::kKeyProbe : GameStrategy::kRandomTables;
    }
    QueryTable phi;
    std::string name;
    if (strategy == GameStrategy::kScripted && scripted_kind == 1) {
      const std::size_t x0 = rng() % e.domain_size;
      const std::size_t y0 = rng() % e.alphabet.size();
      phi.assign(e.domain_size, std::vector<Rational>(e.alphabet.size()));
      phi[x0][y0] = 1;
      name = "input_probe:x=" + std::to_string(x0) + ",y=" + std::to_string(y0);
    } else if (kind == GameStrategy::kKeyProbe) {
      const std::size_t key = rng() % e.keys();
      phi.assign(e.domain_size, std::vector<Rational>(e.alphabet.size(), -1));
      for (std::size_t x = 0; x < e.domain_size; ++x) phi[x][e.labels[key][x]] = 1;
      name = "key_probe:k=" + std::to_string(key);
    } else {
      phi = random_query_table(e, seed, qi);
      name = "random_table:" + std::to_string(qi);
    }
    const auto step = game.respond(phi);
    t.all_ok = t.all_ok && step.per_query_ok && step.cumulative_ok;
    t.query_names.push_back(std::move(name));
    t.steps.push_back(step);
    t.surviving_curve.push_back(
        static_cast<std::uint64_t>(std::count(game.state().surviving.begin(), game.state().surviving.end(), true)));
  }
  t.final_surviving_fraction = 1 - game.state().ruled_out_fraction;
  return t;
}

}  // namespace hardnet
