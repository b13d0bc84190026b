#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardnet/lift.hpp"

namespace hardnet {

// --- queries ------------------------------------------------------------------

/// phi(x, y) on the Boolean cube.
struct CornerQuery {
  std::function<double(std::span<const int>, const Rational&)> eval;
};

/// psi(z, y~) on real inputs.
struct RealQuery {
  std::function<double(std::span<const double>, const Rational&)> eval;
};

/// Clamps to [-1, 1]; the first clamp per process prints a warning to stderr.
double clamp_query(double value);
std::uint64_t clamp_count();

/// Exact sum of binary64 values (running non-overlapping partials).
class ExactDoubleSum {
 public:
  void add(double v);
  Rational value() const;

 private:
  std::vector<double> partials_;
};

/// Average of phi(x, f(x)) over all 2^d corners, exactly. d <= 20.
Rational exact_expectation(const CornerQuery& phi, const CornerFn& f, std::size_t d);

// --- oracles ------------------------------------------------------------------

class BooleanSqOracle {
 public:
  virtual ~BooleanSqOracle() = default;
  /// Any value within `tau` of E[phi(x, f(x))].
  virtual double answer(const CornerQuery& phi, double tau) = 0;
  std::uint64_t queries() const { return queries_; }

 protected:
  std::uint64_t queries_ = 0;
};

/// Honest oracle with no error. The labels of all corners are tabulated once.
class ExactBooleanOracle final : public BooleanSqOracle {
 public:
  ExactBooleanOracle(const CornerFn& f, std::size_t d);
  double answer(const CornerQuery& phi, double tau) override;
  Rational exact_answer(const CornerQuery& phi);

 private:
  std::size_t d_;
  std::vector<int> corners_;  // 2^d rows of d entries
  std::vector<Rational> labels_;
};

/// Seeded empirical mean over `samples` uniform corners per query.
class MonteCarloBooleanOracle final : public BooleanSqOracle {
 public:
  MonteCarloBooleanOracle(CornerFn f, std::size_t d, std::uint64_t samples, std::uint64_t seed)
      : f_(std::move(f)), d_(d), samples_(samples), seed_(seed) {}
  double answer(const CornerQuery& phi, double tau) override;
  /// Hoeffding half-width for [-1,1] averages: sqrt(2 ln(2/alpha) / n).
  double half_width(double alpha) const;

 private:
  CornerFn f_;
  std::size_t d_;
  std::uint64_t samples_;
  std::uint64_t seed_;
};

double hoeffding_half_width(std::uint64_t samples, double alpha);

struct MonteCarloEstimate {
  double mean = 0;
  double half_width = 0;  // at confidence 1 - alpha
  std::uint64_t samples = 0;
};

/// Direct estimate of E[psi(z, f_lift(z))] with z drawn from `dist`.
MonteCarloEstimate monte_carlo_real(const RealQuery& psi, const std::function<double(std::span<const int>)>& f,
                                    const GadgetParams& params, const DistributionSpec& dist, std::uint64_t samples,
                                    std::uint64_t seed, double alpha = 0.01, int threads = 1);

// --- Boolean -> continuous simulation ----------------------------------------

struct SimulatorConfig {
  std::uint64_t batch_m = 1;
  double delta = 0.05;
  std::uint64_t query_budget = 1;

  /// m = ceil((8 / tau^2) ln(2Q / delta)).
  static SimulatorConfig for_tolerance(double tau, double delta, std::uint64_t query_budget);
};

/// Answers continuous queries psi(z, y~) with tolerance-tau/2 Boolean
/// queries phi_i(x, y) = psi(x g^i, relu(y - K N2(g^i))) over one batch of m
/// half-samples drawn at construction.
class SqSimulator {
 public:
  SqSimulator(BooleanSqOracle& oracle, GadgetParams params, const DistributionSpec& dist, SimulatorConfig config,
              std::uint64_t seed);

  double simulate(const RealQuery& psi, double tau);
  /// The Boolean query used for half-sample i.
  CornerQuery corner_query(const RealQuery& psi, std::size_t i) const;
  const SimulatorConfig& config() const { return config_; }

 private:
  BooleanSqOracle& oracle_;
  GadgetParams params_;
  SimulatorConfig config_;
  std::vector<std::vector<double>> batch_;
  std::vector<Rational> n2_;  // K N2(g^i)
};

// --- pairwise independence ----------------------------------------------------

/// Explicit family: labels[key][x] indexes into `alphabet` (the declared
/// label set Y).
struct FamilyEnsemble {
  std::string name;
  std::size_t domain_size = 0;
  std::vector<Rational> alphabet;
  std::vector<std::vector<std::uint8_t>> labels;
  std::optional<long> lwr_n, lwr_q;

  std::size_t keys() const { return labels.size(); }
  void validate() const;
};

/// Keys w in Z_q^n, inputs x in Z_q^n, label lwr_round(w.x). Any q >= 2.
FamilyEnsemble lwr_ensemble(long n, long q, long p);
/// Every function {0,1}^bits -> {0,1}.
FamilyEnsemble all_functions_ensemble(std::size_t bits);

struct PairwiseReport {
  Rational eta_actual;
  std::optional<Rational> eta_bound;  // 2 / q^(n-1) for LWR ensembles
  bool marginal_uniform = false;
  std::uint64_t pairs = 0;
  std::uint64_t bad_pairs = 0;
  std::uint64_t nonuniform_inputs = 0;
};

/// Exhaustive over ordered pairs (x, x'), diagonal included. Throws when
/// |X|^2 |C| exceeds 1e8.
PairwiseReport pairwise_check(const FamilyEnsemble& ensemble, int threads = 1);

/// phi as a table: phi[x][label index], values in [-1, 1].
using QueryTable = std::vector<std::vector<Rational>>;

/// Exact E_x phi(x, f_key(x)) for every key.
std::vector<Rational> per_key_expectations(const FamilyEnsemble& ensemble, const QueryTable& phi, int threads = 1);

struct VarianceReport {
  Rational variance;
  Rational bound;  // 2 eta_actual
  bool within() const { return variance <= bound; }
};

VarianceReport variance_check(const FamilyEnsemble& ensemble, const QueryTable& phi, const Rational& eta_actual,
                              int threads = 1);

/// Table with entries k/den, k uniform in [-den, den].
QueryTable random_query_table(const FamilyEnsemble& ensemble, std::uint64_t seed, std::uint64_t index, long den = 16);

// --- adversarial game -----------------------------------------------------------

struct GameState {
  std::vector<bool> surviving;
  std::uint64_t queries_made = 0;
  Rational tau;
  Rational ruled_out_fraction;
};

struct GameStep {
  Rational answer;             // mean over all keys
  std::uint64_t far_keys = 0;  // keys with |phi[f] - answer| > tau
  std::uint64_t newly_ruled_out = 0;
  Rational per_query_fraction;  // far_keys / |C|
  Rational per_query_bound;     // 2 eta / tau^2
  Rational cumulative_fraction;
  Rational cumulative_bound;    // queries_made * 2 eta / tau^2
  bool per_query_ok = true;
  bool cumulative_ok = true;
};

class AdversarialGame {
 public:
  AdversarialGame(const FamilyEnsemble& ensemble, Rational eta_actual, Rational tau, int threads = 1);

  GameStep respond(const QueryTable& phi);
  const GameState& state() const { return state_; }

 private:
  const FamilyEnsemble& ensemble_;
  Rational eta_;
  GameState state_;
  int threads_;
};

enum class GameStrategy { kRandomTables, kKeyProbe, kScripted };

std::string_view strategy_name(GameStrategy s);

struct GameTranscript {
  std::vector<std::string> query_names;
  std::vector<GameStep> steps;
  std::vector<std::uint64_t> surviving_curve;  // after each query
  Rational eta_actual;
  Rational tau;
  std::uint64_t keys = 0;
  Rational final_surviving_fraction;
  bool all_ok = true;

  nlohmann::ordered_json to_json() const;
};

/// Runs `queries` rounds. kKeyProbe asks phi(x, y) = 2 1[y = f_k(x)] - 1 for
/// seeded keys k; kRandomTables asks random tables; kScripted alternates
/// key probes, single-input label probes and random tables.
GameTranscript run_game(const FamilyEnsemble& ensemble, GameStrategy strategy, std::uint64_t queries,
                        const Rational& tau, std::uint64_t seed, int threads = 1);

}  // namespace hardnet
