// One PASS/FAIL line per acceptance criterion. argv[1] is the hardnet CLI.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hardnet/attacks.hpp"
#include "hardnet/sq.hpp"
#include "hardnet/verify.hpp"

namespace hardnet {
namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Rational random_rational(CounterRng& rng, const Rational& lo, const Rational& hi) {
  std::uniform_int_distribution<long> k(0, 1000000);
  return lo + (hi - lo) * ratio(k(rng), 1000000);
}

Rational eval_at(const ReluNetwork& net, std::initializer_list<Rational> z) {
  const std::vector<Rational> v(z);
  return eval_exact(net, v);
}

void criterion_gadgets(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t d = 10;
  const auto p = GadgetParams::for_dimension(d);
  std::uint64_t failures = 0, checks = 0;

  const auto n1 = build_n1(p);
  for (long k = 0; k < 10000; ++k) {
    const Rational t = p.delta + (10 - p.delta) * ratio(k / 2, 4999);
    const Rational signed_t = k % 2 ? Rational(-t) : t;
    failures += eval_at(n1, {signed_t}) != (k % 2 ? -1 : 1);
    ++checks;
  }

  const auto n2 = build_n2(p);
  const Rational two_d = 2 * static_cast<long>(d);
  for (int region = 0; region < 3; ++region) {
    for (std::uint64_t i = 0; i < 10000; ++i) {
      CounterRng rng(1, Stream::kTest, region * 100000 + i);
      std::vector<Rational> z(d);
      const std::size_t pinned = rng() % d;
      for (std::size_t j = 0; j < d; ++j) {
        Rational mag;
        if (region == 0) mag = random_rational(rng, 2 * p.delta, 3);
        else if (j == pinned && region == 1) mag = random_rational(rng, 0, p.delta);
        else if (j == pinned) mag = random_rational(rng, p.delta, 2 * p.delta);
        else mag = random_rational(rng, region == 1 ? Rational(0) : p.delta, 3);
        z[j] = (rng() & 1) ? Rational(-mag) : mag;
      }
      const Rational value = eval_exact(n2, z);
      bool ok = value >= 0 && value <= two_d;
      if (region == 0) ok = ok && value == 0;
      if (region == 1) ok = ok && value >= 1;
      std::vector<Rational> abs_z(d);
      for (std::size_t j = 0; j < d; ++j) abs_z[j] = abs(z[j]);
      ok = ok && eval_exact(n2, abs_z) == value;
      failures += !ok;
      ++checks;
    }
  }

  std::vector<long> T;
  for (long t = 0; t <= 10; ++t) T.push_back(t);
  for (long ts : T) {
    const auto n3 = build_n3(p, T, ts);
    for (long t : T) {
      for (long i = 0; i < 1000; ++i) {
        const Rational s = p.n3_W * ratio(i, 999);
        failures += eval_at(n3, {s, Rational(t)}) != relu(Rational(t == ts ? 1 : 0) - s);
        ++checks;
      }
    }
  }

  auto scaled = p;
  scaled.n3_indicator_variant = IndicatorVariant::kOneOverDelta;
  const auto indicator = build_n3_indicator(scaled, 5);
  bool deviation_measured = true;
  for (long t = 0; t <= 4; ++t) deviation_measured = deviation_measured && eval_at(indicator, {Rational(t)}) == 100;

  const double elapsed = seconds_since(start);
  v.detail << checks << " exact checks, " << failures << " failures, 1/delta indicator measured="
           << (deviation_measured ? "yes" : "no") << ", " << elapsed << " s";
  v.require(failures == 0, "gadget failures");
  v.require(deviation_measured, "indicator deviation");
  v.require(elapsed < 120, "runtime");
}

struct Instance {
  const char* name;
  CompressibleFn cf;
};

std::vector<Instance> identity_instances() {
  return {{"parity d=10", build_parity({10, {1, 3, 4, 7, 10}})},
          {"parity d=16", build_parity({16, {2, 5, 6, 11, 12, 16}})},
          {"lwr n=2 q=8 p=2", build_lwr({2, 2, 8, {3, 5}})}};
}

void criterion_naive_identity(Verdict& v) {
  for (const auto& inst : identity_instances()) {
    const auto params = lift_params(inst.cf);
    const auto lifted = lift_naive(inst.cf, params);
    const auto r = lift_deviation(lifted, corner_fn(inst.cf), params, 100000, 1000, PointRegion::kAny, 2);
    v.detail << inst.name << ": " << r.failures << "/" << r.checked << " failures; ";
    v.require(r.failures == 0 && r.checked == 101000, inst.name);
  }
}

void criterion_compressed_identity(Verdict& v) {
  for (const auto& inst : identity_instances()) {
    const auto params = lift_params(inst.cf);
    const auto naive = lift_naive(inst.cf, params);
    const auto compressed = lift_compressed(inst.cf, params);
    const auto r = lift_deviation(compressed, corner_fn(inst.cf), params, 100000, 1000, PointRegion::kOutsideRamp, 3);
    v.detail << inst.name << ": " << r.failures << "/" << r.checked << " failures, layers " << compressed.net.hidden_layers()
             << " vs " << naive.net.hidden_layers() << "; ";
    v.require(r.failures == 0 && r.checked == 101000, inst.name);
    v.require(compressed.net.hidden_layers() == 2 && naive.net.hidden_layers() == 3, "hidden layer counts");
  }
}

void criterion_case3(Verdict& v) {
  for (const auto& inst : identity_instances()) {
    const auto params = lift_params(inst.cf);
    const auto f = corner_fn(inst.cf);
    const auto naive = case3_discrepancy(lift_naive(inst.cf, params), f, params, 10000, 4);
    const auto compressed = case3_discrepancy(lift_compressed(inst.cf, params), f, params, 10000, 4);
    v.detail << inst.name << ": compressed nonzero " << compressed.nonzero_fraction() << " max "
             << to_double(compressed.max_abs_deviation) << ", naive nonzero " << naive.failures << "; ";
    v.require(naive.failures == 0, inst.name);
  }
}

void criterion_reduction(Verdict& v) {
  const auto cf = build_parity({10, {2, 4, 9}});
  const auto params = lift_params(cf);
  for (const auto& dist : {DistributionSpec::gaussian(), DistributionSpec::symmetric_uniform()}) {
    const auto r = reduction_consistency(cf, params, dist, 100000, 5);
    v.detail << dist.name() << ": " << r.failures << "/" << r.checked << " label mismatches, max KS " << r.max_ks << "; ";
    v.require(r.failures == 0, dist.name() + " labels");
    v.require(r.max_ks < 0.01, dist.name() + " KS");
  }
}

void criterion_good_set(Verdict& v) {
  const auto dist = DistributionSpec::gaussian();
  const auto est = good_set_estimate(dist, 10, 100000, 6);
  const auto fit = good_set_fit(dist, {5, 10, 20, 40}, 100000, 60);
  v.detail << "d=10 empirical " << est.empirical << " vs integrated " << est.predicted << " (3 sigma "
           << 3 * est.sigma << "); fit c=" << fit.c << " max residual " << fit.max_residual
           << (fit.monotone ? " monotone" : " not monotone");
  v.require(std::abs(est.predicted - 0.851) < 0.001, "integrated value");
  v.require(est.within_3sigma(), "3 sigma");
  v.require(fit.monotone, "monotone");
  v.require(fit.max_residual <= 0.05, "fit residual");
}

void criterion_pairwise(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const auto all = all_functions_ensemble(2);
  const auto all_report = pairwise_check(all);
  v.require(all_report.eta_actual == ratio(1, 4), "all-functions eta");
  const auto lwr = lwr_ensemble(2, 4, 2);
  const auto lwr_report = pairwise_check(lwr);
  v.detail << "all-functions eta " << to_string(all_report.eta_actual) << "; lwr(2,4,2) eta "
           << to_string(lwr_report.eta_actual) << " vs bound " << to_string(*lwr_report.eta_bound)
           << (lwr_report.marginal_uniform ? ", marginals uniform" : ", marginals not uniform");
  for (const auto* e : {&all, &lwr}) {
    const Rational eta = e == &all ? all_report.eta_actual : lwr_report.eta_actual;
    int violations = 0;
    for (std::uint64_t t = 0; t < 100; ++t) violations += !variance_check(*e, random_query_table(*e, 7, t), eta).within();
    v.detail << "; " << e->name << " variance violations " << violations;
    v.require(violations == 0, e->name + " variance");
  }
  const double elapsed = seconds_since(start);
  v.detail << "; " << elapsed << " s";
  v.require(elapsed < 60, "runtime");
}

void criterion_game(Verdict& v) {
  const auto e = lwr_ensemble(2, 8, 2);
  v.require(e.keys() == 64, "64 keys");
  std::uint64_t violations = 0;
  for (const auto& tau : {ratio(1, 4), ratio(1, 8)}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto t = run_game(e, GameStrategy::kScripted, 10, tau, seed);
      const Rational per_bound = 2 * t.eta_actual / (tau * tau);
      Rational previous = 0;
      for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& s = t.steps[i];
        const Rational cumulative = 1 - Rational(static_cast<unsigned long>(t.surviving_curve[i])) / 64;
        violations += Rational(static_cast<unsigned long>(s.far_keys)) / 64 > per_bound;
        violations += cumulative > static_cast<long>(i + 1) * per_bound;
        violations += cumulative < previous;
        previous = cumulative;
      }
      if (seed == 1) {
        v.detail << "tau " << to_string(tau) << ": eta " << to_string(t.eta_actual) << ", surviving "
                 << to_string(t.final_surviving_fraction) << "; ";
      }
    }
  }
  v.detail << violations << " violations over 6 games";
  v.require(violations == 0, "bound violations");
}

void criterion_simulation(Verdict& v) {
  const double tau = 0.1, delta = 0.05;
  const std::uint64_t budget = 20;
  const auto cf = build_parity({10, {1, 5, 8}});
  const auto params = lift_params(cf);
  const auto dist = DistributionSpec::gaussian();
  const auto f = corner_fn(cf);
  const auto config = SimulatorConfig::for_tolerance(tau, delta, budget);
  const std::function<double(std::span<const int>)> fd = [&](std::span<const int> x) { return to_double(f(x)); };
  const std::array<RealQuery, 2> queries = {
      RealQuery{[](std::span<const double>, const Rational& y) { return to_double(y); }},
      RealQuery{[](std::span<const double> z, const Rational& y) { return 0.5 * std::tanh(z[0] * z[9]) + 0.5 * to_double(y); }},
  };
  std::array<double, 2> truth{};
  for (std::size_t q = 0; q < queries.size(); ++q) {
    truth[q] = monte_carlo_real(queries[q], fd, params, dist, 1000000, 900 + q).mean;
  }
  ExactBooleanOracle oracle(f, 10);
  int within = 0;
  double worst = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    SqSimulator sim(oracle, params, dist, config, trial);
    const std::size_t q = trial % queries.size();
    const double err = std::abs(sim.simulate(queries[q], tau) - truth[q]);
    within += err <= tau;
    worst = std::max(worst, err);
  }
  v.detail << "m=" << config.batch_m << ", " << within << "/100 trials within tau, worst error " << worst;
  v.require(within >= static_cast<int>(std::ceil((1 - delta) * 100)), "coverage");
}

void criterion_attack(Verdict& v) {
  const std::size_t d = 20;
  int good = 0;
  double slowest = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> subset;
    CounterRng rng(seed, Stream::kTest, 77);
    for (std::size_t j = 1; j <= d; ++j)
      if (rng() & 1) subset.push_back(j);
    const auto cf = build_parity({d, subset});
    const auto params = lift_params(cf);
    const auto data = sample_lifted(cf, params, DistributionSpec::gaussian(), 2000, seed);
    const auto r = attack_lifted_parity(data, params);
    WeakPredictor b(r.predictor, DistributionSpec::gaussian(), seed);
    const double loss = b.squared_loss(corner_fn(cf), d, 20000);
    good += r.subset == subset && r.constant_bit == 0 && loss < 1.0 / 16;
    slowest = std::max(slowest, seconds_since(start));
  }
  v.detail << good << "/10 runs exact with loss < 1/16, slowest run " << slowest << " s";
  v.require(good >= 9, "recovery");
  v.require(slowest < 10, "runtime");
}

void criterion_mq(Verdict& v) {
  for (const auto& cf : {build_parity({10, {2, 3, 7}}), build_lwr({2, 2, 8, {3, 5}})}) {
    const auto params = lift_params(cf);
    const auto f = corner_fn(cf);
    MqWrapper wrapper(f, params);
    std::uint64_t agree = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const auto z = to_rationals(i % 2 ? adversarial_point(params.d, params, PointRegion::kAny, 8, i)
                                        : gaussian_point(params.d, params, PointRegion::kAny, 8, i));
      agree += wrapper.query(z) == reference_eval(f, params, z);
    }
    v.detail << family_kind_name(cf.kind) << ": " << agree << "/10000 agree, " << wrapper.real_queries() << " real vs "
             << wrapper.boolean_queries() << " Boolean queries; ";
    v.require(agree == 10000, "agreement");
    v.require(wrapper.real_queries() == 10000 && wrapper.boolean_queries() == 10000, "query count");
  }
}

std::string canonical_section(const std::string& cli, const std::string& args, int threads) {
  const std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                           "/hardnet_acceptance_report.json";
  const std::string cmd = cli + " --seed 11 --threads " + std::to_string(threads) + " --report " + path + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  std::remove(path.c_str());
  const std::string all = text.str();
  if (status != 0 || all.empty()) return "exit " + std::to_string(status);
  return all.substr(0, all.find("\n  \"timing\""));
}

void criterion_determinism(Verdict& v, const std::string& cli) {
  const std::vector<std::string> runs = {
      "compile --gadget n2 --d 5",
      "lift --family lwr --n 2 --q 4 --p 2 --mode compressed",
      "transform --family parity --d 8 --count 300 --out /dev/null",
      "verify identity --family parity --d 8 --mode naive --samples 3000 --adversarial 300",
      "verify goodset --d 10 --samples 20000 --fit-dims 5,10",
      "verify marginal --family parity --d 6 --samples 4000 --ks-max 0.05",
      "verify case3 --family lwr --n 2 --q 4 --p 2 --samples 300",
      "verify-pairwise --family lwr --n 2 --q 4 --p 2 --tables 10",
      "sq-game --family lwr --n 2 --q 8 --p 2 --tau 1/8 --queries 10",
      "sq-simulate --family parity --d 6 --tau 0.25 --truth-samples 20000 --queries label",
      "attack parity-lift --d 12 --samples 600 --loss-samples 3000",
      "mq-demo --family parity --d 8 --queries 400",
  };
  int identical = 0;
  for (const auto& args : runs) {
    const auto a = canonical_section(cli, args, 1);
    const auto b = canonical_section(cli, args, 1);
    const auto c = canonical_section(cli, args, 8);
    const bool ok = a.rfind("exit", 0) != 0 && a == b && a == c;
    identical += ok;
    if (!ok) v.detail << " [" << args << " differs or failed]";
  }
  v.detail << identical << "/" << runs.size() << " subcommands byte-identical across runs and threads {1, 8}";
  v.require(identical == static_cast<int>(runs.size()), "determinism");
}

}  // namespace
}  // namespace hardnet

int main(int argc, char** argv) {
  using namespace hardnet;
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to hardnet CLI>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria = {
      {"gadget exactness suite", criterion_gadgets},
      {"naive-lift universal identity", criterion_naive_identity},
      {"compressed-lift identity outside the ramp", criterion_compressed_identity},
      {"case-3 discrepancy report", criterion_case3},
      {"reduction consistency and marginals", criterion_reduction},
      {"good-set probability", criterion_good_set},
      {"pairwise independence and variance", criterion_pairwise},
      {"adversarial SQ game accounting", criterion_game},
      {"SQ simulation coverage", criterion_simulation},
      {"end-to-end parity attack", criterion_attack},
      {"membership-query wrapper", criterion_mq},
      {"CLI determinism", [&](Verdict& v) { criterion_determinism(v, cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    failed += !v.pass;
    std::printf("%s criterion %2zu: %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                seconds_since(start), v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
