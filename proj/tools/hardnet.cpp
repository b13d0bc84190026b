#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hardnet/attacks.hpp"
#include "hardnet/network_io.hpp"
#include "hardnet/report.hpp"
#include "hardnet/sq.hpp"
#include "hardnet/verify.hpp"

namespace hardnet {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

// Raised for malformed arguments discovered after parsing (exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outcome {
  Json config = Json::object();
  Json result = Json::object();
  bool ok = true;
};

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string format = "json";
  std::string report_path;
};

std::vector<long> parse_list(const std::string& text) {
  std::vector<long> out;
  if (text.empty()) return out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("expected a comma-separated integer list, got '" + text + "'");
    }
  }
  return out;
}

// "1/4", "3" or a terminating decimal such as "0.25", exactly.
Rational parse_number(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos) {
    try {
      return parse_rational(text);
    } catch (const std::invalid_argument&) {
      throw UsageError("expected a rational number, got '" + text + "'");
    }
  }
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const std::size_t places = text.size() - dot - 1;
  if (digits.empty() || digits == "-" || digits.find_first_not_of("-0123456789") != std::string::npos ||
      digits.find('-', 1) != std::string::npos) {
    throw UsageError("expected a decimal number, got '" + text + "'");
  }
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  Rational r(mpz_class(digits, 10), scale);
  r.canonicalize();
  return r;
}

DistributionSpec parse_dist(const std::string& name) {
  if (name == "gaussian") return DistributionSpec::gaussian();
  if (name == "uniform") return DistributionSpec::symmetric_uniform();
  throw UsageError("unknown distribution '" + name + "'");
}

std::vector<std::size_t> seeded_subset(std::size_t d, std::uint64_t seed) {
  CounterRng rng(seed, Stream::kKeyedToy, 0);
  std::vector<std::size_t> subset;
  std::uint64_t word = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (j % 64 == 0) word = rng();
    if ((word >> (j % 64)) & 1) subset.push_back(j + 1);
  }
  return subset;
}

struct FamilyOptions {
  std::string family = "parity";
  std::size_t d = 10;
  std::string subset;
  long n = 2, q = 8, p = 2;
  std::string w;
  std::uint64_t key = 1;
  std::size_t depth = 1;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "parity | lwr | keyed_toy | path to a family spec document");
    app->add_option("--d", d, "cube dimension (parity, keyed_toy)");
    app->add_option("--subset", subset, "parity subset, 1-based comma list; default: seeded");
    app->add_option("--n", n, "LWR dimension");
    app->add_option("--q", q, "LWR modulus");
    app->add_option("--p", p, "LWR rounding modulus");
    app->add_option("--w", w, "LWR secret, comma list; default: seeded");
    app->add_option("--key", key, "keyed_toy key");
    app->add_option("--depth", depth, "keyed_toy depth budget");
  }

  FamilySpec resolve(std::uint64_t seed) const {
    FamilySpec spec;
    if (family == "parity") {
      spec.kind = FamilyKind::kParity;
      spec.parity.d = d;
      if (subset.empty()) {
        spec.parity.subset = seeded_subset(d, seed);
      } else {
        for (long j : parse_list(subset)) spec.parity.subset.push_back(static_cast<std::size_t>(j));
      }
      spec.parity.validate();
    } else if (family == "lwr") {
      spec.kind = FamilyKind::kLwr;
      spec.lwr.n = static_cast<std::size_t>(n);
      spec.lwr.p = p;
      spec.lwr.q = q;
      if (w.empty()) {
        for (long i = 0; i < n; ++i) {
          CounterRng rng(seed, Stream::kLwrSecret, static_cast<std::uint64_t>(i));
          spec.lwr.w.push_back(static_cast<long>(rng() % static_cast<std::uint64_t>(q)));
        }
      } else {
        spec.lwr.w = parse_list(w);
      }
      spec.lwr.validate();
    } else if (family == "keyed_toy") {
      spec.kind = FamilyKind::kKeyedToy;
      spec.toy_d = d;
      spec.toy_key = key;
      spec.toy_depth = depth;
    } else {
      std::ifstream in(family);
      if (!in) throw UsageError("unknown family '" + family + "' (not a kind and not a readable file)");
      nlohmann::json doc;
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed family document '" + family + "': " + e.what());
      }
      spec = FamilySpec::from_json(doc);
    }
    return spec;
  }
};

LiftedNetwork build_lift(const CompressibleFn& cf, const GadgetParams& params, const std::string& mode) {
  if (mode == "naive") return lift_naive(cf, params);
  if (mode == "compressed") return lift_compressed(cf, params);
  throw UsageError("unknown lift mode '" + mode + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

Json deviation_json(const DeviationReport& r) {
  Json j;
  j["checked"] = r.checked;
  j["failures"] = r.failures;
  put_rational(j, "max_abs_deviation", r.max_abs_deviation);
  j["mean_abs_deviation"] = r.mean_abs_deviation;
  j["nonzero_fraction"] = r.nonzero_fraction();
  return j;
}

Json network_summary(const ReluNetwork& net) {
  Json j;
  j["input_dim"] = net.input_dim();
  j["hidden_layers"] = net.hidden_layers();
  j["unit_count"] = net.meta().unit_count;
  put_rational(j, "weight_bound", net.meta().weight_bound);
  return j;
}

// --- subcommands -----------------------------------------------------------------

struct CompileCmd {
  std::string gadget = "n2";
  std::size_t d = 4;
  long t_star = 0;
  std::string range;
  std::size_t arity = 3;
  std::string out;
  FamilyOptions fam;

  Outcome run(const Globals& g) const {
    Outcome o;
    o.config["gadget"] = gadget;
    ReluNetwork net = [&] {
      const auto params = GadgetParams::for_dimension(d);
      if (gadget != "family" && gadget != "majority") o.config["d"] = d;
      if (gadget == "n1") return build_n1(params);
      if (gadget == "n1-vec") return build_n1_vec(params);
      if (gadget == "n2") return build_n2(params);
      if (gadget == "n3" || gadget == "n3-indicator") {
        o.config["t_star"] = t_star;
        if (gadget == "n3-indicator") return build_n3_indicator(params, t_star);
        std::vector<long> T = parse_list(range);
        if (T.empty())
          for (long t = 0; t <= static_cast<long>(d); ++t) T.push_back(t);
        o.config["range"] = T;
        return build_n3(params, T, t_star);
      }
      if (gadget == "majority") {
        o.config["arity"] = arity;
        return build_majority(arity);
      }
      if (gadget == "family") {
        const auto spec = fam.resolve(g.seed);
        o.config["family"] = spec.to_json();
        return to_network(spec.build());
      }
      throw UsageError("unknown gadget '" + gadget + "'");
    }();
    o.result = network_summary(net);
    if (out.empty()) {
      o.result["network"] = network_to_json(net);
    } else {
      write_text(out, serialize(net));
      o.result["written"] = out;
    }
    return o;
  }
};

struct LiftCmd {
  FamilyOptions fam;
  std::string mode = "naive";
  std::string out;

  Outcome run(const Globals& g) const {
    Outcome o;
    const auto spec = fam.resolve(g.seed);
    const auto cf = spec.build();
    const auto params = lift_params(cf);
    const auto lifted = build_lift(cf, params, mode);
    o.config["family"] = spec.to_json();
    o.config["mode"] = mode;
    o.result = network_summary(lifted.net);
    put_rational(o.result, "n2_scale", lifted.n2_scale);
    put_rational(o.result, "bound_C", lifted.bound_C);
    put_rational(o.result, "delta", params.delta);
    put_rational(o.result, "n3_W", params.n3_W);
    if (out.empty()) {
      o.result["network"] = network_to_json(lifted.net);
    } else {
      write_text(out, serialize(lifted.net));
      o.result["written"] = out;
    }
    return o;
  }
};

struct TransformCmd {
  FamilyOptions fam;
  std::string dist = "gaussian";
  std::uint64_t count = 1000;
  std::string out;

  Outcome run(const Globals& g) const {
    Outcome o;
    const auto spec = fam.resolve(g.seed);
    const auto cf = spec.build();
    const auto params = lift_params(cf);
    const auto law = parse_dist(dist);
    o.config["family"] = spec.to_json();
    o.config["dist"] = law.name();
    o.config["count"] = count;
    const auto data = sample_lifted(cf, params, law, count, g.seed, g.threads);
    std::ostringstream lines;
    std::uint64_t good = 0, nonzero = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      Json row;
      row["index"] = i;
      row["z"] = data[i].z;
      row["y_exact"] = to_string(data[i].y_tilde);
      row["y_float"] = to_double(data[i].y_tilde);
      lines << row.dump() << "\n";
      good += in_good_set(std::span<const Rational>(data[i].z_exact), params);
      nonzero += sgn(data[i].y_tilde) != 0;
    }
    if (out.empty()) throw UsageError("transform needs --out");
    write_text(out, lines.str());
    o.result["written"] = out;
    o.result["count"] = count;
    o.result["good_set_count"] = good;
    o.result["nonzero_labels"] = nonzero;
    return o;
  }
};

struct VerifyCmd {
  std::string what;
  FamilyOptions fam;
  std::string mode = "naive";
  std::string dist = "gaussian";
  std::uint64_t samples = 10000;
  std::uint64_t adversarial = 1000;
  std::string dims = "5,10,20,40";
  double ks_max = 0.01;
  double fit_tolerance = 0.05;

  Outcome run(const Globals& g) const {
    Outcome o;
    o.config["check"] = what;
    o.config["samples"] = samples;
    if (what == "goodset") {
      const auto law = parse_dist(dist);
      o.config["d"] = fam.d;
      o.config["dist"] = law.name();
      o.config["fit_dims"] = parse_list(dims);
      const auto est = good_set_estimate(law, fam.d, samples, g.seed, g.threads);
      o.result["empirical"] = est.empirical;
      o.result["predicted"] = est.predicted;
      o.result["sigma"] = est.sigma;
      o.result["within_3sigma"] = est.within_3sigma();
      std::vector<std::size_t> ds;
      for (long d : parse_list(dims)) ds.push_back(static_cast<std::size_t>(d));
      const auto fit = good_set_fit(law, ds, samples, g.seed, g.threads);
      Json points = Json::array();
      for (const auto& p : fit.points) points.push_back({{"d", p.d}, {"empirical", p.empirical}, {"predicted", p.predicted}});
      o.result["fit"] = {{"points", points}, {"c", fit.c}, {"max_residual", fit.max_residual}, {"monotone", fit.monotone}};
      o.ok = est.within_3sigma() && fit.monotone && fit.max_residual <= fit_tolerance;
      return o;
    }
    const auto spec = fam.resolve(g.seed);
    const auto cf = spec.build();
    const auto params = lift_params(cf);
    const auto f = corner_fn(cf);
    o.config["family"] = spec.to_json();
    if (what == "identity") {
      o.config["mode"] = mode;
      o.config["adversarial"] = adversarial;
      const auto lifted = build_lift(cf, params, mode);
      const auto region = mode == "naive" ? PointRegion::kAny : PointRegion::kOutsideRamp;
      o.result = deviation_json(lift_deviation(lifted, f, params, samples, adversarial, region, g.seed, g.threads));
      o.result["hidden_layers"] = lifted.net.hidden_layers();
      o.ok = o.result["failures"] == 0;
    } else if (what == "case3") {
      const auto naive = lift_naive(cf, params);
      const auto compressed = lift_compressed(cf, params);
      o.result["compressed"] = deviation_json(case3_discrepancy(compressed, f, params, samples, g.seed, g.threads));
      o.result["naive"] = deviation_json(case3_discrepancy(naive, f, params, samples, g.seed, g.threads));
      o.ok = o.result["naive"]["failures"] == 0;
    } else if (what == "marginal") {
      const auto law = parse_dist(dist);
      o.config["dist"] = law.name();
      o.config["ks_max"] = ks_max;
      const auto r = reduction_consistency(cf, params, law, samples, g.seed, g.threads);
      o.result["checked"] = r.checked;
      o.result["failures"] = r.failures;
      o.result["ks"] = r.ks;
      o.result["max_ks"] = r.max_ks;
      o.ok = r.failures == 0 && r.max_ks < ks_max;
    } else {
      throw UsageError("unknown verify check '" + what + "'");
    }
    return o;
  }
};

FamilyEnsemble ensemble_for(const std::string& family, long n, long q, long p, std::size_t bits) {
  if (family == "lwr") return lwr_ensemble(n, q, p);
  if (family == "all-functions") return all_functions_ensemble(bits);
  throw UsageError("ensemble family must be lwr or all-functions, got '" + family + "'");
}

struct PairwiseCmd {
  std::string family = "lwr";
  long n = 2, q = 4, p = 2;
  std::size_t bits = 2;
  std::uint64_t tables = 100;

  Outcome run(const Globals& g) const {
    Outcome o;
    const auto e = ensemble_for(family, n, q, p, bits);
    o.config["ensemble"] = e.name;
    o.config["tables"] = tables;
    const auto r = pairwise_check(e, g.threads);
    o.result["keys"] = e.keys();
    o.result["domain_size"] = e.domain_size;
    o.result["pairs"] = r.pairs;
    o.result["bad_pairs"] = r.bad_pairs;
    put_rational(o.result, "eta_actual", r.eta_actual);
    if (r.eta_bound) {
      put_rational(o.result, "eta_bound", *r.eta_bound);
      o.result["eta_within_bound"] = r.eta_actual <= *r.eta_bound;
    }
    o.result["marginal_uniform"] = r.marginal_uniform;
    o.result["nonuniform_inputs"] = r.nonuniform_inputs;
    std::uint64_t violations = 0;
    Rational worst = 0;
    for (std::uint64_t t = 0; t < tables; ++t) {
      const auto v = variance_check(e, random_query_table(e, g.seed, t), r.eta_actual, g.threads);
      violations += !v.within();
      if (v.variance > worst) worst = v.variance;
    }
    o.result["variance_tables"] = tables;
    o.result["variance_violations"] = violations;
    put_rational(o.result, "max_variance", worst);
    put_rational(o.result, "variance_bound", 2 * r.eta_actual);
    o.ok = violations == 0;
    return o;
  }
};

struct GameCmd {
  std::string family = "lwr";
  long n = 2, q = 8, p = 2;
  std::size_t bits = 2;
  std::string tau = "1/4";
  std::uint64_t queries = 10;
  std::string strategy = "scripted";

  Outcome run(const Globals& g) const {
    Outcome o;
    const auto e = ensemble_for(family, n, q, p, bits);
    GameStrategy s;
    if (strategy == "scripted") s = GameStrategy::kScripted;
    else if (strategy == "key_probe") s = GameStrategy::kKeyProbe;
    else if (strategy == "random_tables") s = GameStrategy::kRandomTables;
    else throw UsageError("unknown strategy '" + strategy + "'");
    const Rational t = parse_number(tau);
    o.config["ensemble"] = e.name;
    put_rational(o.config, "tau", t);
    o.config["queries"] = queries;
    o.config["strategy"] = strategy;
    const auto transcript = run_game(e, s, queries, t, g.seed, g.threads);
    o.result = transcript.to_json();
    o.ok = transcript.all_ok;
    return o;
  }
};

struct NamedQuery {
  std::string name;
  RealQuery psi;
};

std::vector<NamedQuery> simulation_queries(const std::string& names) {
  std::vector<NamedQuery> all = {
      {"label", {[](std::span<const double>, const Rational& y) { return to_double(y); }}},
      {"label_sign", {[](std::span<const double> z, const Rational& y) { return z[0] > 0 ? to_double(y) : -to_double(y); }}},
      {"smooth", {[](std::span<const double> z, const Rational& y) {
         return 0.5 * std::tanh(z[0] * z[z.size() - 1]) + 0.5 * to_double(y);
       }}},
  };
  std::vector<NamedQuery> out;
  std::stringstream in(names);
  std::string item;
  while (std::getline(in, item, ',')) {
    bool found = false;
    for (const auto& q : all) {
      if (q.name == item) {
        out.push_back(q);
        found = true;
      }
    }
    if (!found) throw UsageError("unknown simulation query '" + item + "'");
  }
  return out;
}

struct SimulateCmd {
  FamilyOptions fam;
  std::string tau_text = "0.1";
  std::string delta_text = "0.05";
  std::uint64_t budget = 20;
  std::uint64_t trials = 1;
  std::uint64_t truth_samples = 1000000;
  std::string queries = "label,smooth";
  std::string dist = "gaussian";
  std::string oracle = "exact";
  std::uint64_t mc_samples = 4096;

  Outcome run(const Globals& g) const {
    Outcome o;
    const auto spec = fam.resolve(g.seed);
    const auto cf = spec.build();
    const auto params = lift_params(cf);
    const auto law = parse_dist(dist);
    const auto f = corner_fn(cf);
    const auto qs = simulation_queries(queries);
    const Rational tau_exact = parse_number(tau_text), delta_exact = parse_number(delta_text);
    const double tau = to_double(tau_exact), delta = to_double(delta_exact);
    if (qs.size() > budget) throw UsageError("more queries than the query budget");
    const auto config = SimulatorConfig::for_tolerance(tau, delta, budget);
    o.config["family"] = spec.to_json();
    put_rational(o.config, "tau", tau_exact);
    put_rational(o.config, "delta", delta_exact);
    o.config["budget"] = budget;
    o.config["trials"] = trials;
    o.config["truth_samples"] = truth_samples;
    o.config["queries"] = queries;
    o.config["dist"] = law.name();
    o.config["oracle"] = oracle;
    o.result["batch_m"] = config.batch_m;
    const std::function<double(std::span<const int>)> fd = [&](std::span<const int> x) { return to_double(f(x)); };
    Json rows = Json::array();
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
      const auto truth = monte_carlo_real(qs[qi].psi, fd, params, law, truth_samples, g.seed ^ 0x5eedULL, 0.01, g.threads);
      std::uint64_t within = 0;
      Json answers = Json::array();
      for (std::uint64_t t = 0; t < trials; ++t) {
        std::unique_ptr<BooleanSqOracle> boolean;
        if (oracle == "exact") {
          boolean = std::make_unique<ExactBooleanOracle>(f, params.d);
        } else if (oracle == "monte-carlo") {
          boolean = std::make_unique<MonteCarloBooleanOracle>(f, params.d, mc_samples, g.seed + t);
        } else {
          throw UsageError("unknown oracle '" + oracle + "'");
        }
        SqSimulator sim(*boolean, params, law, config, g.seed + t);
        const double answer = sim.simulate(qs[qi].psi, tau);
        within += std::abs(answer - truth.mean) <= tau;
        answers.push_back(answer);
      }
      Json row;
      row["query"] = qs[qi].name;
      row["truth"] = truth.mean;
      row["truth_half_width"] = truth.half_width;
      row["answers"] = answers;
      row["within_tau"] = within;
      row["required"] = static_cast<std::uint64_t>(std::ceil((1 - delta) * static_cast<double>(trials)));
      o.ok = o.ok && within >= row["required"].get<std::uint64_t>();
      rows.push_back(std::move(row));
    }
    o.result["queries"] = std::move(rows);
    return o;
  }
};

struct AttackCmd {
  std::size_t d = 20;
  std::uint64_t samples = 2000;
  std::string subset;
  std::string dist = "gaussian";
  std::uint64_t loss_samples = 20000;

  Outcome run(const Globals& g) const {
    Outcome o;
    FamilyOptions fam;
    fam.d = d;
    fam.subset = subset;
    const auto spec = fam.resolve(g.seed);
    const auto cf = spec.build();
    const auto params = lift_params(cf);
    const auto law = parse_dist(dist);
    o.config["family"] = spec.to_json();
    o.config["samples"] = samples;
    o.config["dist"] = law.name();
    o.config["loss_samples"] = loss_samples;
    const auto data = sample_lifted(cf, params, law, samples, g.seed, g.threads);
    const auto r = attack_lifted_parity(data, params, g.threads);
    const bool exact = r.subset == spec.parity.subset && r.constant_bit == 0;
    WeakPredictor b(r.predictor, law, g.seed);
    const double loss = b.squared_loss(corner_fn(cf), d, loss_samples, g.threads);
    o.result["kept"] = r.kept;
    o.result["rank"] = r.rank;
    o.result["underdetermined"] = r.underdetermined;
    o.result["recovered_subset"] = r.subset;
    o.result["constant_bit"] = r.constant_bit;
    o.result["exact_recovery"] = exact;
    o.result["empirical_sq_loss"] = loss;
    o.result["statistical_queries"] = 0;
    o.ok = exact && loss < 1.0 / 16;
    return o;
  }
};

struct MqCmd {
  FamilyOptions fam;
  std::uint64_t queries = 10000;

  Outcome run(const Globals& g) const {
    Outcome o;
    const auto spec = fam.resolve(g.seed);
    const auto cf = spec.build();
    const auto params = lift_params(cf);
    const auto f = corner_fn(cf);
    o.config["family"] = spec.to_json();
    o.config["queries"] = queries;
    MqWrapper wrapper(f, params);
    std::uint64_t agree = 0, nonzero = 0;
    for (std::uint64_t i = 0; i < queries; ++i) {
      const auto z = i % 2 == 0 ? gaussian_point(params.d, params, PointRegion::kAny, g.seed, i)
                                : adversarial_point(params.d, params, PointRegion::kAny, g.seed, i);
      const auto zq = to_rationals(z);
      const Rational answer = wrapper.query(zq);
      agree += answer == reference_eval(f, params, zq);
      nonzero += sgn(answer) != 0;
    }
    o.result["real_queries"] = wrapper.real_queries();
    o.result["boolean_queries"] = wrapper.boolean_queries();
    o.result["agreements"] = agree;
    o.result["nonzero_answers"] = nonzero;
    o.ok = agree == queries && wrapper.boolean_queries() == wrapper.real_queries();
    return o;
  }
};

// --- output --------------------------------------------------------------------

std::string csv_cell(const Json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return csv_cell(Json(v.dump()));
}

std::string render(const Json& canonical, const Json& timing, const std::string& format) {
  if (format == "json") {
    Json doc;
    doc["canonical"] = canonical;
    doc["timing"] = timing;
    return doc.dump(2) + "\n";
  }
  std::string header = "tool,version,subcommand", row;
  row = csv_cell(canonical["tool"]) + "," + csv_cell(canonical["version"]) + "," + csv_cell(canonical["subcommand"]);
  for (const auto& [key, value] : canonical["result"].items()) {
    header += "," + key;
    row += "," + csv_cell(value);
  }
  return header + "\n" + row + "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Hard-instance ReLU network toolkit"};
  app.require_subcommand(1);
  Globals g;
  if (const char* env = std::getenv("HARDNET_SEED")) {
    try {
      g.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: HARDNET_SEED must be an unsigned integer\n";
      return 2;
    }
  }
  app.add_option("--seed", g.seed, "64-bit seed (default: $HARDNET_SEED or 0)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--report", g.report_path, "write the report here instead of stdout");
  app.fallthrough();

  CompileCmd compile;
  auto* c = app.add_subcommand("compile", "build a gadget or family network");
  c->add_option("--gadget", compile.gadget, "n1 | n1-vec | n2 | n3 | n3-indicator | majority | family");
  c->add_option("--t-star", compile.t_star);
  c->add_option("--range", compile.range, "N3 integer range, comma list (default 0..d)");
  c->add_option("--arity", compile.arity);
  c->add_option("--out", compile.out);
  compile.fam.attach(c);
  // --d is shared with the family options

  LiftCmd lift;
  auto* l = app.add_subcommand("lift", "build a naive or compressed lift");
  lift.fam.attach(l);
  l->add_option("--mode", lift.mode)->check(CLI::IsMember({"naive", "compressed"}));
  l->add_option("--out", lift.out);

  TransformCmd transform;
  auto* t = app.add_subcommand("transform", "write a transformed real-valued dataset");
  transform.fam.attach(t);
  t->add_option("--dist", transform.dist)->check(CLI::IsMember({"gaussian", "uniform"}));
  t->add_option("--count", transform.count);
  t->add_option("--out", transform.out)->required();

  VerifyCmd verify;
  auto* v = app.add_subcommand("verify", "identity | goodset | marginal | case3");
  v->add_option("check", verify.what)->required()->check(CLI::IsMember({"identity", "goodset", "marginal", "case3"}));
  verify.fam.attach(v);
  v->add_option("--mode", verify.mode)->check(CLI::IsMember({"naive", "compressed"}));
  v->add_option("--dist", verify.dist)->check(CLI::IsMember({"gaussian", "uniform"}));
  v->add_option("--samples", verify.samples);
  v->add_option("--adversarial", verify.adversarial);
  v->add_option("--fit-dims", verify.dims);
  v->add_option("--ks-max", verify.ks_max);
  v->add_option("--fit-tolerance", verify.fit_tolerance);

  PairwiseCmd pairwise;
  auto* pw = app.add_subcommand("verify-pairwise", "exhaustive pairwise independence and variance checks");
  pw->add_option("--family", pairwise.family)->check(CLI::IsMember({"lwr", "all-functions"}));
  pw->add_option("--n", pairwise.n);
  pw->add_option("--q", pairwise.q);
  pw->add_option("--p", pairwise.p);
  pw->add_option("--bits", pairwise.bits);
  pw->add_option("--tables", pairwise.tables);

  GameCmd game;
  auto* gm = app.add_subcommand("sq-game", "adversarial SQ oracle game");
  gm->add_option("--family", game.family)->check(CLI::IsMember({"lwr", "all-functions"}));
  gm->add_option("--n", game.n);
  gm->add_option("--q", game.q);
  gm->add_option("--p", game.p);
  gm->add_option("--bits", game.bits);
  gm->add_option("--tau", game.tau);
  gm->add_option("--queries", game.queries);
  gm->add_option("--strategy", game.strategy)->check(CLI::IsMember({"scripted", "key_probe", "random_tables"}));

  SimulateCmd simulate;
  auto* sim = app.add_subcommand("sq-simulate", "answer continuous queries with Boolean SQ queries");
  simulate.fam.attach(sim);
  sim->add_option("--tau", simulate.tau_text);
  sim->add_option("--delta", simulate.delta_text);
  sim->add_option("--budget", simulate.budget);
  sim->add_option("--trials", simulate.trials);
  sim->add_option("--truth-samples", simulate.truth_samples);
  sim->add_option("--queries", simulate.queries, "comma list of label | label_sign | smooth");
  sim->add_option("--dist", simulate.dist)->check(CLI::IsMember({"gaussian", "uniform"}));
  sim->add_option("--oracle", simulate.oracle)->check(CLI::IsMember({"exact", "monte-carlo"}));
  sim->add_option("--mc-samples", simulate.mc_samples);

  AttackCmd attack;
  auto* at = app.add_subcommand("attack", "non-SQ attacks");
  at->require_subcommand(1);
  auto* pl = at->add_subcommand("parity-lift", "recover a lifted parity by GF(2) elimination");
  pl->add_option("--d", attack.d);
  pl->add_option("--samples", attack.samples);
  pl->add_option("--subset", attack.subset);
  pl->add_option("--dist", attack.dist)->check(CLI::IsMember({"gaussian", "uniform"}));
  pl->add_option("--loss-samples", attack.loss_samples);

  MqCmd mq;
  auto* m = app.add_subcommand("mq-demo", "membership-query wrapper against exact reference evaluation");
  mq.fam.attach(m);
  m->add_option("--queries", mq.queries);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  std::string name;
  Outcome outcome;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (c->parsed()) {
      name = "compile";
      compile.d = compile.fam.d;
      outcome = compile.run(g);
    } else if (l->parsed()) {
      name = "lift";
      outcome = lift.run(g);
    } else if (t->parsed()) {
      name = "transform";
      outcome = transform.run(g);
    } else if (v->parsed()) {
      name = "verify " + verify.what;
      outcome = verify.run(g);
    } else if (pw->parsed()) {
      name = "verify-pairwise";
      outcome = pairwise.run(g);
    } else if (gm->parsed()) {
      name = "sq-game";
      outcome = game.run(g);
    } else if (sim->parsed()) {
      name = "sq-simulate";
      outcome = simulate.run(g);
    } else if (pl->parsed()) {
      name = "attack parity-lift";
      outcome = attack.run(g);
    } else if (m->parsed()) {
      name = "mq-demo";
      outcome = mq.run(g);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "malformed input at " << e.location() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  Json canonical;
  canonical["tool"] = "hardnet";
  canonical["version"] = kVersion;
  canonical["subcommand"] = name;
  outcome.config["seed"] = g.seed;
  canonical["config"] = outcome.config;
  canonical["result"] = outcome.result;
  canonical["ok"] = outcome.ok;
  Json timing;
  timing["runtime_ms"] = elapsed;
  timing["threads"] = g.threads;

  const std::string text = render(canonical, timing, g.format);
  if (g.report_path.empty()) {
    std::cout << text;
  } else {
    write_text(g.report_path, text);
  }
  return outcome.ok ? 0 : 1;
}

}  // namespace hardnet

int main(int argc, char** argv) { return hardnet::run_cli(argc, argv); }
