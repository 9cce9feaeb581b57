/// @file pipeline.hpp
/// @brief End-to-end crash prediction run and its structured report.
/// @details Stages: network, failure_spec, perturbation, hubo, reduction,
/// solve, decode, oracle, crash_report. A stage failure is rethrown with the
/// stage name prefixed; artifacts finished before it have already been
/// handed to the sink.

#pragma once
#include <cmath>
#include <cstdint>
#include <ctime>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crashnet/equilibrium.hpp"
#include "crashnet/hubo.hpp"
#include "crashnet/network_io.hpp"
#include "crashnet/reduction.hpp"
#include "crashnet/solver/decompose.hpp"
#include "crashnet/solver/majority.hpp"
#include "crashnet/solver/remote.hpp"

#ifndef CRASHNET_VERSION
#define CRASHNET_VERSION "0.0.0"
#endif

namespace crashnet {

using OrderedJson = nlohmann::ordered_json;

inline constexpr const char* kVersion = CRASHNET_VERSION;

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

enum class PipelineSolver { decompose, anneal, tabu, exhaustive };

inline const char* to_string(PipelineSolver s) {
  switch (s) {
    case PipelineSolver::decompose: return "decompose";
    case PipelineSolver::anneal: return "anneal";
    case PipelineSolver::tabu: return "tabu";
    case PipelineSolver::exhaustive: return "exhaustive";
  }
  return "unknown";
}

inline PipelineSolver parse_pipeline_solver(const std::string& s) {
  for (auto v : {PipelineSolver::decompose, PipelineSolver::anneal, PipelineSolver::tabu,
                 PipelineSolver::exhaustive})
    if (s == to_string(v)) return v;
  throw ParameterError("unknown solver '" + s + "'");
}

struct PipelineConfig {
  // network source: file, or generated
  std::optional<std::string> network_file;
  std::size_t n = 3;
  std::size_t m = 7;
  double price_min = 10.0;
  double price_max = 40.0;
  std::uint64_t network_seed = 1;
  std::optional<std::vector<double>> prices;  ///< overrides generated prices

  double vc_fraction = 0.8;
  double beta_fraction = 0.3;
  BitSpec bits{0, 4};
  int degree = 3;

  std::set<std::size_t> zeroed_assets;  ///< 0-based
  std::size_t random_zeroed = 0;        ///< extra random assets to zero
  std::uint64_t perturb_seed = 1;

  PipelineSolver solver = PipelineSolver::decompose;
  std::uint64_t seed = 1;
  std::size_t reads = 20;
  std::size_t subproblem_size = 50;
  std::size_t max_iterations = 200;
  Subsolver subsolver = Subsolver::tabu;
  std::size_t threads = 1;
  std::optional<RemoteConfig> remote;  ///< decompose subproblems go here

  QuadratizeOptions quadratize;
  std::uint64_t oracle_limit = std::uint64_t{1} << 21;

  std::vector<std::string> validate() const {
    std::vector<std::string> errs;
    if (!network_file) {
      if (n < 1) errs.push_back("n must be >= 1");
      if (m < 1) errs.push_back("m must be >= 1");
      if (!(price_min >= 0.0 && price_min <= price_max))
        errs.push_back("need 0 <= price-min <= price-max");
      if (prices && prices->size() != m)
        errs.push_back("prices has " + std::to_string(prices->size()) + " entries, m is " +
                       std::to_string(m));
    }
    if (!(vc_fraction >= 0.0 && vc_fraction <= 1.0)) errs.push_back("vc-fraction must lie in [0, 1]");
    if (!(beta_fraction >= 0.0 && beta_fraction <= 1.0))
      errs.push_back("beta-fraction must lie in [0, 1]");
    try {
      bits.check();
    } catch (const Error& e) {
      errs.push_back(e.what());
    }
    if (degree < 1 || degree % 2 == 0) errs.push_back("r must be a positive odd integer");
    if (reads < 1) errs.push_back("reads must be >= 1");
    if (subproblem_size < 2) errs.push_back("subproblem-size must be >= 2");
    if (!(quadratize.scale_factor > 0.0)) errs.push_back("gadget scale must be positive");
    return errs;
  }

  OrderedJson to_json() const {
    OrderedJson j;
    if (network_file) j["network_file"] = *network_file;
    else
      j["generate"] = {{"n", n}, {"m", m}, {"price_min", price_min}, {"price_max", price_max},
                       {"seed", network_seed}};
    if (prices) j["prices"] = *prices;
    j["vc_fraction"] = vc_fraction;
    j["beta_fraction"] = beta_fraction;
    j["alpha_min"] = bits.alpha_min;
    j["alpha_max"] = bits.alpha_max;
    j["r"] = degree;
    j["zeroed_assets"] = std::vector<std::size_t>(zeroed_assets.begin(), zeroed_assets.end());
    j["random_zeroed"] = random_zeroed;
    j["perturb_seed"] = perturb_seed;
    j["solver"] = to_string(solver);
    j["seed"] = seed;
    j["reads"] = reads;
    j["subproblem_size"] = subproblem_size;
    j["max_iterations"] = max_iterations;
    j["subsolver"] = subsolver == Subsolver::exhaustive ? "exhaustive"
                     : subsolver == Subsolver::anneal   ? "anneal"
                                                        : "tabu";
    if (remote) j["remote"] = remote->endpoint;
    j["gadget_scale"] = quadratize.scale_factor;
    j["gadget_scaling"] = quadratize.scaling == GadgetScaling::global ? "global" : "per_term";
    j["gadget_strategy"] =
        quadratize.strategy == GadgetStrategy::single_ancilla_3body ? "single" : "kbody";
    j["oracle_limit"] = oracle_limit;
    return j;
  }

  std::string hash() const { return fnv1a_hex(to_json().dump()); }
};

struct PipelineResult {
  OrderedJson report;
  std::string csv;
  FinancialNetwork network;
  FinancialNetwork perturbed;
  FailureSpec failure;
  Qubo qubo;
  SampleSet samples;
  Vector decoded;
  Vector majority;
  double solver_objective = 0.0;
  std::optional<double> oracle_objective;
  CrashReport crash;
};

/// Receives (artifact name, content) as stages complete.
using ArtifactSink = std::function<void(const std::string&, const std::string&)>;

namespace detail {

inline std::vector<double> to_std(const Vector& v) { return {v.begin(), v.end()}; }

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    rethrow_with_context(e, std::string("stage ") + name);
  }
}

/// Same residual form the grid oracle uses: ||v - u + M b(v)||^2.
inline double grid_objective(const EquilibriumOperator& op, const FailureSpec& fail,
                             const ThetaPolynomial& theta, double v_max, const Vector& v) {
  return (v - op.baseline() + op.map() * smoothed_failure_vector(fail, theta, v_max, v))
      .squaredNorm();
}

inline std::set<std::size_t> pick_assets(std::size_t m, std::size_t count, std::uint64_t seed,
                                         std::set<std::size_t> chosen) {
  std::vector<std::size_t> pool;
  for (std::size_t k = 0; k < m; ++k)
    if (!chosen.count(k)) pool.push_back(k);
  if (count > pool.size())
    throw ParameterError("cannot zero " + std::to_string(count) + " more assets out of " +
                         std::to_string(pool.size()));
  Rng rng(seed);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t pick = t + rng.below(pool.size() - t);
    std::swap(pool[t], pool[pick]);
    chosen.insert(pool[t]);
  }
  return chosen;
}

}  // namespace detail

inline OrderedJson sample_set_json(const SampleSet& set, std::size_t max_samples = 20) {
  OrderedJson meta;
  meta["solver"] = set.metadata.solver;
  meta["seed"] = set.metadata.seed;
  meta["reads"] = set.metadata.reads;
  meta["iterations"] = set.metadata.iterations;
  for (const auto& [k, v] : set.metadata.extra) meta[k] = v;
  OrderedJson samples = OrderedJson::array();
  for (std::size_t s = 0; s < set.samples.size() && s < max_samples; ++s) {
    const auto& smp = set.samples[s];
    std::string bits;
    for (auto b : smp.assignment) bits += b ? '1' : '0';
    samples.push_back({{"energy", smp.energy}, {"occurrences", smp.occurrences},
                       {"source", smp.source}, {"bits", bits}});
  }
  return {{"metadata", meta},
          {"best", set.best},
          {"best_energy", set.best_energy()},
          {"distinct_samples", set.samples.size()},
          {"total_reads", set.total_reads()},
          {"samples", samples}};
}

/// Report header shared by every command.
inline OrderedJson run_header(const std::string& command, std::uint64_t seed,
                              const std::string& config_hash, bool normalize) {
  OrderedJson h;
  h["command"] = command;
  h["version"] = kVersion;
  h["seed"] = seed;
  h["config_hash"] = config_hash;
  if (!normalize) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    h["timestamp"] = buf;
  }
  return h;
}

inline PipelineResult run_pipeline(const PipelineConfig& cfg, bool normalize = false,
                                   const ArtifactSink& sink = {}) {
  if (auto errs = cfg.validate(); !errs.empty()) {
    std::string msg = "invalid pipeline configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ParameterError(msg);
  }
  auto emit = [&](const std::string& name, const std::string& content) {
    if (sink) sink(name, content);
  };
  PipelineResult res;
  OrderedJson& rep = res.report;
  rep["run"] = run_header("pipeline", cfg.seed, cfg.hash(), normalize);
  rep["config"] = cfg.to_json();

  res.network = detail::stage("network", [&] {
    FinancialNetwork net;
    if (cfg.network_file) {
      net = load_network(*cfg.network_file).network;
    } else {
      net = generate_random_network(cfg.n, cfg.m, cfg.price_min, cfg.price_max, cfg.network_seed);
      if (cfg.prices)
        net.prices = Eigen::Map<const Vector>(cfg.prices->data(),
                                              static_cast<Eigen::Index>(cfg.prices->size()));
    }
    if (auto bad = validate(net); !bad.empty())
      throw ParameterError(bad.front().invariant + ": " + bad.front().message);
    return net;
  });
  const std::size_t n = res.network.n_institutions();
  emit("network.json", network_to_json(res.network, nullptr));
  rep["network"] = OrderedJson::parse(network_to_json(res.network, nullptr));

  const MarketState before = detail::stage("failure_spec", [&] { return linear_equilibrium(res.network); });
  res.failure = detail::stage("failure_spec", [&] {
    return default_failure_spec(res.network, cfg.vc_fraction, cfg.beta_fraction);
  });
  rep["failure_spec"] = {{"vc_fraction", cfg.vc_fraction},
                         {"beta_fraction", cfg.beta_fraction},
                         {"critical_values", detail::to_std(res.failure.critical_values)},
                         {"failure_magnitudes", detail::to_std(res.failure.failure_magnitudes)}};
  rep["linear_equilibrium_before"] = {{"market_values", detail::to_std(before.market_values)},
                                      {"equity_values", detail::to_std(before.equity_values)}};

  const auto zeroed = detail::stage("perturbation", [&] {
    return detail::pick_assets(res.network.n_assets(), cfg.random_zeroed, cfg.perturb_seed,
                               cfg.zeroed_assets);
  });
  res.perturbed = detail::stage("perturbation", [&] { return perturb_prices(res.network, zeroed); });
  const MarketState after_linear =
      detail::stage("perturbation", [&] { return linear_equilibrium(res.perturbed); });
  rep["perturbation"] = {{"zeroed_assets", std::vector<std::size_t>(zeroed.begin(), zeroed.end())},
                         {"prices_before", detail::to_std(res.network.prices)},
                         {"prices_after", detail::to_std(res.perturbed.prices)}};
  rep["linear_equilibrium_after"] = {
      {"market_values", detail::to_std(after_linear.market_values)},
      {"equity_values", detail::to_std(after_linear.equity_values)}};
  emit("perturbed_network.json", network_to_json(res.perturbed, &res.failure));

  HuboStats hstats;
  const BinaryPolynomial hubo = detail::stage("hubo", [&] {
    return build_hubo(res.perturbed, res.failure, cfg.bits, cfg.degree, {}, &hstats);
  });
  rep["hubo_stats"] = {{"variables", hstats.num_variables},
                       {"terms", hubo.size()},
                       {"order_counts", hstats.order_counts},
                       {"degree", hubo.degree()},
                       {"pruned_terms", hstats.pruned_terms}};

  QuadratizeStats qstats;
  res.qubo = detail::stage("reduction", [&] {
    return quadratize(boolean_to_spin(hubo), cfg.quadratize, &qstats);
  });
  rep["reduction_stats"] = {
      {"logical", qstats.logical},
      {"ancillas", qstats.ancillas},
      {"couplers", qstats.couplers},
      {"linear_terms", qstats.linear_terms},
      {"reduced_terms", qstats.reduced_terms},
      {"fallbacks", qstats.fallbacks},
      {"qubo_side", res.qubo.size()},
      {"published_reference", {{"logical", 15}, {"ancillas", 8265}, {"couplers", 38790}}}};

  res.samples = detail::stage("solve", [&] {
    switch (cfg.solver) {
      case PipelineSolver::decompose: {
        DecomposeOptions d;
        d.subproblem_size = cfg.subproblem_size;
        d.subsolver = cfg.remote ? Subsolver::custom : cfg.subsolver;
        if (cfg.remote) d.custom = remote_subsolver(*cfg.remote, 1);
        d.max_iterations = cfg.max_iterations;
        d.reads = cfg.reads;
        d.seed = cfg.seed;
        d.threads = cfg.threads;
        return decompose_solve(res.qubo, d);
      }
      case PipelineSolver::anneal: {
        AnnealSchedule s = AnnealSchedule::defaults_for(res.qubo);
        s.reads = cfg.reads;
        return simulated_annealing(res.qubo, s, cfg.seed, {true, cfg.threads});
      }
      case PipelineSolver::tabu: {
        TabuOptions t;
        t.reads = cfg.reads;
        return tabu_solve(res.qubo, t, cfg.seed, {true, cfg.threads});
      }
      case PipelineSolver::exhaustive:
        return exhaustive_solve(res.qubo);
    }
    throw ParameterError("unknown solver");
  });
  auto solver_stats = sample_set_json(res.samples);
  if (!normalize) solver_stats["wall_time_seconds"] = res.samples.metadata.wall_time_seconds;
  rep["solver_stats"] = solver_stats;

  const EquilibriumOperator op_after(res.perturbed);
  const ThetaPolynomial theta = theta_coefficients(cfg.degree);
  const double v_max = cfg.bits.v_max();
  detail::stage("decode", [&] {
    const auto logical = static_cast<std::size_t>(n * static_cast<std::size_t>(cfg.bits.bits()));
    res.decoded = decode_market_values(cfg.bits, n, res.samples.best_sample().assignment);
    std::vector<VarId> lv(logical);
    for (std::size_t i = 0; i < logical; ++i) lv[i] = static_cast<VarId>(i);
    const auto maj = majority_vote(res.samples, std::span<const VarId>(lv));
    res.majority = decode_market_values(cfg.bits, n, maj);
    res.solver_objective = detail::grid_objective(op_after, res.failure, theta, v_max, res.decoded);
    return 0;
  });
  rep["decoded_equilibrium"] = {
      {"market_values", detail::to_std(res.decoded)},
      {"smoothed_objective", res.solver_objective},
      {"exact_objective", objective(res.perturbed, res.failure, res.decoded)},
      {"majority_vote", {{"market_values", detail::to_std(res.majority)},
                         {"smoothed_objective", detail::grid_objective(op_after, res.failure, theta,
                                                                       v_max, res.majority)}}}};

  const long double grid = std::pow(2.0L, static_cast<long double>(cfg.bits.bits()) * n);
  // the oracle scans integer grids only
  if (cfg.bits.alpha_min == 0 && grid <= static_cast<long double>(cfg.oracle_limit)) {
    const auto oracle = detail::stage("oracle", [&] {
      GridSearchOptions g;
      g.use_smoothed = true;
      g.degree = cfg.degree;
      g.max_evaluations = cfg.oracle_limit;
      return exhaustive_equilibrium(res.perturbed, res.failure, cfg.bits.bits(), g);
    });
    res.oracle_objective = oracle.best_objective;
    const double gap = res.solver_objective - oracle.best_objective;
    OrderedJson mins = OrderedJson::array();
    for (const auto& mz : oracle.minimizers) mins.push_back(detail::to_std(mz.market_values));
    rep["oracle"] = {{"evaluations", oracle.evaluations},
                     {"best_objective", oracle.best_objective},
                     {"minimizers", mins},
                     {"objective_gap", gap},
                     {"relative_gap", gap / std::max(1e-12, std::abs(oracle.best_objective))},
                     {"attains_optimum", gap <= 1e-9 * (1.0 + std::abs(oracle.best_objective))}};
  } else {
    rep["oracle"] = nullptr;
  }

  res.crash = detail::stage("crash_report", [&] {
    return crash_report(before.market_values, res.decoded, res.failure, after_linear.market_values);
  });
  rep["crash_report"] = {
      {"failed", std::vector<std::size_t>(res.crash.failed.begin(), res.crash.failed.end())},
      {"drops", detail::to_std(res.crash.drops)},
      {"relative_drops", detail::to_std(res.crash.relative_drops)},
      {"cascade", res.crash.cascade}};

  std::ostringstream csv;
  csv << "institution,v_before,v_linear_after,v_after,v_majority,v_critical,failed\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    csv << i << ',' << format_double(before.market_values[ii]) << ','
        << format_double(after_linear.market_values[ii]) << ',' << format_double(res.decoded[ii])
        << ',' << format_double(res.majority[ii]) << ','
        << format_double(res.failure.critical_values[ii]) << ','
        << (res.crash.failed.count(i) ? 1 : 0) << '\n';
  }
  res.csv = csv.str();
  emit("values.csv", res.csv);
  return res;
}

}  // namespace crashnet
