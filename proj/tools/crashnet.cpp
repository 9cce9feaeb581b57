// crashnet command-line front end.
//
//   crashnet generate    --n 10 --m 15 --seed 7 --out net.json
//   crashnet equilibrium --network net.json [--zero 2,4]
//   crashnet hubo        --network net.json --alpha-max 4 --r 3 [--zero 2,4]
//   crashnet reduce      --network net.json --r 3 --out problem.qubo
//   crashnet solve       --qubo problem.qubo --solver tabu --seed 1
//   crashnet estimate    --n 3 --bits 5 --r 3
//   crashnet pipeline    --n 3 --m 7 --random-zeroed 2 --out-dir run1
//
// Reports go to stdout (or --report FILE). Exit codes: 0 ok, 2 invalid
// input, 3 numeric failure, 4 resource limit, 5 remote sampler failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crashnet/crashnet.hpp"

namespace fs = std::filesystem;
using namespace crashnet;

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumeric = 3, kResource = 4, kRemote = 5 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parameter:
    case ErrorKind::parse: return kValidation;
    case ErrorKind::numeric:
    case ErrorKind::gadget: return kNumeric;
    case ErrorKind::resource: return kResource;
    case ErrorKind::remote: return kRemote;
  }
  return 1;
}

/// Collected flag problems, reported together.
struct Problems {
  std::vector<std::string> items;
  void check(bool ok, const std::string& msg) {
    if (!ok) items.push_back(msg);
  }
  void raise() const {
    if (items.empty()) return;
    std::string msg = "invalid arguments:";
    for (const auto& s : items) msg += "\n  " + s;
    throw ParameterError(msg);
  }
};

struct Common {
  std::uint64_t seed = 1;
  bool normalize = false;
  std::string report;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Random seed");
  app->add_flag("--normalize", c.normalize, "Omit timestamps and timings from the report");
  app->add_option("--report", c.report, "Write the report here instead of stdout");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open '" + path + "' for writing");
  out << text;
}

void emit_report(const Common& c, const OrderedJson& rep) {
  const std::string text = rep.dump(2) + "\n";
  if (c.report.empty()) std::cout << text;
  else write_text(c.report, text);
}

std::string hash_of(const OrderedJson& cfg) { return fnv1a_hex(cfg.dump()); }

OrderedJson vec_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

OrderedJson big_json(const BigInt& b) {
  if (b <= std::numeric_limits<std::uint64_t>::max()) return b.convert_to<std::uint64_t>();
  return b.str();
}

/// Network plus the failure spec and perturbation most commands share.
struct ProblemArgs {
  std::string network;
  double vc_fraction = 0.8;
  double beta_fraction = 0.3;
  std::vector<std::size_t> zero;
  int alpha_min = 0;
  int alpha_max = 4;
  int r = 0;

  void add(CLI::App* app, bool with_bits) {
    app->add_option("--network", network, "Network JSON file")->required();
    app->add_option("--vc-fraction", vc_fraction, "Critical value as a fraction of v before");
    app->add_option("--beta-fraction", beta_fraction, "Failure size as a fraction of V before");
    app->add_option("--zero", zero, "0-based asset indices whose price drops to zero")
        ->delimiter(',');
    if (with_bits) {
      app->add_option("--alpha-min", alpha_min, "Lowest encoded power of two");
      app->add_option("--alpha-max", alpha_max, "Highest encoded power of two");
      app->add_option("--r", r, "Odd smoothing degree; 0 selects the linear model");
    }
  }

  void check(Problems& p, bool with_bits) const {
    p.check(vc_fraction >= 0.0 && vc_fraction <= 1.0, "--vc-fraction must lie in [0, 1]");
    p.check(beta_fraction >= 0.0 && beta_fraction <= 1.0, "--beta-fraction must lie in [0, 1]");
    if (with_bits) {
      p.check(alpha_min >= 0 && alpha_min <= alpha_max && alpha_max < 52,
              "need 0 <= --alpha-min <= --alpha-max < 52");
      p.check(r == 0 || (r > 0 && r % 2 == 1), "--r must be 0 or a positive odd integer");
    }
  }

  OrderedJson to_json() const {
    return {{"network", network}, {"vc_fraction", vc_fraction}, {"beta_fraction", beta_fraction},
            {"zero", zero},       {"alpha_min", alpha_min},     {"alpha_max", alpha_max},
            {"r", r}};
  }
};

struct Loaded {
  FinancialNetwork before;
  FinancialNetwork after;
  FailureSpec failure;
};

Loaded load_problem(const ProblemArgs& a) {
  Loaded l;
  NetworkDocument doc = load_network(a.network);
  l.before = doc.network;
  l.failure = doc.failure ? *doc.failure
                          : default_failure_spec(l.before, a.vc_fraction, a.beta_fraction);
  l.after = perturb_prices(l.before, {a.zero.begin(), a.zero.end()});
  return l;
}

// generate ------------------------------------------------------------------

struct GenerateArgs {
  Common common;
  std::size_t n = 10;
  std::size_t m = 15;
  double price_min = 10.0;
  double price_max = 40.0;
  bool with_failure = false;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  Problems p;
  p.check(a.n >= 1, "--n must be >= 1");
  p.check(a.m >= 1, "--m must be >= 1");
  p.check(a.price_min >= 0.0 && a.price_min <= a.price_max, "need 0 <= --price-min <= --price-max");
  p.raise();
  const OrderedJson cfg = {{"n", a.n}, {"m", a.m}, {"price_min", a.price_min},
                           {"price_max", a.price_max}, {"seed", a.common.seed},
                           {"with_failure", a.with_failure}};
  const FinancialNetwork net = generate_random_network(a.n, a.m, a.price_min, a.price_max, a.common.seed);
  std::optional<FailureSpec> fail;
  if (a.with_failure) fail = default_failure_spec(net);
  const std::string doc = network_to_json(net, fail ? &*fail : nullptr);
  if (!a.out.empty()) write_text(a.out, doc);
  OrderedJson rep;
  rep["run"] = run_header("generate", a.common.seed, hash_of(cfg), a.common.normalize);
  rep["config"] = cfg;
  rep["violations"] = OrderedJson::array();
  for (const auto& v : validate(net)) rep["violations"].push_back(v.invariant + ": " + v.message);
  if (!a.out.empty()) rep["output"] = a.out;
  else rep["network"] = OrderedJson::parse(doc);
  emit_report(a.common, rep);
  return kOk;
}

// equilibrium ---------------------------------------------------------------

struct EquilibriumArgs {
  Common common;
  ProblemArgs problem;
  std::size_t max_iter = 1000;
  bool oracle = false;
};

int cmd_equilibrium(const EquilibriumArgs& a) {
  Problems p;
  a.problem.check(p, true);
  p.check(a.max_iter >= 1, "--max-iter must be >= 1");
  p.raise();
  OrderedJson cfg = a.problem.to_json();
  cfg["max_iter"] = a.max_iter;
  cfg["oracle"] = a.oracle;
  const Loaded l = load_problem(a.problem);
  const MarketState pre = linear_equilibrium(l.before);
  const MarketState post = linear_equilibrium(l.after);
  const CascadeResult cascade = cascade_iteration(l.after, l.failure, pre.market_values, a.max_iter);

  OrderedJson rep;
  rep["run"] = run_header("equilibrium", a.common.seed, hash_of(cfg), a.common.normalize);
  rep["config"] = cfg;
  rep["linear_before"] = {{"market_values", vec_json(pre.market_values)},
                          {"equity_values", vec_json(pre.equity_values)}};
  rep["linear_after"] = {{"market_values", vec_json(post.market_values)},
                         {"equity_values", vec_json(post.equity_values)}};
  rep["failure_spec"] = {{"critical_values", vec_json(l.failure.critical_values)},
                         {"failure_magnitudes", vec_json(l.failure.failure_magnitudes)}};
  rep["cascade"] = {{"market_values", vec_json(cascade.market_values)},
                    {"converged", cascade.converged},
                    {"steps", cascade.steps}};
  const CrashReport crash =
      crash_report(pre.market_values, cascade.market_values, l.failure, post.market_values);
  rep["crash_report"] = {{"failed", std::vector<std::size_t>(crash.failed.begin(), crash.failed.end())},
                         {"drops", vec_json(crash.drops)},
                         {"cascade", crash.cascade}};
  if (a.oracle) {
    if (a.problem.alpha_min != 0)
      throw ParameterError("--oracle scans integer grids; set --alpha-min 0");
    GridSearchOptions g;
    g.use_smoothed = a.problem.r > 0;
    if (g.use_smoothed) g.degree = a.problem.r;
    const auto ex = exhaustive_equilibrium(l.after, l.failure, a.problem.alpha_max + 1, g);
    OrderedJson mins = OrderedJson::array();
    for (const auto& mz : ex.minimizers) mins.push_back(vec_json(mz.market_values));
    rep["oracle"] = {{"smoothed", g.use_smoothed},
                     {"evaluations", ex.evaluations},
                     {"best_objective", ex.best_objective},
                     {"minimizers", mins}};
  }
  emit_report(a.common, rep);
  return kOk;
}

// hubo / reduce -------------------------------------------------------------

BinaryPolynomial hubo_for(const ProblemArgs& a, const Loaded& l, HuboStats& st) {
  const BitSpec spec{a.alpha_min, a.alpha_max};
  if (a.r == 0) return build_hubo(l.after, std::nullopt, spec, std::nullopt, {}, &st);
  return build_hubo(l.after, l.failure, spec, a.r, {}, &st);
}

OrderedJson hubo_stats_json(const BinaryPolynomial& h, const HuboStats& st) {
  return {{"variables", st.num_variables},
          {"terms", h.size()},
          {"order_counts", st.order_counts},
          {"degree", h.degree()},
          {"pruned_terms", st.pruned_terms}};
}

struct HuboArgs {
  Common common;
  ProblemArgs problem;
  std::string dump;
};

int cmd_hubo(const HuboArgs& a) {
  Problems p;
  a.problem.check(p, true);
  p.raise();
  const OrderedJson cfg = a.problem.to_json();
  const Loaded l = load_problem(a.problem);
  HuboStats st;
  const BinaryPolynomial h = hubo_for(a.problem, l, st);
  if (!a.dump.empty()) write_text(a.dump, h.dump());
  OrderedJson rep;
  rep["run"] = run_header("hubo", a.common.seed, hash_of(cfg), a.common.normalize);
  rep["config"] = cfg;
  rep["hubo_stats"] = hubo_stats_json(h, st);
  emit_report(a.common, rep);
  return kOk;
}

struct ReduceArgs {
  Common common;
  ProblemArgs problem;
  std::string out;
  double scale = 20.0;
  std::string scaling = "per_term";
  std::string strategy = "kbody";
};

int cmd_reduce(const ReduceArgs& a) {
  Problems p;
  a.problem.check(p, true);
  p.check(a.scale > 0.0, "--gadget-scale must be positive");
  p.check(a.scaling == "per_term" || a.scaling == "global", "--gadget-scaling is per_term or global");
  p.check(a.strategy == "kbody" || a.strategy == "single", "--strategy is kbody or single");
  p.raise();
  OrderedJson cfg = a.problem.to_json();
  cfg["gadget_scale"] = a.scale;
  cfg["gadget_scaling"] = a.scaling;
  cfg["strategy"] = a.strategy;
  const Loaded l = load_problem(a.problem);
  HuboStats hst;
  const BinaryPolynomial h = hubo_for(a.problem, l, hst);
  QuadratizeOptions qo;
  qo.scale_factor = a.scale;
  qo.scaling = a.scaling == "global" ? GadgetScaling::global : GadgetScaling::per_term;
  qo.strategy = a.strategy == "single" ? GadgetStrategy::single_ancilla_3body : GadgetStrategy::k_ancilla;
  QuadratizeStats qst;
  const Qubo q = quadratize(boolean_to_spin(h), qo, &qst);
  if (!a.out.empty()) write_qubo_file(q, a.out);
  OrderedJson rep;
  rep["run"] = run_header("reduce", a.common.seed, hash_of(cfg), a.common.normalize);
  rep["config"] = cfg;
  rep["hubo_stats"] = hubo_stats_json(h, hst);
  rep["reduction_stats"] = {{"logical", qst.logical},
                            {"ancillas", qst.ancillas},
                            {"couplers", qst.couplers},
                            {"linear_terms", qst.linear_terms},
                            {"reduced_terms", qst.reduced_terms},
                            {"fallbacks", qst.fallbacks},
                            {"qubo_side", q.size()}};
  if (!a.out.empty()) rep["output"] = a.out;
  emit_report(a.common, rep);
  return kOk;
}

// solve ---------------------------------------------------------------------

struct SolveArgs {
  Common common;
  std::string qubo;
  std::string solver = "tabu";
  std::size_t reads = 20;
  std::size_t sweeps = 1000;
  std::size_t tenure = 0;
  long long max_no_improve = -1;
  std::size_t subproblem_size = 50;
  std::size_t max_iterations = 200;
  std::string subsolver = "tabu";
  std::size_t threads = 1;
  bool raw = false;
  std::string remote_url;
  double timeout = 30.0;
  std::size_t retries = 2;
};

int cmd_solve(const SolveArgs& a) {
  Problems p;
  const std::set<std::string> solvers{"exhaustive", "anneal", "tabu", "decompose", "remote"};
  p.check(solvers.count(a.solver) != 0,
          "--solver must be one of exhaustive, anneal, tabu, decompose, remote");
  p.check(a.reads >= 1, "--reads must be >= 1");
  p.check(a.sweeps >= 1, "--sweeps must be >= 1");
  p.check(a.subproblem_size >= 2, "--subproblem-size must be >= 2");
  p.check(a.subsolver == "tabu" || a.subsolver == "anneal" || a.subsolver == "exhaustive" ||
              a.subsolver == "remote",
          "--subsolver must be tabu, anneal, exhaustive or remote");
  p.check(a.timeout > 0.0, "--timeout must be positive");
  std::optional<RemoteConfig> remote;
  if (a.solver == "remote" || a.subsolver == "remote") {
    if (!a.remote_url.empty()) remote = RemoteConfig{a.remote_url, a.timeout, a.retries};
    else remote = RemoteConfig::from_environment();
    p.check(remote.has_value(), std::string("remote sampling needs --remote-url or ") + kSamplerUrlEnv);
    if (remote) {
      remote->timeout_seconds = a.timeout;
      remote->retries = a.retries;
    }
  }
  p.raise();

  const Qubo q = read_qubo_file(a.qubo);
  OrderedJson cfg = {{"qubo", a.qubo},       {"solver", a.solver},
                     {"reads", a.reads},     {"sweeps", a.sweeps},
                     {"tenure", a.tenure},   {"max_no_improve", a.max_no_improve},
                     {"subproblem_size", a.subproblem_size},
                     {"max_iterations", a.max_iterations},
                     {"subsolver", a.subsolver}, {"eliminate_ancillas", !a.raw}};
  const LocalSearchOptions local{!a.raw, a.threads};
  TabuOptions tabu;
  tabu.tenure = a.tenure;
  if (a.max_no_improve >= 0) tabu.max_no_improve = static_cast<std::size_t>(a.max_no_improve);

  SampleSet set;
  if (a.solver == "exhaustive") {
    ExhaustiveSolveOptions eo;
    eo.eliminate_ancillas = !a.raw;
    set = exhaustive_solve(q, eo);
  } else if (a.solver == "anneal") {
    AnnealSchedule s = AnnealSchedule::defaults_for(q);
    s.reads = a.reads;
    s.sweeps = a.sweeps;
    set = simulated_annealing(q, s, a.common.seed, local);
  } else if (a.solver == "tabu") {
    tabu.reads = a.reads;
    set = tabu_solve(q, tabu, a.common.seed, local);
  } else if (a.solver == "remote") {
    set = remote_sample(*remote, q, a.reads);
  } else {
    DecomposeOptions d;
    d.subproblem_size = a.subproblem_size;
    d.max_iterations = a.max_iterations;
    d.reads = a.reads;
    d.seed = a.common.seed;
    d.eliminate_ancillas = !a.raw;
    d.threads = a.threads;
    d.tabu = tabu;
    d.tabu.reads = 1;
    if (a.subsolver == "remote") {
      d.subsolver = Subsolver::custom;
      d.custom = remote_subsolver(*remote, 1);
    } else {
      d.subsolver = a.subsolver == "exhaustive" ? Subsolver::exhaustive
                    : a.subsolver == "anneal"   ? Subsolver::anneal
                                                : Subsolver::tabu;
    }
    set = decompose_solve(q, d);
  }

  OrderedJson rep;
  rep["run"] = run_header("solve", a.common.seed, hash_of(cfg), a.common.normalize);
  rep["config"] = cfg;
  rep["problem"] = {{"size", q.size()}, {"ancillas", q.ancillas().size()},
                    {"couplers", q.quadratic().size()}, {"offset", q.offset()}};
  OrderedJson ss = sample_set_json(set, 100);
  if (!a.common.normalize) ss["wall_time_seconds"] = set.metadata.wall_time_seconds;
  rep["sample_set"] = ss;
  emit_report(a.common, rep);
  return kOk;
}

// estimate ------------------------------------------------------------------

struct EstimateArgs {
  Common common;
  std::uint64_t n = 3;
  std::uint64_t bits = 5;
  std::uint64_t r = 3;
  std::optional<std::uint64_t> side;
};

int cmd_estimate(const EstimateArgs& a) {
  Problems p;
  p.check(a.n >= 1, "--n must be >= 1");
  p.check(a.bits >= 1, "--bits must be >= 1");
  p.check(a.r == 0 || a.r % 2 == 1, "--r must be 0 or odd");
  p.raise();
  OrderedJson cfg = {{"n", a.n}, {"bits", a.bits}, {"r", a.r}};
  if (a.side) cfg["side"] = *a.side;
  const ResourceEstimate e = estimate_resources(a.n, a.bits, a.r);
  OrderedJson rep;
  rep["run"] = run_header("estimate", a.common.seed, hash_of(cfg), a.common.normalize);
  rep["config"] = cfg;
  rep["estimate"] = {{"logical_variables", big_json(e.logical_variables)},
                     {"max_terms", big_json(e.max_terms)},
                     {"max_ancillas", big_json(e.max_ancillas)},
                     {"qubo_side_bound", big_json(e.qubo_side_bound)},
                     {"memory_bytes", big_json(e.memory_bytes)}};
  if (a.side) {
    const BigInt bytes = qubo_memory_bytes(*a.side);
    rep["memory_for_side"] = {{"side", *a.side},
                              {"bytes", big_json(bytes)},
                              {"terabytes", bytes.convert_to<double>() / 1e12}};
  }
  emit_report(a.common, rep);
  return kOk;
}

// pipeline ------------------------------------------------------------------

struct PipelineArgs {
  Common common;
  PipelineConfig cfg;
  std::string network;
  std::vector<double> prices;
  std::vector<std::size_t> zero;
  std::string solver = "decompose";
  std::string subsolver = "tabu";
  std::string out_dir;
  std::string remote_url;
  bool use_remote = false;
  std::string scaling = "per_term";
  std::string strategy = "kbody";
};

int cmd_pipeline(PipelineArgs& a) {
  PipelineConfig& c = a.cfg;
  Problems p;
  if (!a.network.empty()) c.network_file = a.network;
  if (!a.prices.empty()) c.prices = a.prices;
  c.zeroed_assets = {a.zero.begin(), a.zero.end()};
  c.seed = a.common.seed;
  try {
    c.solver = parse_pipeline_solver(a.solver);
  } catch (const Error& e) {
    p.items.push_back(e.what());
  }
  p.check(a.subsolver == "tabu" || a.subsolver == "anneal" || a.subsolver == "exhaustive",
          "--subsolver must be tabu, anneal or exhaustive");
  c.subsolver = a.subsolver == "exhaustive" ? Subsolver::exhaustive
                : a.subsolver == "anneal"   ? Subsolver::anneal
                                            : Subsolver::tabu;
  p.check(a.scaling == "per_term" || a.scaling == "global", "--gadget-scaling is per_term or global");
  p.check(a.strategy == "kbody" || a.strategy == "single", "--strategy is kbody or single");
  c.quadratize.scaling = a.scaling == "global" ? GadgetScaling::global : GadgetScaling::per_term;
  c.quadratize.strategy =
      a.strategy == "single" ? GadgetStrategy::single_ancilla_3body : GadgetStrategy::k_ancilla;
  if (a.use_remote || !a.remote_url.empty()) {
    if (!a.remote_url.empty()) c.remote = RemoteConfig{a.remote_url};
    else c.remote = RemoteConfig::from_environment();
    p.check(c.remote.has_value(), std::string("--remote needs --remote-url or ") + kSamplerUrlEnv);
  }
  for (const auto& e : c.validate()) p.items.push_back(e);
  p.raise();

  ArtifactSink sink;
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    sink = [&](const std::string& name, const std::string& content) {
      write_text((fs::path(a.out_dir) / name).string(), content);
    };
  }
  const PipelineResult res = run_pipeline(c, a.common.normalize, sink);
  const std::string text = res.report.dump(2) + "\n";
  if (!a.out_dir.empty()) write_text((fs::path(a.out_dir) / "report.json").string(), text);
  emit_report(a.common, res.report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crashnet: financial crash prediction on cross-holding networks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a random network");
  add_common(g, gen.common);
  g->add_option("--n", gen.n, "Institutions");
  g->add_option("--m", gen.m, "Assets");
  g->add_option("--price-min", gen.price_min, "Lowest price");
  g->add_option("--price-max", gen.price_max, "Highest price");
  g->add_flag("--with-failure", gen.with_failure, "Attach the default failure spec");
  g->add_option("--out", gen.out, "Network JSON output file");

  EquilibriumArgs eq;
  auto* e = app.add_subcommand("equilibrium", "Linear equilibrium, cascade and grid oracle");
  add_common(e, eq.common);
  eq.problem.add(e, true);
  e->add_option("--max-iter", eq.max_iter, "Cascade iteration cap");
  e->add_flag("--oracle", eq.oracle, "Scan the full integer grid");

  HuboArgs hu;
  auto* h = app.add_subcommand("hubo", "Build the binary objective polynomial");
  add_common(h, hu.common);
  hu.problem.add(h, true);
  h->add_option("--dump", hu.dump, "Write all terms to this file");

  ReduceArgs rd;
  auto* r = app.add_subcommand("reduce", "Quadratize the objective into a .qubo file");
  add_common(r, rd.common);
  rd.problem.add(r, true);
  r->add_option("--out", rd.out, ".qubo output file");
  r->add_option("--gadget-scale", rd.scale, "J^a = scale |J_k|, q0 = scale/2 |J_k|");
  r->add_option("--gadget-scaling", rd.scaling, "per_term or global");
  r->add_option("--strategy", rd.strategy, "kbody or single (one ancilla for 3-body terms)");

  SolveArgs sv;
  auto* s = app.add_subcommand("solve", "Minimize a .qubo file");
  add_common(s, sv.common);
  s->add_option("--qubo", sv.qubo, ".qubo input file")->required();
  s->add_option("--solver", sv.solver, "exhaustive, anneal, tabu, decompose or remote");
  s->add_option("--reads", sv.reads, "Independent reads");
  s->add_option("--sweeps", sv.sweeps, "Annealing sweeps");
  s->add_option("--tenure", sv.tenure, "Tabu tenure (0 = automatic)");
  s->add_option("--max-no-improve", sv.max_no_improve, "Tabu budget (-1 = automatic)");
  s->add_option("--subproblem-size", sv.subproblem_size, "Decomposition chunk size");
  s->add_option("--max-iterations", sv.max_iterations, "Sub-solves per decomposition read");
  s->add_option("--subsolver", sv.subsolver, "tabu, anneal, exhaustive or remote");
  s->add_option("--threads", sv.threads, "Worker threads for reads");
  s->add_flag("--raw", sv.raw, "Search ancillas too instead of eliminating them");
  s->add_option("--remote-url", sv.remote_url, "Sampler endpoint, e.g. http://127.0.0.1:8080");
  s->add_option("--timeout", sv.timeout, "Remote timeout in seconds");
  s->add_option("--retries", sv.retries, "Remote retries after transport failure");

  EstimateArgs es;
  auto* est = app.add_subcommand("estimate", "Upper bounds on terms, ancillas and memory");
  add_common(est, es.common);
  est->add_option("--n", es.n, "Institutions");
  est->add_option("--bits", es.bits, "Bits per institution");
  est->add_option("--r", es.r, "Smoothing degree");
  est->add_option("--side", es.side, "Also report dense memory for this QUBO side");

  PipelineArgs pl;
  auto* pp = app.add_subcommand("pipeline", "Full crash prediction run");
  add_common(pp, pl.common);
  pp->add_option("--network", pl.network, "Network JSON file (otherwise generated)");
  pp->add_option("--n", pl.cfg.n, "Institutions when generating");
  pp->add_option("--m", pl.cfg.m, "Assets when generating");
  pp->add_option("--price-min", pl.cfg.price_min, "Lowest generated price");
  pp->add_option("--price-max", pl.cfg.price_max, "Highest generated price");
  pp->add_option("--network-seed", pl.cfg.network_seed, "Generator seed");
  pp->add_option("--prices", pl.prices, "Explicit prices for the generated network")->delimiter(',');
  pp->add_option("--vc-fraction", pl.cfg.vc_fraction, "Critical value fraction");
  pp->add_option("--beta-fraction", pl.cfg.beta_fraction, "Failure size fraction");
  pp->add_option("--alpha-min", pl.cfg.bits.alpha_min, "Lowest encoded power of two");
  pp->add_option("--alpha-max", pl.cfg.bits.alpha_max, "Highest encoded power of two");
  pp->add_option("--r", pl.cfg.degree, "Odd smoothing degree");
  pp->add_option("--zero", pl.zero, "0-based asset indices to zero")->delimiter(',');
  pp->add_option("--random-zeroed", pl.cfg.random_zeroed, "Further random assets to zero");
  pp->add_option("--perturb-seed", pl.cfg.perturb_seed, "Seed for the random asset choice");
  pp->add_option("--solver", pl.solver, "decompose, anneal, tabu or exhaustive");
  pp->add_option("--subsolver", pl.subsolver, "tabu, anneal or exhaustive");
  pp->add_option("--reads", pl.cfg.reads, "Reads");
  pp->add_option("--subproblem-size", pl.cfg.subproblem_size, "Decomposition chunk size");
  pp->add_option("--max-iterations", pl.cfg.max_iterations, "Sub-solves per read");
  pp->add_option("--threads", pl.cfg.threads, "Worker threads for reads");
  pp->add_option("--gadget-scale", pl.cfg.quadratize.scale_factor, "Gadget scale factor");
  pp->add_option("--gadget-scaling", pl.scaling, "per_term or global");
  pp->add_option("--strategy", pl.strategy, "kbody or single");
  pp->add_option("--oracle-limit", pl.cfg.oracle_limit, "Largest grid the oracle scans");
  pp->add_flag("--remote", pl.use_remote, "Send decomposition subproblems to the remote sampler");
  pp->add_option("--remote-url", pl.remote_url, "Sampler endpoint");
  pp->add_option("--out-dir", pl.out_dir, "Directory for report.json, values.csv and networks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*e) return cmd_equilibrium(eq);
    if (*h) return cmd_hubo(hu);
    if (*r) return cmd_reduce(rd);
    if (*s) return cmd_solve(sv);
    if (*est) return cmd_estimate(es);
    if (*pp) return cmd_pipeline(pl);
  } catch (const Error& err) {
    std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
    return exit_code(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return kValidation;
}
