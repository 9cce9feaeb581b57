// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Oracles are plain loops written here, not library calls.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "crashnet/crashnet.hpp"

using namespace crashnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<std::uint8_t> bits_of(std::uint64_t mask, std::size_t n) {
  std::vector<std::uint8_t> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1u;
  return x;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome linear_structure() {
  const auto net = generate_random_network(10, 15, 10.0, 40.0, 7);
  HuboStats st;
  const auto p = build_hubo(net, std::nullopt, BitSpec{0, 6}, std::nullopt, {}, &st);
  std::size_t higher = 0;
  for (std::size_t k = 3; k < st.order_counts.size(); ++k) higher += st.order_counts[k];
  const std::size_t quad = st.order_counts.size() > 2 ? st.order_counts[2] : 0;
  const Qubo q = qubo_from_polynomial(p);
  const bool ok = st.num_variables == 70 && quad == 210 && higher == 0 && q.size() == 70 &&
                  q.quadratic().size() == 210;
  return {ok, fmt("%g variables, %g quadratic terms, %g higher-order terms",
                  double(st.num_variables), double(quad), double(higher))};
}

Outcome linear_correctness() {
  const BitSpec spec{0, 6};
  double worst = 0.0;
  bool ok = true;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 10;
    const auto net = generate_random_network(n, 10, 1.0, 20.0, 100 + t);
    const Qubo q = qubo_from_polynomial(build_hubo(net, std::nullopt, spec));
    const Vector u = linear_equilibrium(net).market_values;
    std::vector<std::uint8_t> zeros(q.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<VarId> chunk;
      for (int b = 0; b < spec.bits(); ++b) chunk.push_back(hubo_variable(spec, i, b));
      const auto sub = induced_subqubo(q, chunk, zeros, false);
      const auto best = exhaustive_solve(sub.qubo).best_sample().assignment;
      const double v = decode_bits(spec, best);
      const double target = std::clamp(std::round(u[static_cast<Eigen::Index>(i)]), 0.0, spec.v_max());
      worst = std::max(worst, std::abs(v - target));
      if (std::abs(v - target) > 1.0) ok = false;
    }
  }
  return {ok, fmt("20 networks, largest deviation from the rounded equilibrium %g", worst)};
}

Outcome gadget_certification() {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::size_t passed = 0, total = 0;
  double spread = 0.0;
  for (std::size_t k = 3; k <= 6; ++k) {
    Monomial vars;
    for (std::size_t i = 0; i < k; ++i) vars.push_back(static_cast<VarId>(i));
    for (int s = 0; s < 50; ++s) {
      const double jk = u(g);
      ++total;
      try {
        const auto gad = reduce_kbody_term(vars, jk, GadgetParams{20 * std::abs(jk), 10 * std::abs(jk)},
                                           static_cast<VarId>(k));
        // residual min_a E(l, a) - J_k prod(l) must be the same for every l
        double lo = 1e300, hi = -1e300;
        for (std::uint64_t l = 0; l < (1u << k); ++l) {
          double best = 1e300;
          for (std::uint64_t a = 0; a < (1u << k); ++a)
            best = std::min(best, gad.terms.evaluate(bits_of(l | (a << k), 2 * k)));
          double prod = jk;
          for (std::size_t i = 0; i < k; ++i) prod *= ((l >> i) & 1) ? 1.0 : -1.0;
          lo = std::min(lo, best - prod);
          hi = std::max(hi, best - prod);
        }
        spread = std::max(spread, hi - lo);
        const bool lib = verify_gadget(gad.logical, gad.ancillas, gad.terms, jk).passed;
        if (lib && hi - lo <= 1e-9 * std::max(1.0, std::abs(jk))) ++passed;
      } catch (const Error&) {
      }
    }
  }
  return {passed == total, fmt("%g/%g gadgets certified, largest residual spread %.3g",
                               double(passed), double(total), spread)};
}

Outcome ground_states() {
  std::mt19937_64 g(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::size_t matched = 0;
  std::size_t max_ancillas = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t) % 5;
    BinaryPolynomial hubo(n);
    for (int term = 0; term < 8; ++term) {
      Monomial m;
      for (std::size_t i = 0; i < n; ++i)
        if (g() % 2) m.push_back(static_cast<VarId>(i));
      while (m.size() > 4) m.erase(m.begin() + static_cast<std::ptrdiff_t>(g() % m.size()));
      hubo.add_term(m, u(g));
    }
    const Qubo q = quadratize(boolean_to_spin(hubo));
    max_ancillas = std::max(max_ancillas, q.ancillas().size());
    bool coupled_ancillas = false;
    for (const auto& [ij, w] : q.quadratic()) coupled_ancillas |= ij.first >= n && ij.second >= n;
    if (coupled_ancillas) continue;

    // minimum over ancillas in closed form: each contributes min(0, its field)
    std::vector<double> reduced(std::size_t{1} << n), original(std::size_t{1} << n);
    for (std::uint64_t l = 0; l < reduced.size(); ++l) {
      std::vector<std::uint8_t> x(q.size(), 0);
      for (std::size_t i = 0; i < n; ++i) x[i] = (l >> i) & 1u;
      std::vector<double> field(q.size(), 0.0);
      double e = q.offset();
      for (std::size_t i = 0; i < n; ++i) e += q.linear()[i] * x[i];
      for (std::size_t a = n; a < q.size(); ++a) field[a] = q.linear()[a];
      for (const auto& [ij, w] : q.quadratic()) {
        const auto [i, j] = ij;
        if (i < n && j < n) e += w * x[i] * x[j];
        else if (i < n) field[j] += w * x[i];
        else field[i] += w * x[j];
      }
      for (std::size_t a = n; a < q.size(); ++a) e += std::min(0.0, field[a]);
      reduced[l] = e;
      original[l] = hubo.evaluate(bits_of(l, n));
    }
    const double rmin = *std::min_element(reduced.begin(), reduced.end());
    const double omin = *std::min_element(original.begin(), original.end());
    const double tol = 1e-9 * (1 + std::abs(omin));
    bool same = std::abs(rmin - omin) <= tol;
    for (std::size_t l = 0; l < reduced.size(); ++l)
      same = same && ((reduced[l] <= rmin + tol) == (original[l] <= omin + tol));
    const auto lib = exhaustive_solve(q).best_sample().assignment;
    std::uint64_t lm = 0;
    for (std::size_t i = 0; i < n; ++i) lm |= std::uint64_t{lib[i]} << i;
    same = same && original[lm] <= omin + tol;
    if (same) ++matched;
  }
  return {matched == 100, fmt("%g/100 argmin sets preserved (up to %g ancillas)", double(matched),
                              double(max_ancillas))};
}

Outcome nonlinear_pipeline() {
  std::size_t exact = 0, close = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PipelineConfig c;
    c.network_seed = seed;
    c.prices = std::vector<double>{8.43, 14.47, 6.75, 8.09, 19.11, 11.32, 7.19};
    c.random_zeroed = 2;
    c.perturb_seed = seed;
    c.seed = seed;
    c.reads = 20;
    const auto res = run_pipeline(c, true);
    const double oracle = *res.oracle_objective;
    const double gap = res.solver_objective - oracle;
    const double rel = gap / std::max(1e-12, std::abs(oracle));
    worst = std::max(worst, rel);
    if (gap <= 1e-9 * (1 + std::abs(oracle))) ++exact;
    else if (rel <= 0.02) ++close;
  }
  return {exact >= 18 && exact + close == 20,
          fmt("%g/20 instances at the oracle optimum, %g more within 2%%, worst relative gap %.3g",
              double(exact), double(close), worst)};
}

Outcome resources() {
  const auto e = estimate_resources(3, 5, 3);
  const double mem = qubo_memory_bytes(872760).convert_to<double>();
  const bool ok = e.max_terms == 9949 && std::abs(mem / 6.09e12 - 1.0) <= 0.02;

  FinancialNetwork shaped = generate_random_network(3, 7, 10, 40, 1);
  shaped.prices << 8.43, 14.47, 6.75, 8.09, 19.11, 11.32, 7.19;
  const auto fail = default_failure_spec(shaped, 0.8, 0.3);
  QuadratizeStats st;
  quadratize(boolean_to_spin(build_hubo(shaped, fail, BitSpec{0, 4}, 3)), {}, &st);
  std::printf("  reduction of the n=3 instance: %zu logical, %zu ancillas, %zu couplers "
              "(published: 15 logical, 8265 ancillas, 38790 couplers)\n",
              st.logical, st.ancillas, st.couplers);
  return {ok, "max_terms " + e.max_terms.str() + fmt(", memory for side 872760: %.4g bytes", mem)};
}

Outcome smoothing() {
  bool ok = true;
  const auto t3 = theta_coefficients(3);
  ok = ok && t3.coefficients.at(1) == 0.5 && t3.coefficients.at(3) == -0.125;
  for (int r = 1; r <= 15; r += 2) ok = ok && smoothed_theta(theta_coefficients(r), 0.0) == 0.5;
  std::vector<double> err;
  for (int r : {3, 7, 11, 15}) {
    const auto tp = theta_coefficients(r);
    double worst = 0.0;
    for (int k = 200; k <= 1000; ++k) {
      const double x = k * 1e-3;
      worst = std::max(worst, std::abs(smoothed_theta(tp, x) - 1.0));
      worst = std::max(worst, std::abs(smoothed_theta(tp, -x)));
    }
    err.push_back(worst);
  }
  for (std::size_t i = 1; i < err.size(); ++i) ok = ok && err[i] <= err[i - 1];
  std::ostringstream os;
  os << "c1 = 1/2, c3 = -1/8; max error off the jump for r = 3, 7, 11, 15:";
  for (double e : err) os << ' ' << fmt("%.4g", e);
  return {ok, os.str()};
}

Outcome format_fidelity() {
  std::ifstream in(CRASHNET_TEST_DATA "/two_variable.qubo", std::ios::binary);
  std::ostringstream golden;
  golden << in.rdbuf();
  bool ok = !golden.str().empty() && write_qubo_string(read_qubo_string(golden.str())) == golden.str();

  const auto net = generate_random_network(10, 15, 10, 40, 7);
  const Qubo linear = qubo_from_polynomial(build_hubo(net, std::nullopt, BitSpec{0, 6}));
  const std::string text = write_qubo_string(linear);
  const Qubo back = read_qubo_string(text);
  ok = ok && back == linear && write_qubo_string(back) == text && back.size() == 70;

  auto sampler = [](const Qubo& p, std::size_t reads) {
    AnnealSchedule s = AnnealSchedule::defaults_for(p);
    s.reads = reads;
    return simulated_annealing(p, s, 5);
  };
  httplib::Server server;
  mount_sampler(server, sampler);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  bool same = false;
  try {
    RemoteConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
    const auto remote = remote_sample(cfg, linear, 10);
    const auto local = sampler(linear, 10);
    same = remote.samples.size() == local.samples.size();
    for (std::size_t i = 0; same && i < local.samples.size(); ++i)
      same = remote.samples[i].assignment == local.samples[i].assignment &&
             remote.samples[i].occurrences == local.samples[i].occurrences &&
             std::abs(remote.samples[i].energy - local.samples[i].energy) <= 1e-9;
  } catch (const Error& e) {
    std::printf("  remote: %s\n", e.what());
  }
  server.stop();
  th.join();
  return {ok && same, std::string("golden and 70-variable round trips ") + (ok ? "exact" : "differ") +
                          ", loopback samples " + (same ? "identical" : "differ")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria = {
      {"linear model structure", linear_structure, 1},
      {"linear model correctness", linear_correctness, 10},
      {"gadget certification", gadget_certification, 5},
      {"ground-state preservation", ground_states, 30},
      {"nonlinear pipeline vs oracle", nonlinear_pipeline, 600},
      {"resource accounting", resources, 60},
      {"Legendre smoothing", smoothing, 1},
      {"format fidelity", format_fidelity, 60},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %zu %s: %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(),
                secs, in_time ? "" : fmt(", budget %g s", c.budget_seconds).c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
