// Acceptance gate: every release-blocking numerical claim, one line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gdesc/descent.hpp"
#include "gdesc/dictionary.hpp"
#include "gdesc/greedy.hpp"
#include "gdesc/random.hpp"
#include "gdesc/spaces.hpp"
#include "gdesc/verify.hpp"

using namespace gdesc;

namespace {

struct Criterion {
  std::string name;
  double cap_seconds;
  std::function<bool(std::string&)> check;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

SuiteReport run_suite(SuiteName name) {
  SuiteOptions opt;
  opt.seed = 7777;
  return run_theorem_suite(name, opt);
}

bool within(double value, double target, double tol) {
  return std::abs(value - target) <= tol;
}

// 1. brute-force and multistart beta of the coordinate basis
bool crit_beta_canonical(std::string& detail) {
  bool ok = true;
  char buf[256];

  auto d2 = beta_bruteforce(build_canonical(SmoothSpace::lp(2, 2.0)),
                            1'000'000);
  ok = ok && within(d2.upper, std::sqrt(0.5), 1e-4);
  auto d3 = beta_bruteforce(build_canonical(SmoothSpace::lp(3, 2.0)),
                            1'000'000);
  ok = ok && within(d3.upper, 1.0 / std::sqrt(3.0), 1e-3);
  std::snprintf(buf, sizeof(buf), "grid d2 err %.2e, d3 err %.2e",
                std::abs(d2.upper - std::sqrt(0.5)),
                std::abs(d3.upper - 1.0 / std::sqrt(3.0)));
  detail = buf;

  for (int d : {4, 16, 64}) {
    auto est = beta_upper(build_canonical(SmoothSpace::lp(d, 2.0)), 64, 12345);
    double err = std::abs(est.upper - 1.0 / std::sqrt(double(d)));
    ok = ok && err <= 1e-3;
    std::snprintf(buf, sizeof(buf), "; d%d err %.2e", d, err);
    detail += buf;
  }
  return ok;
}

// 2. certified exponential envelope on the canonical plane
bool crit_exponential_envelope(std::string& detail) {
  auto rep = run_suite(SuiteName::eq_2_6);
  double worst = 0.0;
  for (const auto& seed : rep.metrics.at("per_seed"))
    for (const char* algo : {"woga", "wcga"})
      worst = std::max(worst, seed.at(algo).at("worst_ratio").get<double>());
  char buf[120];
  std::snprintf(buf, sizeof(buf), "factor %.6g, worst envelope ratio %.3f",
                rep.metrics.at("factor").get<double>(), worst);
  detail = buf;
  return rep.pass;
}

// shared run for criteria 3 and 4
const SuiteReport& t1_1_report() {
  static SuiteReport rep = run_suite(SuiteName::T1_1);
  return rep;
}

bool crit_rate_clean(std::string& detail) {
  const auto& counts = t1_1_report().metrics.at("rate_pass_counts");
  bool ok = true;
  for (const char* algo : {"wcga", "wgafr", "woga"})
    ok = ok && counts.at(algo).get<int>() >= 8;
  detail = "rate passes per algorithm " + counts.dump();
  return ok;
}

bool crit_rate_noise(std::string& detail) {
  const auto& counts = t1_1_report().metrics.at("noise_pass_counts");
  bool ok = true;
  for (const char* algo : {"wcga", "wgafr", "woga"})
    ok = ok && counts.at(algo).get<int>() >= 8;
  detail = "noise plateaus per algorithm " + counts.dump();
  return ok;
}

// 5. residual algorithm and its energy recast coincide
bool crit_equivalence(std::string& detail) {
  auto rep = run_suite(SuiteName::sec_3_1_equiv);
  detail = "identical " + rep.metrics.at("identical_count").dump() + "/" +
           std::to_string(rep.metrics.at("per_trial").size()) +
           ", worst gap diff " +
           rep.metrics.at("max_energy_gap_diff").dump();
  return rep.pass;
}

// 6. energy-gap decay rate for the convex variants
bool crit_energy_rate(std::string& detail) {
  auto rep = run_suite(SuiteName::T1_2);
  detail = "gap-rate passes " + rep.metrics.at("rate_pass_counts").dump();
  return rep.pass;
}

// 7. atomic-norm radius times beta brackets one
bool crit_r1_beta(std::string& detail) {
  auto rep = run_suite(SuiteName::T3_3);
  double worst_width = 0.0;
  for (const auto& entry : rep.metrics.at("per_dictionary"))
    worst_width = std::max(worst_width, entry.at("width").get<double>());
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%zu dictionaries, worst bracket width %.2e",
                rep.metrics.at("per_dictionary").size(), worst_width);
  detail = buf;
  return rep.pass;
}

// 8. covering -> beta and beta -> covering round trips
bool crit_covering_roundtrip(std::string& detail) {
  auto a = run_suite(SuiteName::lemma_2_1);
  auto b = run_suite(SuiteName::lemma_2_2);
  detail = "covering->beta pass " + std::to_string(a.pass) +
           ", beta->covering pass " + std::to_string(b.pass);
  return a.pass && b.pass;
}

// 9. cardinality bound never contradicts brute force
bool crit_cardinality(std::string& detail) {
  auto rep = run_suite(SuiteName::T2_4);
  detail = "vacuous " + rep.metrics.at("vacuous_count").dump() +
           ", checked " + rep.metrics.at("checked_count").dump() +
           ", max beta_upper " + rep.metrics.at("max_beta_upper").dump();
  return rep.pass;
}

// 10. dual-based expansion: convergence, per-step certificate, budget
bool crit_dual_expansion(std::string& detail) {
  bool ok = true;
  int converged = 0;
  double worst_gap = -1e300;
  auto sp8 = SmoothSpace::lp(8, 2.0);
  GreedyConfig cfg;
  cfg.t = 1.0;
  cfg.b = 0.5;
  cfg.max_iter = 10'000;
  cfg.stop_norm = 1e-3;

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto dict = build_random_sphere(sp8, 32, 9000 + seed);
    auto rng = make_rng(9100 + seed);
    Vector f0 = random_gaussian(8, rng);
    auto res = run_dga(f0, dict, sp8, cfg);
    double n0 = f0.norm();
    double fin = res.trace.rows.empty() ? n0
                                        : res.trace.rows.back().residual_norm;
    if (fin <= 1e-3 * n0) ++converged;

    double prev = n0;
    for (const auto& st : res.steps) {
      double lhs = cfg.t * (1.0 - cfg.b) * st.coefficient * st.correlation;
      double rhs = prev - st.residual_norm + 1e-10;
      worst_gap = std::max(worst_gap, lhs - rhs);
      if (lhs > rhs) ok = false;
      prev = st.residual_norm;
    }
  }
  ok = ok && converged == 20;

  // coefficient budget on the canonical plane
  auto sp2 = SmoothSpace::lp(2, 2.0);
  auto canon = build_canonical(sp2);
  GreedyConfig cfg2 = cfg;
  cfg2.max_iter = 100'000;
  cfg2.stop_norm = 1e-10;
  double worst_budget = -1e300;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto rng = make_rng(9500 + seed);
    Vector f0 = random_gaussian(2, rng);
    auto res = run_dga(f0, canon, sp2, cfg2);
    double cap = f0.norm() * std::sqrt(2.0) / (cfg2.t * (1.0 - cfg2.b));
    worst_budget = std::max(worst_budget, res.coefficient_sum - cap);
    if (res.coefficient_sum > cap + 1e-6) ok = false;
  }

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "converged %d/20, worst step excess %.1e, worst budget "
                "excess %.1e",
                converged, worst_gap, worst_budget);
  detail = buf;
  return ok;
}

// 11. near-orthogonal recovery of exactly sparse targets
bool crit_sparse_recovery(std::string& detail) {
  auto rep = run_suite(SuiteName::eq_2_8);
  detail = "packing " + rep.metrics.at("atoms").dump() + " atoms at mu " +
           rep.metrics.at("coherence").dump();
  return rep.pass;
}

// 12. analytic identities behind everything else
bool crit_self_checks(std::string& detail) {
  bool ok = true;
  double worst_pairing = 0.0, worst_dual = 0.0, worst_fd = 0.0;

  auto rng = make_rng(31337);
  for (double p : {1.5, 2.0, 3.0, 7.5}) {
    auto sp = SmoothSpace::lp(6, p);
    for (int trial = 0; trial < 50; ++trial) {
      Vector f = random_gaussian(6, rng);
      if (sp.norm(f) < 0.05) continue;
      Covector F = sp.norming_functional(f);
      worst_pairing = std::max(worst_pairing, std::abs(F(f) - sp.norm(f)));
      worst_dual = std::max(worst_dual, std::abs(sp.dual_norm(F) - 1.0));

      Vector g = random_gaussian(6, rng);
      const double u = 1e-5;
      double fd = (sp.norm(f + u * g) - sp.norm(f)) / u;
      worst_fd = std::max(worst_fd, std::abs(fd - F(g)));
    }
  }
  ok = ok && worst_pairing <= 1e-10 && worst_dual <= 1e-10 &&
       worst_fd <= 1e-4;

  // energy gradient + sandwich
  Vector y = random_gaussian(6, rng);
  auto quad = make_quadratic_energy(y);
  auto vq = validate_energy(quad, SmoothSpace::lp(6, 2.0), 300, 515);
  ok = ok && vq.gradient_ok && vq.max_grad_rel_err <= 1e-5;
  ok = ok && vq.sandwich_ok && vq.max_lower_violation <= 1e-9;

  auto sp4 = SmoothSpace::lp(4, 4.0);
  Vector f0 = random_gaussian(4, rng);
  auto comp = make_norm_composite_energy(
      f0, [](double u) { return 0.5 * u * u; }, [](double u) { return u; },
      sp4, sp4.q(), 4.0, 1.0);
  auto vc = validate_energy(comp, sp4, 300, 516);
  ok = ok && vc.gradient_ok && vc.max_grad_rel_err <= 1e-5;
  ok = ok && vc.sandwich_ok && vc.max_lower_violation <= 1e-9;

  // empirical moduli dominated by the declared gamma u^q
  std::vector<double> grid;
  for (double u = 0.02; u <= 1.0; u += 0.05) grid.push_back(u);
  bool dominated = true;
  for (double p : {1.5, 2.0, 3.0, 7.5}) {
    auto sp = SmoothSpace::lp(5, p);
    auto table = estimate_modulus(sp, grid, 300, 517);
    dominated = dominated && table.dominated;
  }
  ok = ok && dominated;

  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "pairing %.1e, dual %.1e, fd %.1e, grad %.1e/%.1e, moduli "
                "dominated %d",
                worst_pairing, worst_dual, worst_fd, vq.max_grad_rel_err,
                vc.max_grad_rel_err, int(dominated));
  detail = buf;
  return ok;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"beta of the canonical basis (brute force + multistart)", 30.0,
       crit_beta_canonical},
      {"exponential residual envelope, canonical plane", 5.0,
       crit_exponential_envelope},
      {"power-law residual rate, random dictionaries", 60.0, crit_rate_clean},
      {"noise plateau at the perturbation level", 60.0, crit_rate_noise},
      {"residual algorithm == energy recast", 10.0, crit_equivalence},
      {"energy-gap decay rate for convex variants", 60.0, crit_energy_rate},
      {"atomic-norm radius times beta brackets one", 60.0, crit_r1_beta},
      {"covering <-> beta round trips", 30.0, crit_covering_roundtrip},
      {"cardinality bound vs brute force", 120.0, crit_cardinality},
      {"dual-based expansion: convergence + certificates", 60.0,
       crit_dual_expansion},
      {"exact sparse recovery over an incoherent packing", 60.0,
       crit_sparse_recovery},
      {"norming-functional, gradient, and modulus identities", 30.0,
       crit_self_checks},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    std::string detail;
    bool ok = false;
    double t0 = now_seconds();
    try {
      ok = c.check(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    double elapsed = now_seconds() - t0;
    bool in_time = elapsed <= c.cap_seconds;
    bool pass = ok && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %2zu. %s (%.2fs / cap %.0fs) %s%s\n",
                pass ? "PASS" : "FAIL", i + 1, c.name.c_str(), elapsed,
                c.cap_seconds, detail.c_str(),
                in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }

  if (failures == 0)
    std::printf("all %zu acceptance criteria hold\n", criteria.size());
  else
    std::printf("%d of %zu acceptance criteria FAILED\n", failures,
                criteria.size());
  return failures;
}
