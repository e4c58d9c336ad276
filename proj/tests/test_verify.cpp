#include "gdesc/verify.hpp"

#include <Eigen/QR>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "gdesc/random.hpp"

using namespace gdesc;

namespace {

// every support of size <= m, least squares on each, keep the best
double sigma_oracle(const Vector& f0, const Dictionary& dict, int m) {
  const int n = dict.size();
  double best = f0.norm();
  std::vector<int> idx(m, 0);
  // odometer over non-decreasing index tuples; duplicates just waste a column
  long total = 1;
  for (int k = 0; k < m; ++k) total *= n;
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (int k = 0; k < m; ++k) {
      idx[k] = int(c % n);
      c /= n;
    }
    Matrix A(dict.dim(), m);
    for (int k = 0; k < m; ++k) A.col(k) = dict.atom(idx[k]);
    Vector sol = A.completeOrthogonalDecomposition().solve(f0);
    best = std::min(best, (f0 - A * sol).norm());
  }
  return best;
}

}  // namespace

TEST_CASE("fit_rate recovers a clean power law") {
  std::vector<double> v;
  for (int m = 1; m <= 300; ++m) v.push_back(std::pow(double(m), -0.5));
  auto fit = fit_rate(v, 16, 256);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.points == 256 - 16 + 1);
  CHECK(fit.m_lo == 16);
  CHECK(fit.m_hi == 256);
}

TEST_CASE("fit_rate truncates at the floor and rejects short windows") {
  std::vector<double> v;
  for (int m = 1; m <= 300; ++m)
    v.push_back(m <= 100 ? std::pow(double(m), -1.0) : 1e-18);
  auto fit = fit_rate(v, 16, 256, 1e-15);
  CHECK(fit.m_hi == 100);
  CHECK(fit.points == 100 - 16 + 1);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-9));

  std::vector<double> shorty(20, 1.0);
  CHECK_THROWS_AS(fit_rate(shorty, 16, 256, 0.0), std::invalid_argument);
}

TEST_CASE("rate check treats early collapse as satisfied") {
  std::vector<double> v = {1.0, 0.1, 1e-20, 1e-20, 1e-20};
  bool ok = false;
  auto j = rate_check_with_collapse(v, 1e-15, 16, 256, -0.4, &ok);
  CHECK(ok);
  CHECK(j.at("collapsed_at").get<int>() == 3);

  std::vector<double> w;
  for (int m = 1; m <= 300; ++m) w.push_back(std::pow(double(m), -0.2));
  ok = true;
  j = rate_check_with_collapse(w, 0.0, 16, 256, -0.4, &ok);
  CHECK_FALSE(ok);  // decays too slowly
  CHECK(j.at("slope").get<double>() == doctest::Approx(-0.2).epsilon(1e-9));
}

TEST_CASE("exponential envelope check") {
  std::vector<double> v;
  for (int m = 0; m <= 40; ++m) v.push_back(3.0 * std::pow(0.9, m));
  auto rep = check_exponential(v, 0.9);
  CHECK(rep.pass);
  CHECK(rep.first_violation == 0);
  CHECK(rep.worst_ratio == doctest::Approx(1.0).epsilon(1e-8));

  v[7] *= 1.01;
  rep = check_exponential(v, 0.9);
  CHECK_FALSE(rep.pass);
  CHECK(rep.first_violation == 7);

  std::vector<double> zeros = {0.0, 0.0, 0.0};
  CHECK(check_exponential(zeros, 0.5).pass);
  CHECK_THROWS_AS(check_exponential(v, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(check_exponential(v, 0.0), std::invalid_argument);
}

TEST_CASE("decay classifier separates geometric from power-law sequences") {
  std::vector<double> geo, pow_, tiny;
  for (int m = 1; m <= 60; ++m) {
    geo.push_back(std::pow(0.9, m));
    pow_.push_back(std::pow(double(m), -0.5));
  }
  tiny = {1.0, 0.5};
  CHECK(classify_decay(geo).kind == DecayKind::exponential);
  CHECK(classify_decay(pow_).kind == DecayKind::power_law);
  CHECK(classify_decay(tiny).kind == DecayKind::undetermined);
}

TEST_CASE("sigma_m matches the exhaustive oracle and is monotone") {
  auto dict = build_random_sphere(SmoothSpace::lp(3, 2.0), 6, 71);
  auto rng = make_rng(72);
  Vector f0 = random_gaussian(3, rng);

  double s0 = sigma_m_bruteforce(f0, dict, 0);
  double s1 = sigma_m_bruteforce(f0, dict, 1);
  double s2 = sigma_m_bruteforce(f0, dict, 2);
  double s3 = sigma_m_bruteforce(f0, dict, 3);
  CHECK(s0 == doctest::Approx(f0.norm()).epsilon(1e-14));
  CHECK(s1 <= s0 + 1e-14);
  CHECK(s2 <= s1 + 1e-14);
  CHECK(s3 <= s2 + 1e-14);
  CHECK(s1 == doctest::Approx(sigma_oracle(f0, dict, 1)).epsilon(1e-12));
  CHECK(s2 == doctest::Approx(sigma_oracle(f0, dict, 2)).epsilon(1e-12));
  CHECK(s3 <= 1e-12);  // six atoms span R^3 almost surely
}

TEST_CASE("sigma_m enforces the enumeration budget") {
  auto dict = build_random_sphere(SmoothSpace::lp(10, 2.0), 60, 73);
  auto rng = make_rng(74);
  Vector f0 = random_gaussian(10, rng);
  CHECK_THROWS_AS(sigma_m_bruteforce(f0, dict, 8), BudgetExceeded);
}

TEST_CASE("lebesgue-type check: exact recovery and precondition") {
  auto pack = build_incoherent(16, 12, 0.3, 500'000, 19);
  REQUIRE(pack.achieved == 12);
  Vector f0 = random_sparse_target(pack.dict, 1, 75);
  auto rep = check_lebesgue(pack.dict, f0, 1, 2.0, 3.0, 0.5);
  CHECK(rep.pass);
  CHECK(rep.residual <= 1e-10);
  CHECK(rep.m == 1);
  CHECK(rep.iterations == 2);
  CHECK(rep.mu <= 0.3 + 1e-12);

  // m beyond c3 / mu is out of the admissible range
  CHECK_THROWS_AS(check_lebesgue(pack.dict, f0, 9, 2.0, 3.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("incoherence profile validation") {
  IncoherenceProfile p;
  p.validate();
  IncoherenceProfile bad = p;
  bad.K = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.r = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.Dmax = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("property-A constant of an orthonormal system is exactly 1") {
  auto dict = build_canonical(SmoothSpace::lp(4, 2.0));
  IncoherenceProfile prof;
  prof.K = 3;
  prof.Dmax = 4;
  prof.V = 0.0;  // measure only
  prof.r = 0.5;
  std::vector<int> support = {0, 1, 2};
  Vector coeffs(3);
  coeffs << 0.5, -1.25, 2.0;
  auto rep = check_property_A(dict, prof, support, coeffs);
  CHECK(rep.min_V == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.pairs > 0);

  // sign flips and support reordering do not change the constant
  Vector flipped = -coeffs;
  auto rep2 = check_property_A(dict, prof, support, flipped);
  CHECK(rep2.min_V == doctest::Approx(rep.min_V).epsilon(1e-13));
  std::vector<int> reordered = {2, 0, 1};
  Vector perm(3);
  perm << 2.0, 0.5, -1.25;
  auto rep3 = check_property_A(dict, prof, reordered, perm);
  CHECK(rep3.min_V == doctest::Approx(rep.min_V).epsilon(1e-13));

  // with a stated target the verdict reflects min_V <= V
  prof.V = 1.0;
  CHECK(check_property_A(dict, prof, support, coeffs).pass);
  prof.V = 0.5;
  CHECK_FALSE(check_property_A(dict, prof, support, coeffs).pass);
}

TEST_CASE("property-A enumeration budget is enforced") {
  auto dict = build_random_sphere(SmoothSpace::lp(10, 2.0), 40, 76);
  IncoherenceProfile prof;
  prof.K = 8;
  prof.Dmax = 30;
  std::vector<int> support(8);
  Vector coeffs(8);
  for (int i = 0; i < 8; ++i) {
    support[i] = i;
    coeffs[i] = 1.0;
  }
  CHECK_THROWS_AS(check_property_A(dict, prof, support, coeffs),
                  BudgetExceeded);
}

TEST_CASE("suite names round-trip through strings") {
  for (auto name : all_suites()) {
    auto back = suite_from_string(to_string(name));
    REQUIRE(back.has_value());
    CHECK(*back == name);
  }
  CHECK_FALSE(suite_from_string("no_such_suite").has_value());
}

TEST_CASE("suite reports are reproducible bit for bit") {
  SuiteOptions opt;
  opt.seed = 424242;
  auto a = run_theorem_suite(SuiteName::sec_3_1_equiv, opt);
  auto b = run_theorem_suite(SuiteName::sec_3_1_equiv, opt);
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.pass);

  // worker count must not influence the result
  SuiteOptions four = opt;
  four.workers = 4;
  auto c = run_theorem_suite(SuiteName::sec_3_1_equiv, four);
  CHECK(a.to_json().dump() == c.to_json().dump());
}

TEST_CASE("random atomic targets respect the l1 budget") {
  auto dict = build_random_sphere(SmoothSpace::lp(6, 2.0), 20, 77);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Vector f = random_atomic_target(dict, 2.5, 7, seed);
    // the target must be expressible with l1 mass exactly the budget;
    // its norm can never exceed it
    CHECK(f.norm() <= 2.5 + 1e-12);
    CHECK(f.norm() > 0.0);
  }
  CHECK_THROWS_AS(random_atomic_target(dict, 1.0, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("random sparse targets report support and coefficients") {
  auto dict = build_random_sphere(SmoothSpace::lp(5, 2.0), 12, 78);
  std::vector<int> support;
  Vector coeffs;
  Vector f = random_sparse_target(dict, 3, 79, &support, &coeffs);
  REQUIRE(support.size() == 3);
  REQUIRE(coeffs.size() == 12);
  Vector rebuilt = dict.atoms() * coeffs;
  CHECK((rebuilt - f).norm() < 1e-14);
  int nonzero = 0;
  for (int j = 0; j < coeffs.size(); ++j)
    if (coeffs[j] != 0.0) {
      ++nonzero;
      CHECK(std::abs(coeffs[j]) >= 0.5);
      CHECK(std::abs(coeffs[j]) <= 1.5);
    }
  CHECK(nonzero == 3);
}
