#include "gdesc/descent.hpp"

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "gdesc/random.hpp"

using namespace gdesc;
namespace fs = std::filesystem;

TEST_CASE("quadratic energy passes gradient and sandwich validation") {
  auto rng = make_rng(41);
  Vector y = random_gaussian(6, rng);
  auto e = make_quadratic_energy(y);
  CHECK(e.q == 2.0);
  CHECK(e.gamma == 0.5);
  REQUIRE(e.known_min.has_value());
  CHECK(*e.known_min == 0.0);
  REQUIRE(e.quadratic_target.has_value());

  auto rep = validate_energy(e, SmoothSpace::lp(6, 2.0), 200, 42);
  CHECK(rep.gradient_ok);
  CHECK(rep.sandwich_ok);
  CHECK(rep.max_grad_rel_err < 1e-5);
  CHECK(rep.max_lower_violation < 1e-9);
}

TEST_CASE("norm composite with V(u) = u^2/2 reproduces the quadratic energy") {
  auto rng = make_rng(43);
  Vector f0 = random_gaussian(5, rng);
  auto sp = SmoothSpace::lp(5, 2.0);
  auto quad = make_quadratic_energy(f0);
  auto comp = make_norm_composite_energy(
      f0, [](double u) { return 0.5 * u * u; }, [](double u) { return u; },
      sp, 2.0, 0.5, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    Vector x = random_gaussian(5, rng);
    CHECK(comp.eval(x) == doctest::Approx(quad.eval(x)).epsilon(1e-12));
    CHECK((comp.grad(x).coords - quad.grad(x).coords).norm() < 1e-12);
  }
  auto rep = validate_energy(comp, sp, 200, 44);
  CHECK(rep.gradient_ok);
  CHECK(rep.sandwich_ok);
}

TEST_CASE("composite energy with a kink reports the singularity") {
  auto rng = make_rng(45);
  Vector f0 = random_gaussian(4, rng);
  auto sp = SmoothSpace::lp(4, 2.0);
  // V(u) = u is convex but not smooth at 0
  auto e = make_norm_composite_energy(
      f0, [](double u) { return u; }, [](double) { return 1.0; }, sp, 2.0,
      0.5, 1.0);
  CHECK_THROWS_AS(e.grad(f0), GradientSingularity);
  Vector off = f0;
  off[0] += 0.5;
  CHECK_NOTHROW(e.grad(off));
}

TEST_CASE("proof bound B has the closed form") {
  // (4 C0 / (t beta))^(q/(q-1)) (2 gamma)^(1/(q-1))
  CHECK(proof_bound_B(1.0, 0.5, 0.5, 2.0, 1.0) ==
        doctest::Approx(64.0).epsilon(1e-14));
  CHECK(proof_bound_B(0.5, 0.25, 2.0, 2.0, 3.0) ==
        doctest::Approx(std::pow(12.0 / 0.125, 2.0) * 4.0).epsilon(1e-12));
}

TEST_CASE("energy recast selects the same atoms as the residual algorithm") {
  auto sp = SmoothSpace::lp(8, 2.0);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto dict = build_random_sphere(sp, 24, 400 + seed);
    auto rng = make_rng(500 + seed);
    Vector f0 = random_gaussian(8, rng);
    GreedyConfig cfg;
    cfg.max_iter = 16;
    auto rep = check_equivalence_co(f0, dict, sp, cfg);
    CHECK(rep.identical);
    CHECK(rep.pass);
    CHECK(rep.first_mismatch == 0);
    CHECK(rep.max_energy_gap_diff < 1e-8);
  }
}

TEST_CASE("free-relaxation descent decreases the energy monotonically") {
  auto sp = SmoothSpace::lp(10, 2.0);
  auto dict = build_random_sphere(sp, 40, 46);
  auto rng = make_rng(47);
  Vector y = random_gaussian(10, rng);
  auto e = make_quadratic_energy(y);
  GreedyConfig cfg;
  cfg.max_iter = 60;
  auto tr = run_wgafr_co(e, dict, sp, cfg);
  REQUIRE(!tr.rows.empty());
  double prev = tr.initial_energy;
  for (const auto& row : tr.rows) {
    CHECK(row.energy <= prev + 1e-12);
    prev = row.energy;
  }
  CHECK(tr.rows.back().energy_gap < tr.initial_energy);
}

TEST_CASE("descent over a spanning dictionary reaches the known optimum") {
  auto sp = SmoothSpace::lp(6, 2.0);
  auto dict = build_random_sphere(sp, 18, 48);
  auto rng = make_rng(49);
  Vector y = random_gaussian(6, rng);
  auto e = make_quadratic_energy(y);
  GreedyConfig cfg;
  cfg.max_iter = 64;
  auto tr = run_wcga_co(e, dict, sp, cfg);
  CHECK(tr.optimum_reached);
  CHECK(tr.rows.back().energy_gap <= 1e-10 * std::max(1.0, tr.initial_energy));
}

TEST_CASE("lasso recast: normalized columns, exact map back, zero column named") {
  Matrix phi(5, 3);
  phi << 2.0, 0.0, 1.0,
         0.0, 3.0, 1.0,
         0.0, 0.0, 1.0,
         1.0, 1.0, 0.0,
         0.0, 2.0, 0.0;
  auto rng = make_rng(51);
  Vector y = random_gaussian(5, rng);

  auto recast = lasso_recast(phi, y);
  for (int j = 0; j < recast.dict.size(); ++j)
    CHECK(recast.dict.atom(j).norm() == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(recast.energy.known_min.has_value());

  // run the descent and check the fit against the normal-equations optimum
  GreedyConfig cfg;
  cfg.max_iter = 60;
  auto tr = run_wcga_co(recast.energy, recast.dict,
                        SmoothSpace::lp(5, 2.0), cfg);
  CHECK(tr.rows.back().energy <=
        *recast.energy.known_min + 1e-9 * std::max(1.0, *recast.energy.known_min));

  // map_back rescales dictionary coefficients to original columns
  Vector c(3);
  c << 1.0, 2.0, -3.0;
  Vector orig = recast.map_back(c);
  Vector lhs = phi * orig;
  Vector rhs = recast.dict.atoms() * c;
  CHECK((lhs - rhs).norm() < 1e-12);

  Matrix bad = phi;
  bad.col(1).setZero();
  try {
    lasso_recast(bad, y);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& ex) {
    CHECK(std::string(ex.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("empirical energy modulus of the quadratic is u^2/2 exactly") {
  auto rng = make_rng(53);
  Vector y = random_gaussian(4, rng);
  auto e = make_quadratic_energy(y);
  std::vector<double> grid = {0.1, 0.3, 0.7, 1.0};
  auto table = estimate_energy_modulus(e, SmoothSpace::lp(4, 2.0), grid, 2.0,
                                       100, 54);
  REQUIRE(table.points.size() == grid.size());
  for (const auto& pt : table.points)
    CHECK(pt.rho_hat == doctest::Approx(0.5 * pt.u * pt.u).epsilon(1e-10));
}

TEST_CASE("descent trace CSV round-trips") {
  auto sp = SmoothSpace::lp(4, 2.0);
  auto dict = build_random_sphere(sp, 10, 55);
  auto rng = make_rng(56);
  auto e = make_quadratic_energy(random_gaussian(4, rng));
  GreedyConfig cfg;
  cfg.max_iter = 8;
  auto tr = run_wcga_co(e, dict, sp, cfg);

  auto path = fs::temp_directory_path() / "gdesc_test_dtrace.csv";
  tr.save_csv(path);
  auto back = DescentTrace::load_csv(path);
  CHECK(back.initial_energy == tr.initial_energy);
  CHECK(back.optimum_reached == tr.optimum_reached);
  REQUIRE(back.rows.size() == tr.rows.size());
  for (size_t k = 0; k < tr.rows.size(); ++k) {
    CHECK(back.rows[k].iter == tr.rows[k].iter);
    CHECK(back.rows[k].selected_index == tr.rows[k].selected_index);
    CHECK(back.rows[k].energy == tr.rows[k].energy);
    CHECK(back.rows[k].energy_gap == tr.rows[k].energy_gap);
  }
  fs::remove(path);
}

TEST_CASE("energy validation flags a wrong gradient") {
  auto rng = make_rng(57);
  Vector y = random_gaussian(3, rng);
  auto e = make_quadratic_energy(y);
  auto broken = e;
  broken.grad = [y](const Vector& x) {
    Covector g;
    g.coords = 2.0 * (x - y);  // off by a factor of two
    return g;
  };
  auto rep = validate_energy(broken, SmoothSpace::lp(3, 2.0), 100, 58);
  CHECK_FALSE(rep.gradient_ok);
}
