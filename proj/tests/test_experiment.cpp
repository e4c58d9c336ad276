#include "gdesc/experiment.hpp"

#include <Eigen/QR>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "gdesc/random.hpp"

using namespace gdesc;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
  return json{{"seed", 1},
              {"space", {{"d", 2}, {"p", 2.0}}},
              {"dictionary", {{"kind", "canonical"}}},
              {"algorithm", "woga"},
              {"m_max", 10},
              {"target", {{"kind", "coords"}, {"coords", {1.0, 1.0}}}}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config parsing requires a seed and rejects unknown keys by path") {
  auto j = minimal_config();
  CHECK_NOTHROW(RunConfig::from_json(j));

  auto noseed = j;
  noseed.erase("seed");
  CHECK_THROWS_WITH_AS(RunConfig::from_json(noseed),
                       doctest::Contains("seed"), ConfigError);

  auto extra = j;
  extra["sneed"] = 1;
  CHECK_THROWS_WITH_AS(RunConfig::from_json(extra),
                       doctest::Contains("sneed"), ConfigError);

  auto nested = j;
  nested["params"] = json{{"t", 0.5}, {"bogus", 1}};
  CHECK_THROWS_WITH_AS(RunConfig::from_json(nested),
                       doctest::Contains("params.bogus"), ConfigError);
}

TEST_CASE("config parsing validates field ranges with full paths") {
  auto j = minimal_config();
  j["params"] = json{{"t", 1.5}};
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("params.t"),
                       ConfigError);

  j = minimal_config();
  j["space"]["p"] = 1.0;
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("space.p"),
                       ConfigError);

  j = minimal_config();
  j["target"]["coords"] = {1.0, 2.0, 3.0};
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j),
                       doctest::Contains("target.coords"), ConfigError);

  j = minimal_config();
  j["algorithm"] = "wcga_com";
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j),
                       doctest::Contains("algorithm"), ConfigError);

  j = minimal_config();
  j["formats"] = {"csv", "yaml"};
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("formats"),
                       ConfigError);

  j = minimal_config();
  j["target"] = json{{"kind", "lasso"}};
  CHECK_THROWS_WITH_AS(RunConfig::from_json(j), doctest::Contains("target"),
                       ConfigError);
}

TEST_CASE("spec echo is stable under a parse round-trip") {
  auto j = minimal_config();
  j["params"] = json{{"t", 0.75}, {"b", 0.1}};
  j["algorithm"] = "dga";
  auto spec = ExperimentSpec::from_json(j);
  auto echo = spec.to_json();
  auto spec2 = ExperimentSpec::from_json(echo);
  CHECK(spec2.to_json().dump() == echo.dump());
  CHECK(echo.at("algorithm") == "dga");
  CHECK(echo.at("params").at("t").get<double>() == 0.75);
}

TEST_CASE("algorithm names round-trip") {
  for (auto a : {Algorithm::wcga, Algorithm::wgafr, Algorithm::wga,
                 Algorithm::woga, Algorithm::dga, Algorithm::hybrid,
                 Algorithm::wcga_co, Algorithm::wgafr_co}) {
    auto back = algorithm_from_string(to_string(a));
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
  CHECK_FALSE(algorithm_from_string("sga").has_value());
  CHECK(is_descent(Algorithm::wcga_co));
  CHECK(is_descent(Algorithm::wgafr_co));
  CHECK_FALSE(is_descent(Algorithm::wcga));
}

TEST_CASE("minimal canonical run: two steps then exact zero") {
  TempDir tmp("gdesc_test_run_min");
  RunConfig cfg = RunConfig::from_json(minimal_config());
  cfg.out_dir = tmp.path;
  auto result = run_experiment(cfg);
  CHECK(result.pass);
  CHECK(result.report.at("metrics").at("iterations").get<int>() == 2);
  CHECK(result.report.at("metrics").at("final_residual").get<double>() <=
        1e-12);
  REQUIRE(result.artifacts.size() == 2);
  CHECK(fs::exists(tmp.path / "trace.csv"));
  CHECK(fs::exists(tmp.path / "report.json"));
}

TEST_CASE("identical config and seed give identical outputs modulo timestamp") {
  TempDir a("gdesc_test_run_a"), b("gdesc_test_run_b");
  auto j = minimal_config();
  j["dictionary"] = json{{"kind", "random_sphere"}, {"n", 12}};
  j["space"]["d"] = 4;
  j["target"] = json{{"kind", "atom_combination"}, {"budget", 1.0},
                     {"sparsity", 3}};
  j["m_max"] = 30;
  j["seed"] = 777;

  RunConfig ca = RunConfig::from_json(j);
  ca.out_dir = a.path;
  RunConfig cb = RunConfig::from_json(j);
  cb.out_dir = b.path;
  auto ra = run_experiment(ca);
  auto rb = run_experiment(cb);

  CHECK(slurp(a.path / "trace.csv") == slurp(b.path / "trace.csv"));
  auto ja = json::parse(slurp(a.path / "report.json"));
  auto jb = json::parse(slurp(b.path / "report.json"));
  ja.erase("timestamp");
  jb.erase("timestamp");
  CHECK(ja.dump() == jb.dump());

  // a different seed must change the trace
  j["seed"] = 778;
  TempDir c("gdesc_test_run_c");
  RunConfig cc = RunConfig::from_json(j);
  cc.out_dir = c.path;
  run_experiment(cc);
  CHECK(slurp(a.path / "trace.csv") != slurp(c.path / "trace.csv"));
}

TEST_CASE("descent run over a lasso recast reaches the normal-equations optimum") {
  TempDir tmp("gdesc_test_run_lasso");
  auto rng = make_rng(61);
  Matrix phi(6, 4);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) phi(i, j) = random_gaussian(1, rng)[0];
  Vector y = random_gaussian(6, rng);
  auto phi_path = tmp.path / "phi.csv";
  auto y_path = tmp.path / "y.csv";
  {
    std::ofstream out(phi_path);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 4; ++j)
        out << format_g17(phi(i, j)) << (j + 1 < 4 ? "," : "\n");
    }
    std::ofstream oy(y_path);
    for (int i = 0; i < 6; ++i) oy << format_g17(y[i]) << "\n";
  }

  json j{{"seed", 5},
         {"space", {{"d", 6}, {"p", 2.0}}},
         {"algorithm", "wcga_co"},
         {"m_max", 40},
         {"target",
          {{"kind", "lasso"},
           {"phi_path", phi_path.string()},
           {"y_path", y_path.string()}}}};
  RunConfig cfg = RunConfig::from_json(j);
  cfg.out_dir = tmp.path;
  auto result = run_experiment(cfg);
  CHECK(result.pass);
  auto metrics = result.report.at("metrics");
  CHECK(metrics.at("optimum_reached").get<bool>());
  double fin = metrics.at("final_energy").get<double>();
  Vector best = phi.completeOrthogonalDecomposition().solve(y);
  double known = 0.5 * (phi * best - y).squaredNorm();
  CHECK(fin == doctest::Approx(known).epsilon(1e-8));
}

TEST_CASE("lasso target demands a descent algorithm") {
  json j{{"seed", 5},
         {"space", {{"d", 6}, {"p", 2.0}}},
         {"algorithm", "woga"},
         {"target",
          {{"kind", "lasso"}, {"phi_path", "a.csv"}, {"y_path", "b.csv"}}}};
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("dual-expansion run reports the coefficient sum") {
  TempDir tmp("gdesc_test_run_dga");
  auto j = minimal_config();
  j["algorithm"] = "dga";
  j["params"] = json{{"b", 0.25}};
  j["m_max"] = 5000;
  RunConfig cfg = RunConfig::from_json(j);
  cfg.out_dir = tmp.path;
  auto result = run_experiment(cfg);
  auto metrics = result.report.at("metrics");
  CHECK(metrics.contains("coefficient_sum"));
  CHECK(metrics.at("coefficient_sum").get<double>() > 0.0);
}

TEST_CASE("matrix and vector CSV loading reject malformed input") {
  auto dir = fs::temp_directory_path();
  auto p = dir / "gdesc_test_mat.csv";
  {
    std::ofstream out(p);
    out << "# comment row\n1.0,2.0\n3.0,4.0\n";
  }
  Matrix m = load_matrix_csv(p);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
  CHECK(m(1, 0) == 3.0);

  {
    std::ofstream out(p);
    out << "1.0,2.0\n3.0\n";
  }
  CHECK_THROWS(load_matrix_csv(p));

  {
    std::ofstream out(p);
    out << "1.0,abc\n";
  }
  CHECK_THROWS(load_matrix_csv(p));

  {
    std::ofstream out(p);
    out << "1.5\n-2.5\n0.25\n";
  }
  Vector v = load_vector_csv(p);
  REQUIRE(v.size() == 3);
  CHECK(v[1] == -2.5);
  fs::remove(p);
}

TEST_CASE("run config accepts the documented output controls") {
  auto j = minimal_config();
  j["out_dir"] = "somewhere";
  j["formats"] = {"json"};
  j["verbosity"] = 0;
  j["workers"] = 2;
  auto cfg = RunConfig::from_json(j);
  CHECK(cfg.out_dir == fs::path("somewhere"));
  CHECK_FALSE(cfg.write_csv);
  CHECK(cfg.write_json);
  CHECK(cfg.verbosity == 0);
  CHECK(cfg.workers == 2);
}

TEST_CASE("exponential-factor check is wired into the report") {
  TempDir tmp("gdesc_test_run_expcheck");
  auto j = minimal_config();
  j["m_max"] = 50;
  j["checks"] = json{{"exponential_factor", 0.875}};
  RunConfig cfg = RunConfig::from_json(j);
  cfg.out_dir = tmp.path;
  auto result = run_experiment(cfg);
  CHECK(result.pass);
  CHECK(result.report.at("metrics").at("checks").contains("exponential"));
}
