#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const char* cli = GDESC_CLI_PATH;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

RunResult run_cli(const std::string& args) {
  auto dir = fs::temp_directory_path();
  auto out = dir / "gdesc_cli_out.txt";
  auto err = dir / "gdesc_cli_err.txt";
  std::string cmd = std::string(cli) + " " + args + " >" + out.string() +
                    " 2>" + err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const char* name, const json& j) {
  auto p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << j.dump(2) << "\n";
  return p;
}

}  // namespace

TEST_CASE("cli: no subcommand is a usage error") {
  CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("cli run: minimal canonical config exits 0 with a two-row trace") {
  json cfg{{"seed", 1},
           {"space", {{"d", 2}, {"p", 2.0}}},
           {"dictionary", {{"kind", "canonical"}}},
           {"algorithm", "woga"},
           {"m_max", 10},
           {"target", {{"kind", "coords"}, {"coords", {1.0, 1.0}}}}};
  auto cfg_path = write_config("gdesc_cli_min.json", cfg);
  auto out_dir = fs::temp_directory_path() / "gdesc_cli_min_out";
  fs::remove_all(out_dir);

  auto r = run_cli("run --config " + cfg_path.string() + " --out " +
                   out_dir.string());
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out_dir / "trace.csv"));
  REQUIRE(fs::exists(out_dir / "report.json"));

  // header plus exactly two iteration rows, ending at zero residual
  std::string trace = slurp(out_dir / "trace.csv");
  int rows = 0;
  for (char c : trace)
    if (c == '\n') ++rows;
  CHECK(rows >= 3);
  auto report = json::parse(slurp(out_dir / "report.json"));
  CHECK(report.at("metrics").at("iterations").get<int>() == 2);
  CHECK(report.at("metrics").at("final_residual").get<double>() <= 1e-12);
  fs::remove_all(out_dir);
  fs::remove(cfg_path);
}

TEST_CASE("cli run: out-of-range weakness parameter exits 2 naming params.t") {
  json cfg{{"seed", 1},
           {"space", {{"d", 2}, {"p", 2.0}}},
           {"dictionary", {{"kind", "canonical"}}},
           {"algorithm", "woga"},
           {"params", {{"t", 1.5}}},
           {"target", {{"kind", "coords"}, {"coords", {1.0, 1.0}}}}};
  auto cfg_path = write_config("gdesc_cli_badt.json", cfg);
  auto r = run_cli("run --config " + cfg_path.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("params.t") != std::string::npos);
  fs::remove(cfg_path);
}

TEST_CASE("cli run: unknown key exits 2 naming the key") {
  json cfg{{"seed", 1},
           {"space", {{"d", 2}, {"p", 2.0}}},
           {"dictionary", {{"kind", "canonical"}}},
           {"algorithm", "woga"},
           {"target", {{"kind", "coords"}, {"coords", {1.0, 1.0}}}},
           {"extra_knob", true}};
  auto cfg_path = write_config("gdesc_cli_unknown.json", cfg);
  auto r = run_cli("run --config " + cfg_path.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("extra_knob") != std::string::npos);
  fs::remove(cfg_path);
}

TEST_CASE("cli run: missing config file exits 2") {
  auto r = run_cli("run --config /nonexistent/nope.json");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli dict: build canonical then inspect brackets the exact beta") {
  auto dict_path = fs::temp_directory_path() / "gdesc_cli_canon3.csv";
  auto r = run_cli("dict build canonical --d 3 --out " + dict_path.string());
  REQUIRE(r.exit_code == 0);

  auto ins = run_cli("dict inspect " + dict_path.string());
  REQUIRE(ins.exit_code == 0);
  auto j = json::parse(ins.out);
  CHECK(j.at("d").get<int>() == 3);
  CHECK(j.at("N").get<int>() == 3);
  CHECK(j.at("coherence").get<double>() <= 1e-12);
  double lo = j.at("beta").at("lower").get<double>();
  double hi = j.at("beta").at("upper").get<double>();
  CHECK(lo <= 0.57735);
  CHECK(hi >= 0.57735);
  CHECK(hi - lo < 1e-2);
  CHECK(j.at("column_norms").at("max").get<double>() <= 1.0 + 1e-12);
  fs::remove(dict_path);
}

TEST_CASE("cli dict: incoherent build honors the coherence cap") {
  auto dict_path = fs::temp_directory_path() / "gdesc_cli_inc.csv";
  auto r = run_cli("dict build incoherent --d 8 --n 16 --mu 0.5 --seed 3 --out " +
                   dict_path.string());
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j.at("achieved").get<int>() == 16);

  auto ins = run_cli("dict inspect " + dict_path.string());
  REQUIRE(ins.exit_code == 0);
  auto info = json::parse(ins.out);
  CHECK(info.at("coherence").get<double>() <= 0.5 + 1e-12);
  fs::remove(dict_path);
}

TEST_CASE("cli dict: an atom with norm above one fails inspection naming the column") {
  auto dict_path = fs::temp_directory_path() / "gdesc_cli_bad.csv";
  {
    std::ofstream out(dict_path);
    out << "# d=2 N=3 p=2 label=bad\n1.0,0.0\n0.0,1.2\n0.5,0.5\n";
  }
  auto r = run_cli("dict inspect " + dict_path.string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("1") != std::string::npos);
  fs::remove(dict_path);
}

TEST_CASE("cli verify: unknown suite exits 2 and lists the known ones") {
  auto r = run_cli("verify no_such_suite");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("sec_3_1_equiv") != std::string::npos);
}

TEST_CASE("cli verify: a fast suite passes and prints its report as JSON") {
  auto r = run_cli("verify eq_2_6 --seed 11");
  REQUIRE(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j.at("suite").get<std::string>() == "eq_2_6");
  CHECK(j.at("pass").get<bool>());
  CHECK_FALSE(j.contains("elapsed_seconds"));
}

TEST_CASE("cli verify: worker override does not change the report") {
  auto a = run_cli("verify sec_3_1_equiv --seed 5 --workers 1");
  auto b = run_cli("verify sec_3_1_equiv --seed 5 --workers 3");
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.out == b.out);
}
