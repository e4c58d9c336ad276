#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gdesc/experiment.hpp"

namespace {

using namespace gdesc;

int cmd_run(const std::string& config_path, const std::string& out_override,
            int workers_override) {
  RunConfig cfg;
  try {
    cfg = RunConfig::load(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (workers_override > 0) cfg.workers = workers_override;
  try {
    ExperimentResult result = run_experiment(cfg);
    if (cfg.verbosity > 0) std::cout << result.report.dump(2) << "\n";
    return result.pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_dict_build(const std::string& kind, int d, double p, int n, double mu,
                   long max_attempts, std::uint64_t seed,
                   const std::string& out, const std::string& label) {
  try {
    SmoothSpace sp = SmoothSpace::lp(d, p);
    json info;
    Dictionary dict = [&]() -> Dictionary {
      if (kind == "canonical") return build_canonical(sp);
      if (kind == "random" || kind == "random_sphere")
        return build_random_sphere(sp, n, seed);
      if (kind == "incoherent") {
        PackingResult pack = build_incoherent(d, n, mu, max_attempts, seed);
        info["requested"] = pack.requested;
        info["achieved"] = pack.achieved;
        info["attempts"] = pack.attempts;
        return pack.dict;
      }
      throw ConfigError("kind: expected canonical, random, or incoherent");
    }();
    if (!label.empty()) dict = Dictionary(dict.atoms(), sp, label);
    dict.save_csv(out);
    info["path"] = out;
    info["d"] = dict.dim();
    info["N"] = dict.size();
    info["coherence"] = coherence(dict);
    std::cout << info.dump(2) << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "build failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_dict_inspect(const std::string& path, long grid, int restarts) {
  Dictionary dict = [&]() {
    try {
      return Dictionary::load_csv(path);
    } catch (const InvariantViolation& e) {
      std::cerr << "invariant violation: " << e.what();
      if (e.index >= 0) std::cerr << " (column " << e.index << ")";
      std::cerr << "\n";
      std::exit(1);
    } catch (const std::exception& e) {
      std::cerr << "cannot load " << path << ": " << e.what() << "\n";
      std::exit(2);
    }
  }();

  BetaEstimate est = dict.dim() <= 3 && dict.ambient().p() == 2.0
                         ? beta_bruteforce(dict, grid)
                         : beta_upper(dict, restarts, 12345);
  double nmin = 0.0, nmax = 0.0;
  for (int j = 0; j < dict.size(); ++j) {
    double c = dict.ambient().norm(dict.atom(j));
    if (j == 0) nmin = nmax = c;
    nmin = std::min(nmin, c);
    nmax = std::max(nmax, c);
  }
  const char* method = est.method == BetaEstimate::Method::bruteforce_grid
                           ? "bruteforce_grid"
                       : est.method == BetaEstimate::Method::canonical_exact
                           ? "canonical_exact"
                           : "multistart_descent";
  json out{{"d", dict.dim()},
           {"N", dict.size()},
           {"label", dict.label()},
           {"coherence", coherence(dict)},
           {"beta",
            {{"lower", est.lower ? json(*est.lower) : json()},
             {"upper", est.upper},
             {"method", method}}},
           {"column_norms", {{"min", nmin}, {"max", nmax}}}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& suite_name, std::uint64_t seed, int seeds,
               double budget, const std::string& out_dir, int workers) {
  auto suite = suite_from_string(suite_name);
  if (!suite) {
    std::cerr << "unknown suite: " << suite_name << "\n";
    std::cerr << "known suites:";
    for (SuiteName s : all_suites()) std::cerr << " " << to_string(s);
    std::cerr << "\n";
    return 2;
  }
  SuiteOptions opt;
  opt.seed = seed;
  opt.seeds = seeds;
  opt.budget_seconds = budget;
  opt.workers = workers;
  if (!out_dir.empty()) opt.out_dir = out_dir;
  try {
    SuiteReport report = run_theorem_suite(*suite, opt);
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      report.save(std::filesystem::path(out_dir) /
                  (report.suite + "_report.json"));
    }
    std::cout << report.to_json().dump(2) << "\n";
    std::cerr << report.suite << ": " << (report.pass ? "PASS" : "FAIL")
              << " (" << report.elapsed_seconds << " s)\n";
    return report.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "suite failed to run: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy approximation and dictionary descent toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gdesc 0.1.0");

  // run
  auto* run = app.add_subcommand("run", "Execute an experiment config");
  std::string config_path;
  std::string run_out;
  int run_workers = 0;
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--out", run_out, "Override the output directory");
  run->add_option("--workers", run_workers, "Worker count override");

  // dict
  auto* dict = app.add_subcommand("dict", "Build or inspect dictionaries");
  dict->require_subcommand(1);

  auto* build = dict->add_subcommand("build", "Build a dictionary CSV");
  std::string build_kind;
  int build_d = 2, build_n = 0;
  double build_p = 2.0, build_mu = 0.5;
  long build_attempts = 1'000'000;
  std::uint64_t build_seed = 0;
  std::string build_out = "dictionary.csv", build_label;
  build->add_option("kind", build_kind, "canonical|random|incoherent")
      ->required();
  build->add_option("--d", build_d, "Ambient dimension")->required();
  build->add_option("--p", build_p, "Ambient l_p exponent")->capture_default_str();
  build->add_option("--n", build_n, "Number of atoms");
  build->add_option("--mu", build_mu, "Coherence bound (incoherent)")->capture_default_str();
  build->add_option("--max-attempts", build_attempts,
                    "Rejection-sampling budget")->capture_default_str();
  build->add_option("--seed", build_seed, "RNG seed")->capture_default_str();
  build->add_option("--out", build_out, "Output CSV path")->capture_default_str();
  build->add_option("--label", build_label, "Dictionary label");

  auto* inspect = dict->add_subcommand("inspect", "Print dictionary metrics");
  std::string inspect_path = "dictionary.csv";
  long inspect_grid = 1'000'000;
  int inspect_restarts = 16;
  inspect->add_option("path", inspect_path, "Dictionary CSV path")->capture_default_str();
  inspect->add_option("--grid", inspect_grid, "Grid size for brute force")
      ->capture_default_str();
  inspect->add_option("--restarts", inspect_restarts,
                      "Restarts for the descent estimate")
      ->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "Run a theorem suite");
  std::string suite_name;
  std::uint64_t verify_seed = 7777;
  int verify_seeds = -1, verify_workers = 0;
  double verify_budget = 0.0;
  std::string verify_out;
  verify->add_option("suite", suite_name, "Suite name")->required();
  verify->add_option("--seed", verify_seed, "Base seed")
      ->capture_default_str();
  verify->add_option("--seeds", verify_seeds, "Number of seeded units");
  verify->add_option("--budget", verify_budget,
                     "Informational time budget in seconds");
  verify->add_option("--out", verify_out, "Directory for report/artifacts");
  verify->add_option("--workers", verify_workers, "Worker count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (run->parsed()) return cmd_run(config_path, run_out, run_workers);
  if (dict->parsed()) {
    if (build->parsed())
      return cmd_dict_build(build_kind, build_d, build_p, build_n, build_mu,
                            build_attempts, build_seed, build_out,
                            build_label);
    return cmd_dict_inspect(inspect_path, inspect_grid, inspect_restarts);
  }
  return cmd_verify(suite_name, verify_seed, verify_seeds, verify_budget,
                    verify_out, verify_workers);
}
