#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdesc/verify.hpp"

namespace gdesc {

// A malformed or invalid configuration; the CLI maps this to exit code 2.
// The message names the offending field path (e.g. "params.t").
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Algorithm { wcga, wgafr, wga, woga, dga, hybrid, wcga_co, wgafr_co };

std::string to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(const std::string& s);
bool is_descent(Algorithm a);

// Declarative description of one run. Every field has a deterministic
// effect given the seed; parsing rejects unknown keys with the full path.
struct ExperimentSpec {
  struct Space {
    int d = 2;
    double p = 2.0;
  } space;

  struct Dict {
    std::string kind = "canonical";  // canonical|random_sphere|incoherent|file
    int n = 0;
    double mu = 0.0;
    long max_attempts = 1'000'000;
    std::filesystem::path path;  // kind == "file"
  } dictionary;

  Algorithm algorithm = Algorithm::woga;
  GreedyConfig params;
  int m_max = 100;
  int switch_iter = -1;  // hybrid only; -1 = ceil(sqrt(d))
  std::uint64_t seed = 0;

  struct Target {
    std::string kind = "coords";  // coords|atom_combination|sparse|
                                  // sparse_plus_noise|lasso
    std::vector<double> coords;
    double budget = 1.0;
    int sparsity = 1;
    double epsilon = 0.0;
    std::filesystem::path phi_path;  // lasso
    std::filesystem::path y_path;
  } target;

  struct Checks {
    std::optional<double> max_slope;
    int window_lo = 16;
    int window_hi = 256;
    std::optional<double> exponential_factor;
    std::optional<double> plateau;
  } checks;

  static ExperimentSpec from_json(const json& j);
  json to_json() const;
};

// ExperimentSpec plus output plumbing; the on-disk config is one strict
// JSON document covering both.
struct RunConfig {
  ExperimentSpec spec;
  std::filesystem::path out_dir = ".";
  bool write_csv = true;
  bool write_json = true;
  int verbosity = 1;
  int workers = 0;

  static RunConfig from_json(const json& j);
  static RunConfig load(const std::filesystem::path& path);
};

struct ExperimentResult {
  json report;  // {command, spec, seed, metrics, pass, artifacts, timestamp}
  bool pass = false;
  std::vector<std::string> artifacts;
};

// Runs the experiment and, when out_dir is non-empty, writes trace CSV and
// report JSON there. The report's timestamp field is the only
// non-deterministic output.
ExperimentResult run_experiment(const RunConfig& config);

Matrix load_matrix_csv(const std::filesystem::path& path);
Vector load_vector_csv(const std::filesystem::path& path);

}  // namespace gdesc
