#include "gdesc/experiment.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "gdesc/random.hpp"

namespace gdesc {

namespace {

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ConfigError((path.empty() ? std::string("config") : path) +
                      ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(join_path(path, it.key()) + ": unknown key");
  }
}

double as_double(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
  return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& field) {
  if (!v.is_number_integer())
    throw ConfigError(field + ": expected an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  auto s = v.get<std::int64_t>();
  if (s < 0) throw ConfigError(field + ": must be >= 0");
  return std::uint64_t(s);
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field + ": expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field + ": expected a boolean");
  return v.get<bool>();
}

std::string iso8601_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::wcga: return "wcga";
    case Algorithm::wgafr: return "wgafr";
    case Algorithm::wga: return "wga";
    case Algorithm::woga: return "woga";
    case Algorithm::dga: return "dga";
    case Algorithm::hybrid: return "hybrid";
    case Algorithm::wcga_co: return "wcga_co";
    case Algorithm::wgafr_co: return "wgafr_co";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_string(const std::string& s) {
  for (Algorithm a : {Algorithm::wcga, Algorithm::wgafr, Algorithm::wga,
                      Algorithm::woga, Algorithm::dga, Algorithm::hybrid,
                      Algorithm::wcga_co, Algorithm::wgafr_co})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

bool is_descent(Algorithm a) {
  return a == Algorithm::wcga_co || a == Algorithm::wgafr_co;
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  check_keys(j, "", {"space", "dictionary", "algorithm", "params", "target",
                     "seed", "m_max", "switch_iter", "checks"});
  ExperimentSpec spec;

  if (!j.contains("seed")) throw ConfigError("seed: required");
  spec.seed = as_u64(j.at("seed"), "seed");

  if (j.contains("space")) {
    const json& s = j.at("space");
    check_keys(s, "space", {"d", "p"});
    if (s.contains("d")) spec.space.d = as_int(s.at("d"), "space.d");
    if (s.contains("p")) spec.space.p = as_double(s.at("p"), "space.p");
  }
  if (spec.space.d < 1) throw ConfigError("space.d: must be >= 1");
  if (!(spec.space.p > 1.0) || !std::isfinite(spec.space.p))
    throw ConfigError("space.p: must be a finite number > 1");

  if (j.contains("dictionary")) {
    const json& d = j.at("dictionary");
    check_keys(d, "dictionary", {"kind", "n", "mu", "max_attempts", "path"});
    if (d.contains("kind"))
      spec.dictionary.kind = as_string(d.at("kind"), "dictionary.kind");
    if (d.contains("n")) spec.dictionary.n = as_int(d.at("n"), "dictionary.n");
    if (d.contains("mu"))
      spec.dictionary.mu = as_double(d.at("mu"), "dictionary.mu");
    if (d.contains("max_attempts"))
      spec.dictionary.max_attempts =
          as_int(d.at("max_attempts"), "dictionary.max_attempts");
    if (d.contains("path"))
      spec.dictionary.path = as_string(d.at("path"), "dictionary.path");
  }
  const std::string& kind = spec.dictionary.kind;
  if (kind != "canonical" && kind != "random_sphere" && kind != "incoherent" &&
      kind != "file")
    throw ConfigError("dictionary.kind: unknown value '" + kind + "'");
  if ((kind == "random_sphere" || kind == "incoherent") &&
      spec.dictionary.n < 1)
    throw ConfigError("dictionary.n: must be >= 1");
  if (kind == "incoherent" &&
      (!(spec.dictionary.mu > 0.0) || spec.dictionary.mu >= 1.0))
    throw ConfigError("dictionary.mu: must be in (0, 1)");
  if (kind == "file" && spec.dictionary.path.empty())
    throw ConfigError("dictionary.path: required for kind 'file'");

  if (j.contains("algorithm")) {
    std::string name = as_string(j.at("algorithm"), "algorithm");
    auto a = algorithm_from_string(name);
    if (!a) throw ConfigError("algorithm: unknown value '" + name + "'");
    spec.algorithm = *a;
  }

  if (j.contains("params")) {
    const json& p = j.at("params");
    check_keys(p, "params",
               {"t", "b", "inner_tol", "stop_norm", "first_acceptable"});
    if (p.contains("t")) spec.params.t = as_double(p.at("t"), "params.t");
    if (p.contains("b")) spec.params.b = as_double(p.at("b"), "params.b");
    if (p.contains("inner_tol"))
      spec.params.inner_tol = as_double(p.at("inner_tol"), "params.inner_tol");
    if (p.contains("stop_norm"))
      spec.params.stop_norm = as_double(p.at("stop_norm"), "params.stop_norm");
    if (p.contains("first_acceptable"))
      spec.params.first_acceptable =
          as_bool(p.at("first_acceptable"), "params.first_acceptable");
  }
  if (!(spec.params.t > 0.0) || spec.params.t > 1.0)
    throw ConfigError("params.t: must be in (0, 1]");
  if (!(spec.params.b > 0.0) || !(spec.params.b < 1.0))
    throw ConfigError("params.b: must be in (0, 1)");
  if (!(spec.params.inner_tol > 0.0))
    throw ConfigError("params.inner_tol: must be > 0");
  if (spec.params.stop_norm < 0.0)
    throw ConfigError("params.stop_norm: must be >= 0");

  if (j.contains("m_max")) spec.m_max = as_int(j.at("m_max"), "m_max");
  if (spec.m_max < 0) throw ConfigError("m_max: must be >= 0");
  spec.params.max_iter = spec.m_max;

  if (j.contains("switch_iter")) {
    spec.switch_iter = as_int(j.at("switch_iter"), "switch_iter");
    if (spec.switch_iter < -1)
      throw ConfigError("switch_iter: must be >= -1");
  }

  if (j.contains("target")) {
    const json& t = j.at("target");
    check_keys(t, "target",
               {"kind", "coords", "budget", "sparsity", "epsilon", "phi_path",
                "y_path"});
    if (t.contains("kind"))
      spec.target.kind = as_string(t.at("kind"), "target.kind");
    if (t.contains("coords")) {
      const json& c = t.at("coords");
      if (!c.is_array()) throw ConfigError("target.coords: expected an array");
      spec.target.coords.clear();
      for (size_t i = 0; i < c.size(); ++i)
        spec.target.coords.push_back(
            as_double(c[i], "target.coords[" + std::to_string(i) + "]"));
    }
    if (t.contains("budget"))
      spec.target.budget = as_double(t.at("budget"), "target.budget");
    if (t.contains("sparsity"))
      spec.target.sparsity = as_int(t.at("sparsity"), "target.sparsity");
    if (t.contains("epsilon"))
      spec.target.epsilon = as_double(t.at("epsilon"), "target.epsilon");
    if (t.contains("phi_path"))
      spec.target.phi_path = as_string(t.at("phi_path"), "target.phi_path");
    if (t.contains("y_path"))
      spec.target.y_path = as_string(t.at("y_path"), "target.y_path");
  }
  const std::string& tk = spec.target.kind;
  if (tk != "coords" && tk != "atom_combination" && tk != "sparse" &&
      tk != "sparse_plus_noise" && tk != "lasso")
    throw ConfigError("target.kind: unknown value '" + tk + "'");
  if (tk == "coords" && int(spec.target.coords.size()) != spec.space.d)
    throw ConfigError("target.coords: must have space.d entries");
  if ((tk == "atom_combination" || tk == "sparse" ||
       tk == "sparse_plus_noise") &&
      spec.target.sparsity < 1)
    throw ConfigError("target.sparsity: must be >= 1");
  if (tk == "atom_combination" && !(spec.target.budget > 0.0))
    throw ConfigError("target.budget: must be > 0");
  if (spec.target.epsilon < 0.0)
    throw ConfigError("target.epsilon: must be >= 0");
  if (tk == "lasso") {
    if (spec.target.phi_path.empty())
      throw ConfigError("target.phi_path: required for kind 'lasso'");
    if (spec.target.y_path.empty())
      throw ConfigError("target.y_path: required for kind 'lasso'");
    if (!is_descent(spec.algorithm))
      throw ConfigError(
          "target.kind: 'lasso' requires a descent algorithm (wcga_co or "
          "wgafr_co)");
  }

  if (j.contains("checks")) {
    const json& c = j.at("checks");
    check_keys(c, "checks",
               {"max_slope", "window", "exponential_factor", "plateau"});
    if (c.contains("max_slope"))
      spec.checks.max_slope = as_double(c.at("max_slope"), "checks.max_slope");
    if (c.contains("window")) {
      const json& w = c.at("window");
      if (!w.is_array() || w.size() != 2)
        throw ConfigError("checks.window: expected [m_lo, m_hi]");
      spec.checks.window_lo = as_int(w[0], "checks.window[0]");
      spec.checks.window_hi = as_int(w[1], "checks.window[1]");
      if (spec.checks.window_lo < 1 ||
          spec.checks.window_hi <= spec.checks.window_lo)
        throw ConfigError("checks.window: need 1 <= m_lo < m_hi");
    }
    if (c.contains("exponential_factor")) {
      spec.checks.exponential_factor =
          as_double(c.at("exponential_factor"), "checks.exponential_factor");
      if (!(*spec.checks.exponential_factor > 0.0) ||
          !(*spec.checks.exponential_factor < 1.0))
        throw ConfigError("checks.exponential_factor: must be in (0, 1)");
    }
    if (c.contains("plateau")) {
      spec.checks.plateau = as_double(c.at("plateau"), "checks.plateau");
      if (!(*spec.checks.plateau > 0.0))
        throw ConfigError("checks.plateau: must be > 0");
    }
  }
  return spec;
}

json ExperimentSpec::to_json() const {
  json j;
  j["space"] = json{{"d", space.d}, {"p", space.p}};
  json d{{"kind", dictionary.kind}};
  if (dictionary.kind == "random_sphere" || dictionary.kind == "incoherent")
    d["n"] = dictionary.n;
  if (dictionary.kind == "incoherent") {
    d["mu"] = dictionary.mu;
    d["max_attempts"] = dictionary.max_attempts;
  }
  if (dictionary.kind == "file") d["path"] = dictionary.path.string();
  j["dictionary"] = d;
  j["algorithm"] = gdesc::to_string(algorithm);
  j["params"] = json{{"t", params.t},
                     {"b", params.b},
                     {"inner_tol", params.inner_tol},
                     {"stop_norm", params.stop_norm},
                     {"first_acceptable", params.first_acceptable}};
  j["m_max"] = m_max;
  if (algorithm == Algorithm::hybrid) j["switch_iter"] = switch_iter;
  j["seed"] = seed;
  json t{{"kind", target.kind}};
  if (target.kind == "coords") t["coords"] = target.coords;
  if (target.kind == "atom_combination") {
    t["budget"] = target.budget;
    t["sparsity"] = target.sparsity;
  }
  if (target.kind == "sparse" || target.kind == "sparse_plus_noise")
    t["sparsity"] = target.sparsity;
  if (target.kind != "coords" && target.kind != "lasso")
    t["epsilon"] = target.epsilon;
  if (target.kind == "lasso") {
    t["phi_path"] = target.phi_path.string();
    t["y_path"] = target.y_path.string();
  }
  j["target"] = t;
  json c;
  if (checks.max_slope) {
    c["max_slope"] = *checks.max_slope;
    c["window"] = {checks.window_lo, checks.window_hi};
  }
  if (checks.exponential_factor)
    c["exponential_factor"] = *checks.exponential_factor;
  if (checks.plateau) c["plateau"] = *checks.plateau;
  if (!c.empty()) j["checks"] = c;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j, "",
             {"space", "dictionary", "algorithm", "params", "target", "seed",
              "m_max", "switch_iter", "checks", "out_dir", "formats",
              "verbosity", "workers"});
  RunConfig cfg;
  json spec_json = j;
  for (const char* k : {"out_dir", "formats", "verbosity", "workers"})
    spec_json.erase(k);
  cfg.spec = ExperimentSpec::from_json(spec_json);
  if (j.contains("out_dir"))
    cfg.out_dir = as_string(j.at("out_dir"), "out_dir");
  if (j.contains("formats")) {
    const json& f = j.at("formats");
    if (!f.is_array()) throw ConfigError("formats: expected an array");
    cfg.write_csv = false;
    cfg.write_json = false;
    for (size_t i = 0; i < f.size(); ++i) {
      std::string v = as_string(f[i], "formats[" + std::to_string(i) + "]");
      if (v == "csv")
        cfg.write_csv = true;
      else if (v == "json")
        cfg.write_json = true;
      else
        throw ConfigError("formats[" + std::to_string(i) +
                          "]: expected 'csv' or 'json'");
    }
  }
  if (j.contains("verbosity")) {
    cfg.verbosity = as_int(j.at("verbosity"), "verbosity");
    if (cfg.verbosity < 0) throw ConfigError("verbosity: must be >= 0");
  }
  if (j.contains("workers"))
    cfg.workers = as_int(j.at("workers"), "workers");
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return from_json(j);
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("matrix csv: cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("matrix csv: bad number '" + cell + "' in " +
                          path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("matrix csv: ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw ConfigError("matrix csv: no data in " + path.string());
  Matrix m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  return m;
}

Vector load_vector_csv(const std::filesystem::path& path) {
  Matrix m = load_matrix_csv(path);
  if (m.rows() != 1 && m.cols() != 1)
    throw ConfigError("vector csv: expected one row or one column in " +
                      path.string());
  if (m.rows() == 1) return m.row(0).transpose();
  return m.col(0);
}

namespace {

Dictionary build_dictionary(const ExperimentSpec& spec, const SmoothSpace& sp,
                            json* dict_metrics) {
  const auto& d = spec.dictionary;
  if (d.kind == "canonical") return build_canonical(sp);
  if (d.kind == "random_sphere")
    return build_random_sphere(sp, d.n, mix_seed(spec.seed, 0xd1c7));
  if (d.kind == "incoherent") {
    PackingResult pack = build_incoherent(sp.dim(), d.n, d.mu, d.max_attempts,
                                          mix_seed(spec.seed, 0xd1c7));
    if (dict_metrics)
      (*dict_metrics)["packing"] = json{{"requested", pack.requested},
                                        {"achieved", pack.achieved},
                                        {"attempts", pack.attempts}};
    return pack.dict;
  }
  Dictionary dict = Dictionary::load_csv(d.path);
  if (dict.dim() != sp.dim())
    throw ConfigError("dictionary.path: dimension " +
                      std::to_string(dict.dim()) + " does not match space.d " +
                      std::to_string(sp.dim()));
  return dict;
}

Vector ambient_unit_noise(const SmoothSpace& sp, std::uint64_t seed) {
  auto rng = make_rng(seed);
  Vector u = random_gaussian(sp.dim(), rng);
  double n = sp.norm(u);
  if (n < 1e-300) {
    u = Vector::Zero(sp.dim());
    u[0] = 1.0;
    n = 1.0;
  }
  return u / n;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config) {
  const ExperimentSpec& spec = config.spec;
  SmoothSpace sp = SmoothSpace::lp(spec.space.d, spec.space.p);

  json metrics;
  json dict_metrics;
  std::optional<Dictionary> dict;
  std::optional<Energy> energy;
  Vector f0;

  if (spec.target.kind == "lasso") {
    Matrix phi = load_matrix_csv(spec.target.phi_path);
    Vector y = load_vector_csv(spec.target.y_path);
    if (phi.rows() != y.size())
      throw ConfigError("target.y_path: length " + std::to_string(y.size()) +
                        " does not match phi rows " +
                        std::to_string(phi.rows()));
    LassoRecast recast = lasso_recast(phi, y);
    if (recast.dict.dim() != sp.dim())
      throw ConfigError("space.d: must equal the lasso row count " +
                        std::to_string(recast.dict.dim()));
    dict = recast.dict;
    energy = recast.energy;
  } else {
    dict = build_dictionary(spec, sp, &dict_metrics);
    if (spec.target.kind == "coords") {
      f0 = Vector(spec.space.d);
      for (int i = 0; i < spec.space.d; ++i) f0[i] = spec.target.coords[i];
    } else if (spec.target.kind == "atom_combination") {
      f0 = random_atomic_target(*dict, spec.target.budget,
                                spec.target.sparsity,
                                mix_seed(spec.seed, 0x7a36));
    } else {
      f0 = random_sparse_target(*dict, spec.target.sparsity,
                                mix_seed(spec.seed, 0x7a36));
    }
    if (spec.target.epsilon > 0.0 && spec.target.kind != "coords")
      f0 += spec.target.epsilon *
            ambient_unit_noise(sp, mix_seed(spec.seed, 0x03e));
    if (is_descent(spec.algorithm)) energy = make_quadratic_energy(f0);
  }

  const Algorithm algo = spec.algorithm;
  if ((algo == Algorithm::wga || algo == Algorithm::woga ||
       algo == Algorithm::hybrid) &&
      sp.p() != 2.0)
    throw ConfigError("space.p: algorithm '" + to_string(algo) +
                      "' requires p = 2");

  std::optional<Trace> trace;
  std::optional<DescentTrace> descent_trace;
  bool pass = true;
  json checks_out;

  if (is_descent(algo)) {
    DescentTrace tr = algo == Algorithm::wcga_co
                          ? run_wcga_co(*energy, *dict, sp, spec.params)
                          : run_wgafr_co(*energy, *dict, sp, spec.params);
    double final_e =
        tr.rows.empty() ? tr.initial_energy : tr.rows.back().energy;
    metrics["initial_energy"] = tr.initial_energy;
    metrics["final_energy"] = final_e;
    metrics["iterations"] = int(tr.rows.size());
    metrics["optimum_reached"] = tr.optimum_reached;
    if (energy->known_min) {
      double gap = tr.rows.empty() ? tr.initial_energy - *energy->known_min
                                   : tr.rows.back().energy_gap;
      metrics["final_gap"] = gap;
      if (spec.checks.max_slope) {
        std::vector<double> gaps;
        for (const auto& r : tr.rows) gaps.push_back(r.energy_gap);
        bool ok = false;
        json detail = rate_check_with_collapse(
            gaps, 1e-24 * std::max(tr.initial_energy, 1e-300),
            spec.checks.window_lo, std::min(spec.checks.window_hi, spec.m_max),
            *spec.checks.max_slope, &ok);
        detail["ok"] = ok;
        checks_out["slope"] = detail;
        pass = pass && ok;
      }
      if (spec.checks.plateau) {
        bool ok = gap <= *spec.checks.plateau;
        checks_out["plateau"] = json{{"final_gap", gap}, {"ok", ok}};
        pass = pass && ok;
      }
    } else if (spec.checks.max_slope || spec.checks.plateau) {
      checks_out["skipped"] = "known_min absent; gap checks skipped";
    }
    descent_trace = std::move(tr);
  } else {
    Trace tr;
    json extra;
    switch (algo) {
      case Algorithm::wcga:
        tr = run_wcga(f0, *dict, sp, spec.params);
        break;
      case Algorithm::wgafr:
        tr = run_wgafr(f0, *dict, sp, spec.params);
        break;
      case Algorithm::wga:
        tr = run_wga(f0, *dict, spec.params);
        break;
      case Algorithm::woga:
        tr = run_woga(f0, *dict, spec.params);
        break;
      case Algorithm::hybrid:
        tr = run_hybrid(f0, *dict, spec.params, spec.switch_iter);
        if (tr.phase_switch) extra["phase_switch"] = *tr.phase_switch;
        break;
      case Algorithm::dga: {
        DgaResult res = run_dga(f0, *dict, sp, spec.params);
        extra["coefficient_sum"] = res.coefficient_sum;
        tr = std::move(res.trace);
        break;
      }
      default:
        break;
    }
    double final_r =
        tr.rows.empty() ? tr.initial_norm : tr.rows.back().residual_norm;
    metrics["initial_norm"] = tr.initial_norm;
    metrics["final_residual"] = final_r;
    metrics["iterations"] = int(tr.rows.size());
    metrics["stagnated"] = tr.stagnated;
    for (auto it = extra.begin(); it != extra.end(); ++it)
      metrics[it.key()] = it.value();

    std::vector<double> residuals;
    residuals.reserve(tr.rows.size());
    for (const auto& r : tr.rows) residuals.push_back(r.residual_norm);

    if (spec.checks.max_slope) {
      bool ok = false;
      json detail = rate_check_with_collapse(
          residuals, 1e-12 * tr.initial_norm, spec.checks.window_lo,
          std::min(spec.checks.window_hi, spec.m_max), *spec.checks.max_slope,
          &ok);
      detail["ok"] = ok;
      checks_out["slope"] = detail;
      pass = pass && ok;
    }
    if (spec.checks.exponential_factor) {
      ExponentialReport er =
          check_exponential(tr, *spec.checks.exponential_factor);
      checks_out["exponential"] = json{{"pass", er.pass},
                                       {"worst_ratio", er.worst_ratio},
                                       {"first_violation", er.first_violation}};
      pass = pass && er.pass;
    }
    if (spec.checks.plateau) {
      bool ok = final_r <= *spec.checks.plateau;
      checks_out["plateau"] = json{{"final_residual", final_r}, {"ok", ok}};
      pass = pass && ok;
    }
    trace = std::move(tr);
  }

  if (!dict_metrics.empty())
    for (auto it = dict_metrics.begin(); it != dict_metrics.end(); ++it)
      metrics[it.key()] = it.value();
  if (!checks_out.empty()) metrics["checks"] = checks_out;

  ExperimentResult result;
  result.pass = pass;
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    if (config.write_csv) {
      if (trace) trace->save_csv(config.out_dir / "trace.csv");
      if (descent_trace)
        descent_trace->save_csv(config.out_dir / "trace.csv");
      result.artifacts.push_back("trace.csv");
    }
    if (config.write_json) result.artifacts.push_back("report.json");
  }

  result.report = json{{"command", "run"},
                       {"spec", spec.to_json()},
                       {"seed", spec.seed},
                       {"metrics", metrics},
                       {"pass", pass},
                       {"artifacts", result.artifacts},
                       {"timestamp", iso8601_now()}};
  if (!config.out_dir.empty() && config.write_json) {
    std::ofstream out(config.out_dir / "report.json");
    if (!out)
      throw std::runtime_error("run_experiment: cannot write report.json");
    out << result.report.dump(2) << "\n";
  }
  return result;
}

}  // namespace gdesc
