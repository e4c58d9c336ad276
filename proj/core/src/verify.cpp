#include "gdesc/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "detail.hpp"
#include "gdesc/random.hpp"

namespace gdesc {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit linear_fit(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  const size_t n = xs.size();
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0) {
    double ssres = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ssres += e * e;
    }
    fit.r_squared = 1.0 - ssres / syy;
  } else {
    fit.r_squared = 1.0;
  }
  return fit;
}

double binom_capped(int n, int k, double cap) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * double(n - k + i) / double(i);
    if (c > cap) return cap + 1.0;
  }
  return c;
}

void for_each_combination(const std::vector<int>& items, int k,
                          const std::function<void(const std::vector<int>&)>& fn) {
  const int n = int(items.size());
  if (k > n) return;
  if (k == 0) {
    fn({});
    return;
  }
  std::vector<int> pos(k);
  std::iota(pos.begin(), pos.end(), 0);
  std::vector<int> picked(k);
  while (true) {
    for (int i = 0; i < k; ++i) picked[i] = items[pos[i]];
    fn(picked);
    int i = k - 1;
    while (i >= 0 && pos[i] == n - k + i) --i;
    if (i < 0) break;
    ++pos[i];
    for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace

RateFit fit_rate(const std::vector<double>& values, int m_lo, int m_hi,
                 double floor) {
  if (m_lo < 1 || m_hi <= m_lo)
    throw std::invalid_argument("fit_rate: need 1 <= m_lo < m_hi");
  int hi = std::min<int>(m_hi, int(values.size()));
  int effective_hi = hi;
  for (int m = m_lo; m <= hi; ++m) {
    if (!(values[m - 1] > floor)) {
      effective_hi = m - 1;
      break;
    }
  }
  int pts = effective_hi - m_lo + 1;
  if (pts < 8)
    throw std::invalid_argument(
        "fit_rate: window too small after truncation (" +
        std::to_string(std::max(pts, 0)) + " points)");
  std::vector<double> xs, ys;
  xs.reserve(pts);
  ys.reserve(pts);
  for (int m = m_lo; m <= effective_hi; ++m) {
    xs.push_back(std::log(double(m)));
    ys.push_back(std::log(values[m - 1]));
  }
  LineFit fit = linear_fit(xs, ys);
  return {m_lo, effective_hi, fit.slope, fit.intercept, fit.r_squared, pts};
}

ExponentialReport check_exponential(const std::vector<double>& values,
                                    double factor) {
  if (!(factor > 0.0) || !(factor < 1.0))
    throw std::invalid_argument("check_exponential: factor must be in (0, 1)");
  if (values.empty())
    throw std::invalid_argument("check_exponential: empty trace");
  ExponentialReport rep;
  rep.pass = true;
  double v0 = values[0];
  double powf = 1.0;
  for (size_t m = 1; m < values.size(); ++m) {
    powf *= factor;
    double bound = powf * v0 * (1.0 + 1e-9);
    double ratio;
    if (bound > 0.0)
      ratio = values[m] / bound;
    else
      ratio = values[m] == 0.0 ? 0.0
                               : std::numeric_limits<double>::infinity();
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    if (values[m] > bound) {
      rep.pass = false;
      rep.first_violation = int(m);
      break;
    }
  }
  return rep;
}

ExponentialReport check_exponential(const Trace& trace, double factor) {
  std::vector<double> values;
  values.reserve(trace.rows.size() + 1);
  values.push_back(trace.initial_norm);
  for (const auto& r : trace.rows) values.push_back(r.residual_norm);
  return check_exponential(values, factor);
}

DecayClassification classify_decay(const std::vector<double>& values,
                                   double floor) {
  DecayClassification out;
  std::vector<double> ms, logs;
  for (size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > floor)) break;
    ms.push_back(double(k + 1));
    logs.push_back(std::log(values[k]));
  }
  if (ms.size() < 3) return out;
  std::vector<double> log_ms(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) log_ms[i] = std::log(ms[i]);
  out.exponential_r2 = linear_fit(ms, logs).r_squared;
  out.power_r2 = linear_fit(log_ms, logs).r_squared;
  if (std::max(out.exponential_r2, out.power_r2) < 0.8) {
    out.kind = DecayKind::undetermined;
  } else {
    out.kind = out.exponential_r2 >= out.power_r2 ? DecayKind::exponential
                                                  : DecayKind::power_law;
  }
  return out;
}

double sigma_m_bruteforce(const Vector& f0, const Dictionary& dict, int m) {
  if (f0.size() != dict.dim())
    throw std::invalid_argument("sigma_m_bruteforce: dimension mismatch");
  if (m < 0)
    throw std::invalid_argument("sigma_m_bruteforce: m must be >= 0");
  const SmoothSpace& sp = dict.ambient();
  if (m == 0) return sp.norm(f0);
  const int n = dict.size();
  const int k = std::min(m, n);
  if (binom_capped(n, k, 1e6) > 1e6)
    throw BudgetExceeded("sigma_m_bruteforce: C(N, m) exceeds 1e6");

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  Matrix sub(dict.dim(), k);
  for_each_combination(all, k, [&](const std::vector<int>& picked) {
    for (int i = 0; i < k; ++i) sub.col(i) = dict.atom(picked[i]);
    Vector c;
    if (sp.p() == 2.0)
      c = sub.completeOrthogonalDecomposition().solve(f0);
    else
      c = detail::lp_span_min(f0, sub, sp.p(), 1e-11, Vector());
    best = std::min(best, sp.norm(f0 - sub * c));
  });
  return best;
}

LebesgueReport check_lebesgue(const Dictionary& dict, const Vector& f0, int m,
                              double C1, double C2, double c3) {
  if (dict.ambient().p() != 2.0)
    throw std::invalid_argument("check_lebesgue: requires p = 2");
  if (m < 0) throw std::invalid_argument("check_lebesgue: m must be >= 0");
  if (!(C1 > 0.0) || !(C2 > 0.0) || !(c3 > 0.0))
    throw std::invalid_argument("check_lebesgue: constants must be positive");

  LebesgueReport rep;
  rep.mu = coherence(dict);
  if (rep.mu > 0.0 && double(m) > c3 / rep.mu + 1e-12)
    throw std::invalid_argument("check_lebesgue: m exceeds c3 / coherence");
  rep.m = m;
  rep.iterations = int(std::ceil(C1 * m));
  rep.sigma_m = sigma_m_bruteforce(f0, dict, m);

  GreedyConfig cfg;
  cfg.max_iter = rep.iterations;
  cfg.stop_norm = 0.0;
  Trace tr = run_woga(f0, dict, cfg);
  rep.residual =
      tr.rows.empty() ? tr.initial_norm : tr.rows.back().residual_norm;
  rep.ratio = rep.sigma_m > 0.0
                  ? rep.residual / rep.sigma_m
                  : (rep.residual <= 1e-10
                         ? 0.0
                         : std::numeric_limits<double>::infinity());
  rep.pass = rep.residual <= C2 * rep.sigma_m + 1e-10;
  return rep;
}

void IncoherenceProfile::validate() const {
  if (K < 1) throw std::invalid_argument("IncoherenceProfile: K must be >= 1");
  if (Dmax < K)
    throw std::invalid_argument("IncoherenceProfile: K must be <= Dmax");
  if (r < 0.0 || r > 1.0)
    throw std::invalid_argument("IncoherenceProfile: r must be in [0, 1]");
}

PropertyAReport check_property_A(const Dictionary& dict,
                                 const IncoherenceProfile& profile,
                                 const std::vector<int>& support,
                                 const Vector& coeffs) {
  profile.validate();
  if (dict.ambient().p() != 2.0)
    throw std::invalid_argument("check_property_A: requires p = 2");
  if (int(support.size()) != coeffs.size())
    throw std::invalid_argument(
        "check_property_A: support/coefficient size mismatch");
  const int n = dict.size();
  {
    std::vector<int> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] < 0 || sorted[i] >= n)
        throw std::invalid_argument("check_property_A: support out of range");
      if (i > 0 && sorted[i] == sorted[i - 1])
        throw std::invalid_argument("check_property_A: duplicate support");
    }
  }

  const int s = int(support.size());
  double total = 0.0;
  for (int a = 1; a <= std::min(profile.K, s); ++a) {
    double na = binom_capped(s, a, 1e5);
    double nl = 0.0;
    for (int l = 0; l <= profile.Dmax - a; ++l)
      nl += binom_capped(n - a, l, 1e5);
    total += na * nl;
    if (total > 1e5)
      throw BudgetExceeded("check_property_A: pair budget of 1e5 exceeded");
  }

  PropertyAReport rep;
  rep.r = profile.r;
  std::vector<int> positions(s);
  std::iota(positions.begin(), positions.end(), 0);

  for (int a = 1; a <= std::min(profile.K, s); ++a) {
    for_each_combination(positions, a, [&](const std::vector<int>& apos) {
      double lhs = 0.0;
      Vector fa = Vector::Zero(dict.dim());
      std::vector<char> in_a(n, 0);
      for (int pos : apos) {
        lhs += std::abs(coeffs[pos]);
        fa += coeffs[pos] * dict.atom(support[pos]);
        in_a[support[pos]] = 1;
      }
      double norm_a = std::pow(double(a), profile.r);
      std::vector<int> others;
      others.reserve(n - a);
      for (int j = 0; j < n; ++j)
        if (!in_a[j]) others.push_back(j);
      double fa_norm = fa.norm();
      for (int l = 0; l <= profile.Dmax - a; ++l) {
        for_each_combination(others, l, [&](const std::vector<int>& lam) {
          ++rep.pairs;
          double dist;
          if (lam.empty()) {
            dist = fa_norm;
          } else {
            Matrix sub(dict.dim(), lam.size());
            for (size_t i = 0; i < lam.size(); ++i)
              sub.col(i) = dict.atom(lam[i]);
            Vector c = sub.completeOrthogonalDecomposition().solve(fa);
            dist = (fa - sub * c).norm();
          }
          if (dist <= 1e-13 * std::max(1.0, fa_norm)) {
            rep.min_V = std::numeric_limits<double>::infinity();
          } else {
            rep.min_V = std::max(rep.min_V, lhs / (norm_a * dist));
          }
        });
      }
    });
  }
  rep.pass = profile.V > 0.0 ? rep.min_V <= profile.V * (1.0 + 1e-9) : true;
  return rep;
}

json rate_check_with_collapse(const std::vector<double>& values, double floor,
                              int m_lo, int m_hi, double max_slope,
                              bool* ok) {
  try {
    RateFit fit = fit_rate(values, m_lo, m_hi, floor);
    *ok = fit.slope <= max_slope;
    return json{{"slope", fit.slope},
                {"r_squared", fit.r_squared},
                {"points", fit.points},
                {"collapsed_at", nullptr}};
  } catch (const std::invalid_argument&) {
    int collapse = 0;
    for (size_t k = 0; k < values.size(); ++k) {
      if (!(values[k] > floor)) {
        collapse = int(k + 1);
        break;
      }
    }
    *ok = collapse > 0;
    return json{
        {"slope", nullptr},
        {"r_squared", nullptr},
        {"points", 0},
        {"collapsed_at", collapse > 0 ? json(collapse) : json(nullptr)}};
  }
}

Vector random_atomic_target(const Dictionary& dict, double budget,
                            int sparsity, std::uint64_t seed) {
  if (sparsity < 1)
    throw std::invalid_argument("random_atomic_target: sparsity must be >= 1");
  auto rng = make_rng(seed);
  const int n = dict.size();
  const int s = std::min(sparsity, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < s; ++k) {
    std::uniform_int_distribution<int> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w(s);
  double tot = 0.0;
  for (int k = 0; k < s; ++k) {
    w[k] = unif(rng) + 1e-6;
    tot += w[k];
  }
  Vector f = Vector::Zero(dict.dim());
  for (int k = 0; k < s; ++k) {
    double sign = unif(rng) < 0.5 ? 1.0 : -1.0;
    f += sign * budget * (w[k] / tot) * dict.atom(idx[k]);
  }
  return f;
}

Vector random_sparse_target(const Dictionary& dict, int sparsity,
                            std::uint64_t seed, std::vector<int>* support,
                            Vector* coeffs) {
  if (sparsity < 1)
    throw std::invalid_argument("random_sparse_target: sparsity must be >= 1");
  auto rng = make_rng(seed);
  const int n = dict.size();
  const int s = std::min(sparsity, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < s; ++k) {
    std::uniform_int_distribution<int> pick(k, n - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector full = Vector::Zero(n);
  Vector f = Vector::Zero(dict.dim());
  if (support) support->clear();
  for (int k = 0; k < s; ++k) {
    double c = mag(rng) * (unif(rng) < 0.5 ? 1.0 : -1.0);
    full[idx[k]] = c;
    f += c * dict.atom(idx[k]);
    if (support) support->push_back(idx[k]);
  }
  if (coeffs) *coeffs = full;
  return f;
}

// --- suites -------------------------------------------------------------

std::string to_string(SuiteName name) {
  switch (name) {
    case SuiteName::T1_1: return "T1_1";
    case SuiteName::T1_2: return "T1_2";
    case SuiteName::T2_4: return "T2_4";
    case SuiteName::T3_1: return "T3_1";
    case SuiteName::T3_3: return "T3_3";
    case SuiteName::eq_2_6: return "eq_2_6";
    case SuiteName::eq_2_8: return "eq_2_8";
    case SuiteName::lemma_2_1: return "lemma_2_1";
    case SuiteName::lemma_2_2: return "lemma_2_2";
    case SuiteName::sec_3_1_equiv: return "sec_3_1_equiv";
  }
  return "unknown";
}

std::optional<SuiteName> suite_from_string(const std::string& s) {
  for (SuiteName name : all_suites())
    if (to_string(name) == s) return name;
  return std::nullopt;
}

std::vector<SuiteName> all_suites() {
  return {SuiteName::T1_1,      SuiteName::T1_2,   SuiteName::T2_4,
          SuiteName::T3_1,      SuiteName::T3_3,   SuiteName::eq_2_6,
          SuiteName::eq_2_8,    SuiteName::lemma_2_1,
          SuiteName::lemma_2_2, SuiteName::sec_3_1_equiv};
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GREEDY_DESCENT_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

namespace {

struct UnitOut {
  json metrics;
  bool pass = true;
  std::vector<std::string> artifacts;
};

// Work-stealing over unit indices; each unit derives its randomness from
// mix_seed, so results are identical for any worker count.
std::vector<UnitOut> run_units(int n, int workers,
                               const std::function<UnitOut(int)>& fn) {
  std::vector<UnitOut> out(n);
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

// Packings this tight (40 atoms at mu <= 0.25 in 20 dimensions) are out of
// reach for rejection sampling, which saturates near 26 atoms. Alternating
// projection between the clipped Gram matrix and the rank-d factor set
// reaches the target in a few dozen iterations.
Dictionary incoherent_fixture(int d, int n, double target, std::uint64_t seed,
                              int* iterations) {
  auto rng = make_rng(seed);
  Matrix a(d, n);
  for (int j = 0; j < n; ++j) a.col(j) = random_l2_unit(d, rng);
  const double clip = 0.9 * target;
  int it = 0;
  for (; it < 2000; ++it) {
    Matrix gram = a.transpose() * a;
    double mu = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        mu = std::max(mu, std::abs(gram(i, j)));
    if (mu <= target - 0.01) break;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) gram(i, j) = std::clamp(gram(i, j), -clip, clip);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    Vector scale = eig.eigenvalues().tail(d).cwiseMax(0.0).cwiseSqrt();
    Matrix b = (eig.eigenvectors().rightCols(d) * scale.asDiagonal())
                   .transpose();
    for (int j = 0; j < n; ++j) {
      double nn = b.col(j).norm();
      a.col(j) = nn > 1e-12 ? Vector(b.col(j) / nn) : a.col(j);
    }
  }
  if (iterations) *iterations = it;
  return Dictionary(a, SmoothSpace::lp(d, 2.0), "incoherent_frame");
}

Matrix equiangular3_atoms() {
  Matrix atoms(2, 3);
  const double angles[3] = {0.0, M_PI / 3.0, 2.0 * M_PI / 3.0};
  for (int j = 0; j < 3; ++j) {
    atoms(0, j) = std::cos(angles[j]);
    atoms(1, j) = std::sin(angles[j]);
  }
  return atoms;
}

std::vector<double> residuals_of(const Trace& tr) {
  std::vector<double> v;
  v.reserve(tr.rows.size());
  for (const auto& r : tr.rows) v.push_back(r.residual_norm);
  return v;
}

std::vector<double> gaps_of(const DescentTrace& tr) {
  std::vector<double> v;
  v.reserve(tr.rows.size());
  for (const auto& r : tr.rows) v.push_back(r.energy_gap);
  return v;
}

std::string write_artifact(const SuiteOptions& opt, const std::string& name,
                           const std::function<void(const std::filesystem::path&)>& writer) {
  if (opt.out_dir.empty()) return {};
  std::filesystem::create_directories(opt.out_dir);
  writer(opt.out_dir / name);
  return name;
}

// --- T1_1: residual-norm rate and noise plateau ------------------------

SuiteReport suite_T1_1(const SuiteOptions& opt) {
  const int seeds = opt.seeds > 0 ? opt.seeds : 10;
  const int d = 16, n_atoms = 64, m_max = 256;
  const int w_lo = 16, w_hi = 256;
  const double budget = 1.0, epsilon = 1e-3, max_slope = -0.4;
  const double plateau = 2.0 * epsilon * 1.5;
  const int min_pass = std::max(1, seeds - 2);
  const std::vector<std::string> algos = {"wcga", "wgafr", "woga"};

  SuiteReport rep;
  rep.suite = to_string(SuiteName::T1_1);
  rep.seed = opt.seed;
  rep.spec = json{{"d", d},           {"N", n_atoms},
                  {"seeds", seeds},   {"m_max", m_max},
                  {"window", {w_lo, w_hi}}, {"budget_B", budget},
                  {"sparsity", 20},   {"epsilon", epsilon},
                  {"max_slope", max_slope}, {"plateau", plateau},
                  {"algorithms", algos},    {"min_pass_seeds", min_pass}};

  SmoothSpace sp = SmoothSpace::lp(d, 2.0);
  GreedyConfig cfg;
  cfg.max_iter = m_max;

  auto run_algo = [&](const std::string& name, const Vector& f0,
                      const Dictionary& dict) -> Trace {
    if (name == "wcga") return run_wcga(f0, dict, sp, cfg);
    if (name == "wgafr") return run_wgafr(f0, dict, sp, cfg);
    return run_woga(f0, dict, cfg);
  };

  auto units = run_units(seeds, resolve_workers(opt.workers), [&](int i) {
    UnitOut u;
    std::uint64_t base = mix_seed(opt.seed, i);
    Dictionary dict = build_random_sphere(sp, n_atoms, mix_seed(base, 1));
    Vector f0 = random_atomic_target(dict, budget, 20, mix_seed(base, 2));
    auto rng = make_rng(mix_seed(base, 3));
    Vector noisy = f0 + epsilon * random_l2_unit(d, rng);

    json per;
    for (const auto& name : algos) {
      Trace clean = run_algo(name, f0, dict);
      bool rate_ok = false;
      json rate = rate_check_with_collapse(residuals_of(clean),
                                           1e-12 * clean.initial_norm, w_lo,
                                           w_hi, max_slope, &rate_ok);
      Trace noised = run_algo(name, noisy, dict);
      double final_res = noised.rows.empty() ? noised.initial_norm
                                             : noised.rows.back().residual_norm;
      bool noise_ok = final_res <= plateau;
      per[name] = json{{"rate", rate},
                       {"rate_ok", rate_ok},
                       {"noise_final", final_res},
                       {"noise_ok", noise_ok}};
      if (i == 0) {
        std::string a = write_artifact(
            opt, "T1_1_" + name + "_seed0_trace.csv",
            [&](const std::filesystem::path& p) { clean.save_csv(p); });
        if (!a.empty()) u.artifacts.push_back(a);
      }
    }
    u.metrics = json{{"seed", base}, {"algorithms", per}};
    return u;
  });

  json per_seed = json::array();
  json counts, noise_counts;
  bool pass = true;
  for (const auto& name : algos) {
    int rate_n = 0, noise_n = 0;
    for (const auto& u : units) {
      if (u.metrics["algorithms"][name]["rate_ok"].get<bool>()) ++rate_n;
      if (u.metrics["algorithms"][name]["noise_ok"].get<bool>()) ++noise_n;
    }
    counts[name] = rate_n;
    noise_counts[name] = noise_n;
    pass = pass && rate_n >= min_pass && noise_n >= min_pass;
  }
  for (auto& u : units) {
    per_seed.push_back(u.metrics);
    for (auto& a : u.artifacts) rep.artifacts.push_back(a);
  }
  rep.metrics = json{{"rate_pass_counts", counts},
                     {"noise_pass_counts", noise_counts},
                     {"per_seed", per_seed}};
  rep.pass = pass;
  return rep;
}

// --- T1_2 / T3_1: energy-gap rates ---------------------------------------

SuiteReport suite_energy_rates(SuiteName which, const SuiteOptions& opt) {
  const bool canonical = which == SuiteName::T3_1;
  const int seeds = opt.seeds > 0 ? opt.seeds : 10;
  const int d = 16, n_atoms = canonical ? 16 : 64, m_max = 256;
  const int w_lo = 16, w_hi = 256;
  const double max_slope = -0.8;
  const int min_pass = std::max(1, seeds - 2);
  const std::vector<std::string> algos = {"wcga_co", "wgafr_co"};

  SuiteReport rep;
  rep.suite = to_string(which);
  rep.seed = opt.seed;
  rep.spec = json{{"d", d},
                  {"N", n_atoms},
                  {"dictionary", canonical ? "canonical" : "random_sphere"},
                  {"seeds", seeds},
                  {"m_max", m_max},
                  {"window", {w_lo, w_hi}},
                  {"max_slope", max_slope},
                  {"algorithms", algos},
                  {"certified_beta", canonical ? json(0.25) : json(nullptr)},
                  {"min_pass_seeds", min_pass}};

  SmoothSpace sp = SmoothSpace::lp(d, 2.0);
  GreedyConfig cfg;
  cfg.max_iter = m_max;

  auto units = run_units(seeds, resolve_workers(opt.workers), [&](int i) {
    UnitOut u;
    std::uint64_t base = mix_seed(opt.seed, i);
    Dictionary dict = canonical
                          ? build_canonical(sp)
                          : build_random_sphere(sp, n_atoms, mix_seed(base, 1));
    Vector y =
        random_atomic_target(dict, 1.0, canonical ? d : 20, mix_seed(base, 2));
    Energy energy = make_quadratic_energy(y);
    std::optional<double> beta;
    if (canonical) beta = 0.25;

    json per;
    bool unit_pointwise = true;
    for (const auto& name : algos) {
      DescentTrace tr =
          name == "wcga_co"
              ? run_wcga_co(energy, dict, sp, cfg, beta)
              : run_wgafr_co(energy, dict, sp, cfg, beta);
      bool rate_ok = false;
      double floor = 1e-24 * std::max(tr.initial_energy, 1e-300);
      json rate = rate_check_with_collapse(gaps_of(tr), floor, w_lo, w_hi,
                                           max_slope, &rate_ok);
      json entry = {{"rate", rate}, {"rate_ok", rate_ok}};
      if (tr.proof_B) {
        bool pointwise = true;
        double worst = 0.0;
        for (const auto& row : tr.rows) {
          double bound = (*tr.proof_B / row.iter) * (1.0 + 1e-9);
          worst = std::max(worst, row.energy_gap - bound);
          if (row.energy_gap > bound) pointwise = false;
        }
        entry["proof_B"] = *tr.proof_B;
        entry["pointwise_ok"] = pointwise;
        entry["pointwise_worst_excess"] = worst;
        unit_pointwise = unit_pointwise && pointwise;
      }
      per[name] = entry;
      if (i == 0) {
        std::string a = write_artifact(
            opt, rep.suite + "_" + name + "_seed0_trace.csv",
            [&](const std::filesystem::path& p) { tr.save_csv(p); });
        if (!a.empty()) u.artifacts.push_back(a);
      }
    }
    u.metrics = json{{"seed", base},
                     {"algorithms", per},
                     {"pointwise_ok", unit_pointwise}};
    u.pass = unit_pointwise;
    return u;
  });

  json per_seed = json::array();
  json counts;
  bool pass = true;
  for (const auto& name : algos) {
    int rate_n = 0;
    for (const auto& u : units)
      if (u.metrics["algorithms"][name]["rate_ok"].get<bool>()) ++rate_n;
    counts[name] = rate_n;
    pass = pass && rate_n >= min_pass;
  }
  for (auto& u : units) {
    pass = pass && u.pass;
    per_seed.push_back(u.metrics);
    for (auto& a : u.artifacts) rep.artifacts.push_back(a);
  }
  rep.metrics = json{{"rate_pass_counts", counts}, {"per_seed", per_seed}};
  rep.pass = pass;
  return rep;
}

// --- T2_4: cardinality bound on beta ------------------------------------

SuiteReport suite_T2_4(const SuiteOptions& opt) {
  const int n_dicts = opt.seeds > 0 ? opt.seeds : 100;
  const int d = 3;
  const long grid = 2'000'000;
  const double tol = 1e-3;

  SuiteReport rep;
  rep.suite = to_string(SuiteName::T2_4);
  rep.seed = opt.seed;
  rep.spec = json{{"d", d},
                  {"dicts", n_dicts},
                  {"a_values", {2, 3}},
                  {"grid", grid},
                  {"tolerance", tol}};

  SmoothSpace sp = SmoothSpace::lp(d, 2.0);
  auto units = run_units(n_dicts, resolve_workers(opt.workers), [&](int i) {
    UnitOut u;
    int a = i < n_dicts / 2 ? 2 : 3;
    int n_atoms = int(std::lround(std::pow(double(d), a)));
    Dictionary dict =
        build_random_sphere(sp, n_atoms, mix_seed(opt.seed, 300 + i));
    BetaEstimate est = beta_bruteforce(dict, grid);
    double bound = beta_cardinality_bound(d, a);
    bool vacuous = bound >= 1.0;
    bool ok = vacuous || est.upper <= bound + tol;
    u.metrics = json{{"a", a},
                     {"N", n_atoms},
                     {"beta_upper", est.upper},
                     {"bound", bound},
                     {"vacuous", vacuous},
                     {"ok", ok}};
    u.pass = ok;
    return u;
  });

  int vacuous_count = 0;
  double max_beta = 0.0;
  bool pass = true;
  json per = json::array();
  for (auto& u : units) {
    if (u.metrics["vacuous"].get<bool>()) ++vacuous_count;
    max_beta = std::max(max_beta, u.metrics["beta_upper"].get<double>());
    pass = pass && u.pass;
    per.push_back(u.metrics);
  }
  rep.metrics = json{{"vacuous_count", vacuous_count},
                     {"checked_count", n_dicts - vacuous_count},
                     {"max_beta_upper", max_beta},
                     {"bound_a2", beta_cardinality_bound(d, 2)},
                     {"bound_a3", beta_cardinality_bound(d, 3)},
                     {"per_dict", per}};
  rep.pass = pass;
  return rep;
}

// --- T3_3: reconstruction-constant identity -------------------------------

SuiteReport suite_T3_3(const SuiteOptions& opt) {
  const int n_random = 5;
  const int n_dicts = 2 + n_random;

  SuiteReport rep;
  rep.suite = to_string(SuiteName::T3_3);
  rep.seed = opt.seed;
  rep.spec = json{{"dictionaries",
                   {"canonical_d2", "equiangular3", "random_d2_N16 x5"}},
                  {"samples_per_dict", 24},
                  {"max_width", 0.1}};

  SmoothSpace sp = SmoothSpace::lp(2, 2.0);
  auto units = run_units(n_dicts, resolve_workers(opt.workers), [&](int i) {
    UnitOut u;
    Dictionary dict = i == 0 ? build_canonical(sp)
                     : i == 1
                         ? Dictionary(equiangular3_atoms(), sp, "equiangular3")
                         : build_random_sphere(sp, 16,
                                               mix_seed(opt.seed, 100 + i));
    R1BetaReport r = check_R1_beta(dict, 24, mix_seed(opt.seed, 200 + i));
    bool ok = r.contains_one && r.intersects && r.width <= 0.1;
    u.metrics = json{{"label", dict.label()},
                     {"beta", {r.beta_lower, r.beta_upper}},
                     {"r1", {r.r1_lower, r.r1_upper}},
                     {"product", {r.product_lower, r.product_upper}},
                     {"width", r.width},
                     {"contains_one", r.contains_one},
                     {"intersects", r.intersects},
                     {"ok", ok}};
    u.pass = ok;
    return u;
  });

  bool pass = true;
  json per = json::array();
  for (auto& u : units) {
    pass = pass && u.pass;
    per.push_back(u.metrics);
  }
  rep.metrics = json{{"per_dictionary", per}};
  rep.pass = pass;
  return rep;
}

// --- eq_2_6: exponential decay guarantee ---------------------------------

SuiteReport suite_eq_2_6(const SuiteOptions& opt) {
  const int seeds = opt.seeds > 0 ? opt.seeds : 20;
  const int m_max = 50;

  SmoothSpace sp = SmoothSpace::lp(2, 2.0);
  GuaranteeInfo gi = guaranteed_contraction(sp, 1.0 / std::sqrt(2.0), 1.0);

  SuiteReport rep;
  rep.suite = to_string(SuiteName::eq_2_6);
  rep.seed = opt.seed;
  rep.spec = json{{"d", 2},
                  {"dictionary", "canonical"},
                  {"seeds", seeds},
                  {"m_max", m_max},
                  {"factor", gi.contraction},
                  {"algorithms", {"woga", "wcga"}}};

  Dictionary dict = build_canonical(sp);
  GreedyConfig cfg;
  cfg.max_iter = m_max;

  auto units = run_units(seeds, resolve_workers(opt.workers), [&](int i) {
    UnitOut u;
    std::uint64_t base = mix_seed(opt.seed, i);
    auto rng = make_rng(base);
    Vector f0 = random_gaussian(2, rng);
    Trace tw = run_woga(f0, dict, cfg);
    Trace tc = run_wcga(f0, dict, sp, cfg);
    ExponentialReport rw = check_exponential(tw, gi.contraction);
    ExponentialReport rc = check_exponential(tc, gi.contraction);
    u.metrics = json{{"seed", base},
                     {"woga", {{"pass", rw.pass},
                               {"worst_ratio", rw.worst_ratio},
                               {"first_violation", rw.first_violation}}},
                     {"wcga", {{"pass", rc.pass},
                               {"worst_ratio", rc.worst_ratio},
                               {"first_violation", rc.first_violation}}}};
    u.pass = rw.pass && rc.pass;
    if (i == 0) {
      std::string a = write_artifact(
          opt, "eq_2_6_woga_seed0_trace.csv",
          [&](const std::filesystem::path& p) { tw.save_csv(p); });
      if (!a.empty()) u.artifacts.push_back(a);
    }
    return u;
  });

  bool pass = std::abs(gi.contraction - 0.875) <= 1e-12;
  json per = json::array();
  for (auto& u : units) {
    pass = pass && u.pass;
    per.push_back(u.metrics);
    for (auto& a : u.artifacts) rep.artifacts.push_back(a);
  }
  rep.metrics = json{{"factor", gi.contraction},
                     {"kappa", gi.kappa},
                     {"per_seed", per}};
  rep.pass = pass;
  return rep;
}

// --- eq_2_8: Lebesgue-type exact recovery --------------------------------

SuiteReport suite_eq_2_8(const SuiteOptions& opt) {
  const int seeds = opt.seeds > 0 ? opt.seeds : 20;
  const int d = 20, n_target = 40;
  const double mu_target = 0.25;

  SuiteReport rep;
  rep.suite = to_string(SuiteName::eq_2_8);
  rep.seed = opt.seed;
  rep.spec = json{{"d", d},
                  {"N", n_target},
                  {"mu", mu_target},
                  {"seeds", seeds},
                  {"sparsity", {1, 2, 3}},
                  {"C1", 2.0},
                  {"C2", 3.0},
                  {"c3", 1.0},
                  {"residual_tol", 1e-8}};

  int fixture_iters = 0;
  Dictionary dict = incoherent_fixture(d, n_target, mu_target,
                                       mix_seed(opt.seed, 0xbead),
                                       &fixture_iters);
  double mu = coherence(dict);
  bool packing_ok = dict.size() == n_target && mu <= mu_target + 1e-12;

  auto units = run_units(seeds, resolve_workers(opt.workers), [&](int i) {
    UnitOut u;
    std::uint64_t base = mix_seed(opt.seed, i + 1);
    json per_m = json::array();
    bool ok = true;
    for (int m = 1; m <= 3; ++m) {
      Vector f0 = random_sparse_target(dict, m, mix_seed(base, m));
      LebesgueReport lr = check_lebesgue(dict, f0, m, 2.0, 3.0, 1.0);
      bool m_ok = lr.residual <= 1e-8 && lr.sigma_m <= 1e-12 && lr.pass;
      ok = ok && m_ok;
      per_m.push_back(json{{"m", m},
                           {"sigma_m", lr.sigma_m},
                           {"residual", lr.residual},
                           {"iterations", lr.iterations},
                           {"ok", m_ok}});
    }
    u.metrics = json{{"seed", base}, {"per_m", per_m}, {"ok", ok}};
    u.pass = ok;
    return u;
  });

  bool pass = packing_ok;
  json per = json::array();
  for (auto& u : units) {
    pass = pass && u.pass;
    per.push_back(u.metrics);
  }
  rep.metrics = json{{"atoms", dict.size()},
                     {"construction_iterations", fixture_iters},
                     {"coherence", mu},
                     {"per_seed", per}};
  rep.pass = pass;
  if (!opt.out_dir.empty()) {
    std::string a = write_artifact(
        opt, "eq_2_8_packing.csv",
        [&](const std::filesystem::path& p) { dict.save_csv(p); });
    if (!a.empty()) rep.artifacts.push_back(a);
  }
  return rep;
}

// --- lemma_2_1: covering radius lower-bounds beta -------------------------

SuiteReport suite_lemma_2_1(const SuiteOptions& opt) {
  struct Case {
    double r;
    int n;
  };
  const std::vector<Case> cases = {{0.3, 11}, {0.5, 7}, {0.7, 5}};

  SuiteReport rep;
  rep.suite = to_string(SuiteName::lemma_2_1);
  rep.seed = opt.seed;
  rep.spec = json{{"d", 2},
                  {"radii", {0.3, 0.5, 0.7}},
                  {"centers", {11, 7, 5}},
                  {"mc_samples", 100000},
                  {"grid", 1000000},
                  {"tolerance", 1e-3}};

  bool pass = true;
  json per = json::array();
  for (size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    CoveringSpec cov;
    cov.radius = c.r;
    cov.target = CoveringSpec::Target::unit_sphere;
    for (int k = 0; k < c.n; ++k) {
      double th = 2.0 * M_PI * k / c.n;
      Vector v(2);
      v << std::cos(th), std::sin(th);
      cov.centers.push_back(v);
    }
    double chord = 2.0 * std::sin(M_PI / (2.0 * c.n));
    CoveringReport cr = verify_covering(cov, 100000, mix_seed(opt.seed, i));
    Dictionary dict = dictionary_from_covering(cov);
    double claimed = std::sqrt(1.0 - c.r * c.r);
    BetaEstimate est = beta_bruteforce(dict, 1'000'000);
    bool ok = cr.pass && chord <= c.r &&
              est.lower.value_or(0.0) >= claimed - 1e-3;
    pass = pass && ok;
    per.push_back(json{{"radius", c.r},
                       {"centers", c.n},
                       {"chord", chord},
                       {"covered_fraction", cr.fraction_covered},
                       {"claimed_beta", claimed},
                       {"beta_lower", est.lower.value_or(0.0)},
                       {"beta_upper", est.upper},
                       {"ok", ok}});
    if (i == 0) {
      std::string a = write_artifact(
          opt, "lemma_2_1_covering_r03.csv",
          [&](const std::filesystem::path& p) { cov.save_csv(p); });
      if (!a.empty()) rep.artifacts.push_back(a);
    }
  }
  rep.metrics = json{{"per_case", per}};
  rep.pass = pass;
  return rep;
}

// --- lemma_2_2: beta yields a ball covering -------------------------------

SuiteReport suite_lemma_2_2(const SuiteOptions& opt) {
  SuiteReport rep;
  rep.suite = to_string(SuiteName::lemma_2_2);
  rep.seed = opt.seed;
  rep.spec = json{{"dims", {2, 3}},
                  {"dictionary", "canonical"},
                  {"mc_samples", 100000}};

  bool pass = true;
  json per = json::array();
  for (int d : {2, 3}) {
    SmoothSpace sp = SmoothSpace::lp(d, 2.0);
    Dictionary dict = build_canonical(sp);
    CoveringSpec cov = covering_from_beta(dict);
    CoveringReport cr = verify_covering(cov, 100000, mix_seed(opt.seed, d));
    bool ok = cr.pass;
    pass = pass && ok;
    per.push_back(json{{"d", d},
                       {"radius", cov.radius},
                       {"centers", int(cov.centers.size())},
                       {"covered_fraction", cr.fraction_covered},
                       {"worst_min_dist", cr.worst_min_dist},
                       {"ok", ok}});
    if (d == 2) {
      std::string a = write_artifact(
          opt, "lemma_2_2_covering_d2.csv",
          [&](const std::filesystem::path& p) { cov.save_csv(p); });
      if (!a.empty()) rep.artifacts.push_back(a);
    }
  }
  rep.metrics = json{{"per_dim", per}};
  rep.pass = pass;
  return rep;
}

// --- sec_3_1_equiv: norm recast equivalence -------------------------------

SuiteReport suite_sec_3_1_equiv(const SuiteOptions& opt) {
  const int trials = opt.seeds > 0 ? opt.seeds : 50;
  const int d = 16, n_atoms = 64;

  SuiteReport rep;
  rep.suite = to_string(SuiteName::sec_3_1_equiv);
  rep.seed = opt.seed;
  rep.spec = json{{"d", d},
                  {"N", n_atoms},
                  {"trials", trials},
                  {"tie_tol", 1e-12},
                  {"energy_tol", 1e-8},
                  {"m_max", 64}};

  SmoothSpace sp = SmoothSpace::lp(d, 2.0);
  GreedyConfig cfg;
  cfg.max_iter = 64;

  auto units = run_units(trials, resolve_workers(opt.workers), [&](int i) {
    UnitOut u;
    std::uint64_t base = mix_seed(opt.seed, i);
    Dictionary dict = build_random_sphere(sp, n_atoms, mix_seed(base, 1));
    auto rng = make_rng(mix_seed(base, 2));
    Vector f0 = random_gaussian(d, rng);
    EquivalenceReport er = check_equivalence_co(f0, dict, sp, cfg);
    u.metrics = json{{"seed", base},
                     {"identical", er.identical},
                     {"ties", er.tie_tolerated},
                     {"steps", er.steps_compared},
                     {"max_energy_gap_diff", er.max_energy_gap_diff},
                     {"pass", er.pass}};
    u.pass = er.pass;
    return u;
  });

  bool pass = true;
  int identical = 0, ties = 0;
  double worst = 0.0;
  json per = json::array();
  for (auto& u : units) {
    pass = pass && u.pass;
    if (u.metrics["identical"].get<bool>()) ++identical;
    ties += u.metrics["ties"].get<int>();
    worst = std::max(worst, u.metrics["max_energy_gap_diff"].get<double>());
    per.push_back(u.metrics);
  }
  rep.metrics = json{{"identical_count", identical},
                     {"ties_total", ties},
                     {"max_energy_gap_diff", worst},
                     {"per_trial", per}};
  rep.pass = pass;
  return rep;
}

}  // namespace

json SuiteReport::to_json() const {
  return json{{"suite", suite},   {"spec", spec}, {"seed", seed},
              {"metrics", metrics}, {"pass", pass}, {"artifacts", artifacts}};
}

void SuiteReport::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("SuiteReport::save: cannot open " +
                             path.string());
  out << to_json().dump(2) << "\n";
}

SuiteReport run_theorem_suite(SuiteName name, const SuiteOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep;
  switch (name) {
    case SuiteName::T1_1: rep = suite_T1_1(options); break;
    case SuiteName::T1_2:
      rep = suite_energy_rates(SuiteName::T1_2, options);
      break;
    case SuiteName::T3_1:
      rep = suite_energy_rates(SuiteName::T3_1, options);
      break;
    case SuiteName::T2_4: rep = suite_T2_4(options); break;
    case SuiteName::T3_3: rep = suite_T3_3(options); break;
    case SuiteName::eq_2_6: rep = suite_eq_2_6(options); break;
    case SuiteName::eq_2_8: rep = suite_eq_2_8(options); break;
    case SuiteName::lemma_2_1: rep = suite_lemma_2_1(options); break;
    case SuiteName::lemma_2_2: rep = suite_lemma_2_2(options); break;
    case SuiteName::sec_3_1_equiv: rep = suite_sec_3_1_equiv(options); break;
  }
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace gdesc
