#include "gdesc/dictionary.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "gdesc/random.hpp"

namespace gdesc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Empirical bound on the covering radius of the spherical Fibonacci
// lattice, validated by a Monte-Carlo property test. The measured constant
// sits near 2.45 across n from 1e4 to 4e6; 3.4 keeps a comfortable margin.
constexpr double kFibonacciGapConstant = 3.4;

void require_l2(const Dictionary& dict, const char* op) {
  if (dict.ambient().p() != 2.0)
    throw std::invalid_argument(std::string(op) + ": requires p = 2");
}

Matrix normalized_atoms(const Matrix& atoms, bool* renormalized = nullptr) {
  Matrix out = atoms;
  bool touched = false;
  for (int j = 0; j < out.cols(); ++j) {
    double n = out.col(j).norm();
    if (n == 0.0)
      throw InvariantViolation("zero atom cannot be normalized", j);
    if (std::abs(n - 1.0) > 1e-12) {
      out.col(j) /= n;
      touched = true;
    }
  }
  if (renormalized) *renormalized = touched;
  return out;
}

// One spherical Fibonacci lattice point (area-balanced z bands, golden
// angle in azimuth).
inline Eigen::Vector3d fibonacci_point(long i, long n) {
  constexpr double golden = 1.6180339887498948482;
  double z = 1.0 - (2.0 * i + 1.0) / double(n);
  double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  double phi = 2.0 * kPi * std::fmod(double(i) / golden, 1.0);
  return {r * std::cos(phi), r * std::sin(phi), z};
}

struct GridMin {
  double value;
  Vector argmin;
};

// min over grid functionals F of max_j |<F, g_j>|, evaluated in blocks so
// the product buffer stays cache-resident. Sequential reduction keeps the
// result independent of any threading above this call.
GridMin beta_grid_min(const Matrix& atoms, long n, int d) {
  const long block = 8192;
  Matrix pts(d, block);
  double best = std::numeric_limits<double>::infinity();
  long best_idx = 0;
  for (long start = 0; start < n; start += block) {
    long count = std::min(block, n - start);
    for (long k = 0; k < count; ++k) {
      long i = start + k;
      if (d == 2) {
        double th = 2.0 * kPi * double(i) / double(n);
        pts(0, k) = std::cos(th);
        pts(1, k) = std::sin(th);
      } else {
        pts.col(k).head<3>() = fibonacci_point(i, n);
      }
    }
    Matrix vals =
        (atoms.transpose() * pts.leftCols(count)).cwiseAbs();
    for (long k = 0; k < count; ++k) {
      double m = vals.col(k).maxCoeff();
      if (m < best) {
        best = m;
        best_idx = start + k;
      }
    }
  }
  Vector arg(d);
  if (d == 2) {
    double th = 2.0 * kPi * double(best_idx) / double(n);
    arg << std::cos(th), std::sin(th);
  } else {
    arg = fibonacci_point(best_idx, n);
  }
  return {best, arg};
}

double exact_minmax_value(const Matrix& atoms, const Vector& f) {
  return (atoms.transpose() * f).cwiseAbs().maxCoeff();
}

// Descent on the smoothed objective (sum_j |<F,g_j>|^r)^(1/r), restricted
// to the unit sphere, with annealed exponent r. Stable in log scale for
// large r.
Vector smoothed_minmax_descent(const Matrix& atoms, Vector f,
                               const std::vector<int>& exponents,
                               int iters_per_stage) {
  const int n = int(atoms.cols());
  auto smooth_value = [&](const Vector& g, int r, Vector* grad) -> double {
    Vector v = atoms.transpose() * g;
    double m = v.cwiseAbs().maxCoeff();
    if (m == 0.0) {
      if (grad) grad->setZero(g.size());
      return 0.0;
    }
    double s = 0.0;
    Vector w(n);
    for (int j = 0; j < n; ++j) {
      double t = std::abs(v[j]) / m;
      w[j] = std::pow(t, double(r - 1));
      s += w[j] * t;
    }
    double h = m * std::pow(s, 1.0 / r);
    if (grad) {
      double denom = std::pow(s, (r - 1.0) / r);
      Vector coeff(n);
      for (int j = 0; j < n; ++j)
        coeff[j] = (v[j] >= 0 ? w[j] : -w[j]) / denom;
      *grad = atoms * coeff;
    }
    return h;
  };

  for (int r : exponents) {
    for (int it = 0; it < iters_per_stage; ++it) {
      Vector grad;
      double h = smooth_value(f, r, &grad);
      Vector tan = grad - grad.dot(f) * f;
      double tn = tan.norm();
      if (tn < 1e-14) break;
      double step = 0.5;
      bool moved = false;
      for (int bt = 0; bt < 30; ++bt) {
        Vector cand = f - step * tan;
        cand.normalize();
        if (smooth_value(cand, r, nullptr) < h - 1e-16) {
          f = cand;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
  }
  return f;
}

// Stationarity polish: at a local minimum of max_j |<F,g_j>| on the
// sphere, F lies in the cone of the active signed atoms with all active
// values equal. Solving the equalization system for several activation
// widths and keeping improvements lands exactly on structured minima.
Vector equalization_polish(const Matrix& atoms, Vector f) {
  double best = exact_minmax_value(atoms, f);
  const int n = int(atoms.cols());
  for (double delta : {1e-9, 1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2}) {
    Vector v = atoms.transpose() * f;
    double vmax = v.cwiseAbs().maxCoeff();
    std::vector<int> active;
    for (int j = 0; j < n; ++j)
      if (std::abs(v[j]) >= vmax * (1.0 - delta)) active.push_back(j);
    if (active.empty()) continue;
    Matrix m(atoms.rows(), active.size());
    for (size_t k = 0; k < active.size(); ++k) {
      int j = active[k];
      m.col(k) = (v[j] >= 0 ? 1.0 : -1.0) * atoms.col(j);
    }
    Matrix gram = m.transpose() * m;
    Vector ones = Vector::Ones(active.size());
    Vector lam = gram.completeOrthogonalDecomposition().solve(ones);
    Vector cand = m * lam;
    double cn = cand.norm();
    if (cn < 1e-12) continue;
    cand /= cn;
    double val = exact_minmax_value(atoms, cand);
    if (val < best) {
      best = val;
      f = cand;
    }
  }
  return f;
}

}  // namespace

std::string to_string(BetaEstimate::Method m) {
  switch (m) {
    case BetaEstimate::Method::bruteforce_grid: return "bruteforce_grid";
    case BetaEstimate::Method::multistart_descent: return "multistart_descent";
    case BetaEstimate::Method::canonical_exact: return "canonical_exact";
  }
  return "unknown";
}

Dictionary::Dictionary(Matrix atoms, SmoothSpace ambient, std::string label)
    : atoms_(std::move(atoms)),
      ambient_(ambient),
      label_(std::move(label)) {
  if (atoms_.rows() != ambient_.dim())
    throw std::invalid_argument(
        "Dictionary: atom dimension does not match ambient space");
  if (atoms_.cols() < 1)
    throw std::invalid_argument("Dictionary: needs at least one atom");
  for (int j = 0; j < atoms_.cols(); ++j) {
    double n = ambient_.norm(atoms_.col(j));
    if (n > 1.0 + 1e-12)
      throw InvariantViolation(
          "Dictionary: atom " + std::to_string(j) + " has norm " +
              format_g17(n) + " > 1",
          j);
  }
}

std::optional<double> Dictionary::best_beta_lower() const {
  std::optional<double> best;
  if (beta_ && beta_->lower) best = *beta_->lower;
  if (claimed_beta_ && (!best || *claimed_beta_ > *best))
    best = *claimed_beta_;
  return best;
}

Dictionary Dictionary::symmetrized() const {
  Matrix both(atoms_.rows(), atoms_.cols() * 2);
  both << atoms_, -atoms_;
  Dictionary out(both, ambient_, label_ + "_pm");
  return out;
}

Dictionary build_canonical(const SmoothSpace& sp) {
  Dictionary dict(Matrix::Identity(sp.dim(), sp.dim()), sp, "canonical");
  if (sp.p() == 2.0) {
    double b = 1.0 / std::sqrt(double(sp.dim()));
    dict.set_beta({b, b, BetaEstimate::Method::canonical_exact, {}});
  }
  return dict;
}

Dictionary build_random_sphere(const SmoothSpace& sp, int n,
                               std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("build_random_sphere: n must be >= 1");
  auto rng = make_rng(seed);
  Matrix atoms(sp.dim(), n);
  for (int j = 0; j < n; ++j) {
    Vector g = random_gaussian(sp.dim(), rng);
    atoms.col(j) = g / sp.norm(g);
  }
  return Dictionary(std::move(atoms), sp, "random_sphere");
}

PackingResult build_incoherent(int d, int n_target, double mu,
                               long max_attempts, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("build_incoherent: d must be >= 1");
  if (n_target < 1)
    throw std::invalid_argument("build_incoherent: n_target must be >= 1");
  if (!(mu > 0.0) || mu >= 1.0)
    throw std::invalid_argument("build_incoherent: mu must be in (0, 1)");
  auto rng = make_rng(seed);
  Matrix kept(d, n_target);
  int count = 0;
  long attempts = 0;
  while (count < n_target && attempts < max_attempts) {
    ++attempts;
    Vector g = random_l2_unit(d, rng);
    bool ok = true;
    if (count > 0) {
      double worst =
          (kept.leftCols(count).transpose() * g).cwiseAbs().maxCoeff();
      ok = worst <= mu;
    }
    if (ok) kept.col(count++) = g;
  }
  SmoothSpace sp = SmoothSpace::lp(d, 2.0);
  Dictionary dict(kept.leftCols(std::max(count, 1)), sp, "incoherent");
  return {std::move(dict), n_target, count, attempts};
}

CoherenceInfo coherence_info(const Dictionary& dict) {
  bool renorm = false;
  Matrix a = normalized_atoms(dict.atoms(), &renorm);
  const int n = int(a.cols());
  if (n < 2) return {0.0, renorm};
  Matrix gram = a.transpose() * a;
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::max(best, std::abs(gram(i, j)));
  return {best, renorm};
}

double coherence(const Dictionary& dict) { return coherence_info(dict).value; }

double fibonacci_max_gap(long n) {
  if (n < 2) return 2.0;
  return std::min(2.0, kFibonacciGapConstant / std::sqrt(double(n)));
}

BetaEstimate beta_bruteforce(const Dictionary& dict, long grid_resolution) {
  require_l2(dict, "beta_bruteforce");
  int d = dict.dim();
  if (d != 2 && d != 3)
    throw std::invalid_argument("beta_bruteforce: supports d in {2, 3} only");
  if (grid_resolution < 16)
    throw std::invalid_argument("beta_bruteforce: grid too coarse");
  GridMin gm = beta_grid_min(dict.atoms(), grid_resolution, d);
  // The objective F -> max_j |<F, g_j>| is 1-Lipschitz on the sphere, so
  // the grid minimum overestimates the true minimum by at most the grid's
  // maximal gap.
  double slack = d == 2 ? 2.0 * kPi / double(grid_resolution)
                        : fibonacci_max_gap(grid_resolution);
  BetaEstimate est;
  est.upper = gm.value;
  est.lower = std::max(0.0, gm.value - slack);
  est.method = BetaEstimate::Method::bruteforce_grid;
  est.grid_tol = slack;
  return est;
}

namespace {

// Same grid search, but also returns the minimizing functional; used by
// check_R1_beta to seed the atomic-norm sampling.
std::pair<BetaEstimate, Vector> beta_bruteforce_argmin(const Dictionary& dict,
                                                       long grid_resolution) {
  BetaEstimate est = beta_bruteforce(dict, grid_resolution);
  GridMin gm = beta_grid_min(dict.atoms(), grid_resolution, dict.dim());
  return {est, gm.argmin};
}

}  // namespace

BetaEstimate beta_upper(const Dictionary& dict, int restarts,
                        std::uint64_t seed) {
  require_l2(dict, "beta_upper");
  if (restarts < 1)
    throw std::invalid_argument("beta_upper: restarts must be >= 1");
  const Matrix& atoms = dict.atoms();
  const int d = dict.dim();
  double best = std::numeric_limits<double>::infinity();

  for (int rs = 0; rs < restarts; ++rs) {
    auto rng = make_rng(mix_seed(seed, rs));
    Vector f = random_l2_unit(d, rng);

    // Plain subgradient phase gets near a basin cheaply.
    for (int it = 0; it < 40; ++it) {
      Vector v = atoms.transpose() * f;
      int k;
      v.cwiseAbs().maxCoeff(&k);
      Vector sub = (v[k] >= 0 ? 1.0 : -1.0) * atoms.col(k);
      Vector tan = sub - sub.dot(f) * f;
      if (tan.norm() < 1e-14) break;
      f = (f - 0.3 / std::sqrt(it + 1.0) * tan).normalized();
    }

    f = smoothed_minmax_descent(atoms, f, {8, 32, 128, 512}, 60);
    f = equalization_polish(atoms, f);
    best = std::min(best, exact_minmax_value(atoms, f));
  }

  BetaEstimate est;
  est.upper = best;
  est.method = BetaEstimate::Method::multistart_descent;
  return est;
}

double beta_cardinality_bound(int d, double a) {
  if (d < 2) throw std::invalid_argument("beta_cardinality_bound: d must be >= 2");
  if (a < 1.0)
    throw std::invalid_argument("beta_cardinality_bound: a must be >= 1");
  return std::sqrt(2.0 * (a * std::log(double(d)) + std::log(2.0)) /
                   double(d));
}

// --- atomic norm ------------------------------------------------------

double atomic_norm_exact_small(const Vector& x, const Dictionary& dict) {
  require_l2(dict, "atomic_norm_exact_small");
  const int n = dict.size();
  const int d = dict.dim();
  if (n > 12)
    throw std::invalid_argument("atomic_norm_exact_small: N <= 12 only");
  if (x.size() != d)
    throw std::invalid_argument("atomic_norm_exact_small: dimension mismatch");
  double xn = x.norm();
  if (xn == 0.0) return 0.0;
  double tol = 1e-10 * std::max(1.0, xn);

  // The minimal-l1 representation is attained at a basic solution, so
  // supports up to size min(d, N) are exhaustive.
  double best = std::numeric_limits<double>::infinity();
  int kmax = std::min(d, n);
  std::vector<int> idx;
  auto visit = [&](auto&& self, int start, int remaining) -> void {
    if (!idx.empty()) {
      Matrix sub(d, idx.size());
      for (size_t c = 0; c < idx.size(); ++c) sub.col(c) = dict.atom(idx[c]);
      Vector coef = sub.completeOrthogonalDecomposition().solve(x);
      if ((x - sub * coef).norm() <= tol)
        best = std::min(best, coef.cwiseAbs().sum());
    }
    if (remaining == 0 || start >= n) return;
    for (int j = start; j < n; ++j) {
      idx.push_back(j);
      self(self, j + 1, remaining - 1);
      idx.pop_back();
    }
  };
  visit(visit, 0, kmax);
  return best;
}

namespace {

// Minimizes max_j |<F, g_j>| over the affine slice <F, x> = 1; the
// reciprocal of the optimum is the atomic norm of x by duality. Descends
// the smoothed max in the orthogonal complement of x.
double optimized_dual_lower(const Matrix& atoms, const Vector& x,
                            std::mt19937_64& rng, int starts) {
  const int d = int(x.size());
  double x2 = x.squaredNorm();
  Vector f0 = x / x2;
  auto project = [&](const Vector& v) -> Vector {
    return v - (v.dot(x) / x2) * x;
  };
  auto value = [&](const Vector& z) -> double {
    return (atoms.transpose() * (f0 + z)).cwiseAbs().maxCoeff();
  };
  double best = 0.0;
  for (int s = 0; s < starts; ++s) {
    Vector z = Vector::Zero(d);
    if (s > 0) z = project(0.5 * random_gaussian(d, rng));
    for (int r : {8, 32, 128, 512}) {
      for (int it = 0; it < 50; ++it) {
        Vector v = atoms.transpose() * (f0 + z);
        double m = v.cwiseAbs().maxCoeff();
        if (m < 1e-15) break;
        double srw = 0.0;
        Vector coeff(v.size());
        for (int j = 0; j < v.size(); ++j) {
          double t = std::abs(v[j]) / m;
          double w = std::pow(t, double(r - 1));
          coeff[j] = v[j] >= 0 ? w : -w;
          srw += w * t;
        }
        double h = m * std::pow(srw, 1.0 / r);
        Vector grad = project(atoms * coeff / std::pow(srw, (r - 1.0) / r));
        double gn = grad.norm();
        if (gn < 1e-14) break;
        double step = 0.5;
        bool moved = false;
        for (int bt = 0; bt < 25; ++bt) {
          Vector cand = z - step * grad;
          Vector vv = atoms.transpose() * (f0 + cand);
          double mm = vv.cwiseAbs().maxCoeff();
          double hh = 0.0;
          if (mm > 0) {
            double ss = 0.0;
            for (int j = 0; j < vv.size(); ++j)
              ss += std::pow(std::abs(vv[j]) / mm, double(r));
            hh = mm * std::pow(ss, 1.0 / r);
          }
          if (hh < h - 1e-16) {
            z = cand;
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
    }
    double v = value(z);
    if (v > 1e-15) best = std::max(best, 1.0 / v);
  }
  return best;
}

}  // namespace

AtomicNormBounds atomic_norm_bounds(const Vector& x, const Dictionary& dict,
                                    const AtomicNormConfig& cfg) {
  require_l2(dict, "atomic_norm_bounds");
  if (x.size() != dict.dim())
    throw std::invalid_argument("atomic_norm_bounds: dimension mismatch");
  if (!(cfg.t > 0.0) || cfg.t > 1.0 || !(cfg.b > 0.0) || cfg.b >= 1.0)
    throw std::invalid_argument(
        "atomic_norm_bounds: t in (0,1], b in (0,1) required");

  AtomicNormBounds out;
  double xn = x.norm();
  if (xn == 0.0) return out;

  const Matrix& atoms = dict.atoms();
  Vector ls = atoms.completeOrthogonalDecomposition().solve(x);
  if ((x - atoms * ls).norm() >= 1e-8) {
    out.in_span = false;
    out.upper = std::numeric_limits<double>::infinity();
  }

  std::optional<double> beta_lo = cfg.beta_lower;
  if (!beta_lo) beta_lo = dict.best_beta_lower();

  // Upper bound: small-step greedy expansion x = sum c_k phi_k + f_K with
  // every c_k > 0, then account for the atomic norm of the tail.
  if (out.in_span) {
    Vector f = x;
    double sum = 0.0;
    int steps = 0;
    while (steps < cfg.max_steps) {
      double fn = f.norm();
      if (fn <= cfg.eta) break;
      Vector v = atoms.transpose() * f;
      int k;
      double corr = v.cwiseAbs().maxCoeff(&k);
      if (corr <= 0.0) break;
      double c = cfg.t * cfg.b * corr;
      f -= (v[k] >= 0 ? c : -c) * atoms.col(k);
      sum += c;
      ++steps;
    }
    out.expansion_steps = steps;
    out.expansion_residual = f.norm();
    if (beta_lo && *beta_lo > 0.0) {
      out.upper = sum + out.expansion_residual / *beta_lo;
    } else {
      out.upper = sum + atomic_norm_exact_small(f, dict);
    }
  }

  // Lower bound by duality over sampled and optimized covectors.
  auto rng = make_rng(cfg.seed);
  auto dual_ratio = [&](const Vector& f) -> double {
    double denom = (atoms.transpose() * f).cwiseAbs().maxCoeff();
    if (denom <= 1e-15) return 0.0;
    return std::abs(f.dot(x)) / denom;
  };
  double lower = dual_ratio(x / xn);
  for (int i = 0; i < cfg.random_covectors; ++i)
    lower = std::max(lower, dual_ratio(random_l2_unit(dict.dim(), rng)));
  if (cfg.optimized_covectors > 0)
    lower = std::max(
        lower, optimized_dual_lower(atoms, x, rng, cfg.optimized_covectors));
  out.lower = lower;
  return out;
}

R1BetaReport check_R1_beta(const Dictionary& dict, int n_samples,
                           std::uint64_t seed) {
  require_l2(dict, "check_R1_beta");
  if (dict.dim() > 3)
    throw std::invalid_argument("check_R1_beta: d <= 3 only");
  if (n_samples < 1)
    throw std::invalid_argument("check_R1_beta: n_samples must be >= 1");

  long grid = dict.dim() == 2 ? 1'000'000 : 4'000'000;
  auto [beta, beta_argmin] = beta_bruteforce_argmin(dict, grid);

  AtomicNormConfig cfg;
  cfg.beta_lower = beta.lower;
  cfg.seed = mix_seed(seed, 0xa70);

  auto rng = make_rng(seed);
  std::vector<Vector> xs;
  xs.reserve(n_samples + 1);
  // The grid minimizer itself has dual lower bound 1/beta_upper, which
  // pins the product bracket's upper end at or above one.
  xs.push_back(beta_argmin);
  for (int i = 0; i < n_samples; ++i)
    xs.push_back(random_l2_unit(dict.dim(), rng));

  R1BetaReport rep;
  rep.beta_lower = beta.best_lower();
  rep.beta_upper = beta.upper;
  rep.samples = int(xs.size());
  for (const auto& x : xs) {
    AtomicNormBounds b = atomic_norm_bounds(x, dict, cfg);
    if (!b.in_span) continue;
    rep.r1_lower = std::max(rep.r1_lower, b.lower);
    rep.r1_upper = std::max(rep.r1_upper, b.upper);
  }
  rep.product_lower = rep.r1_lower * rep.beta_lower;
  rep.product_upper = rep.r1_upper * rep.beta_upper;
  rep.contains_one =
      rep.product_lower <= 1.0 + 1e-12 && rep.product_upper >= 1.0 - 1e-12;
  double inv_lo = 1.0 / rep.beta_upper;
  double inv_hi = rep.beta_lower > 0.0
                      ? 1.0 / rep.beta_lower
                      : std::numeric_limits<double>::infinity();
  rep.intersects = rep.r1_lower <= inv_hi + 1e-12 &&
                   rep.r1_upper >= inv_lo - 1e-12;
  rep.width = rep.product_upper - rep.product_lower;
  return rep;
}

// --- coverings --------------------------------------------------------

void CoveringSpec::validate() const {
  if (centers.empty())
    throw InvariantViolation("CoveringSpec: needs at least one center");
  if (!(radius > 0.0) || !(radius < 1.0))
    throw InvariantViolation("CoveringSpec: radius must be in (0, 1)");
  int d = int(centers[0].size());
  for (size_t j = 0; j < centers.size(); ++j) {
    if (int(centers[j].size()) != d)
      throw InvariantViolation("CoveringSpec: inconsistent center dimension",
                               int(j));
    if (centers[j].norm() > 1.0 + 1e-12)
      throw InvariantViolation(
          "CoveringSpec: center " + std::to_string(j) + " has norm > 1",
          int(j));
  }
}

CoveringSpec covering_from_beta(const Dictionary& dict) {
  require_l2(dict, "covering_from_beta");
  auto lower = dict.best_beta_lower();
  if (!lower || !(*lower > 0.0))
    throw std::invalid_argument(
        "covering_from_beta: dictionary carries no positive beta lower "
        "bound");
  // The ball-covering construction needs beta <= 2^(-1/2); larger values
  // are capped, which only enlarges the covering radius's validity.
  double beta = std::min(*lower, 1.0 / std::sqrt(2.0));
  CoveringSpec cov;
  cov.radius = std::sqrt(1.0 - beta * beta);
  cov.target = CoveringSpec::Target::unit_ball;
  cov.centers.reserve(2 * dict.size());
  for (int j = 0; j < dict.size(); ++j) {
    Vector g = dict.atom(j);
    double n = g.norm();
    if (n < 1e-12)
      throw InvariantViolation("covering_from_beta: zero atom", j);
    cov.centers.push_back(beta * g / n);
    cov.centers.push_back(-beta * g / n);
  }
  cov.validate();
  return cov;
}

Dictionary dictionary_from_covering(const CoveringSpec& cov) {
  cov.validate();
  int d = cov.dim();
  Matrix atoms(d, cov.centers.size());
  for (size_t j = 0; j < cov.centers.size(); ++j) {
    double n = cov.centers[j].norm();
    if (n < 1e-12)
      throw InvariantViolation(
          "dictionary_from_covering: zero center cannot be normalized",
          int(j));
    atoms.col(j) = cov.centers[j] / n;
  }
  SmoothSpace sp = SmoothSpace::lp(d, 2.0);
  Dictionary dict(std::move(atoms), sp, "from_covering");
  dict.set_claimed_beta_lower(std::sqrt(1.0 - cov.radius * cov.radius));
  return dict;
}

CoveringReport verify_covering(const CoveringSpec& cov, long n_samples,
                               std::uint64_t seed) {
  cov.validate();
  if (n_samples < 1)
    throw std::invalid_argument("verify_covering: n_samples must be >= 1");
  int d = cov.dim();
  Matrix centers(d, cov.centers.size());
  for (size_t j = 0; j < cov.centers.size(); ++j)
    centers.col(j) = cov.centers[j];
  Vector c2 = centers.colwise().squaredNorm();

  auto rng = make_rng(seed);
  CoveringReport rep;
  rep.samples = n_samples;
  long covered = 0;
  for (long i = 0; i < n_samples; ++i) {
    Vector x = cov.target == CoveringSpec::Target::unit_sphere
                   ? random_l2_unit(d, rng)
                   : random_l2_ball(d, rng);
    Vector dist2 =
        (c2.array() - 2.0 * (centers.transpose() * x).array() +
         x.squaredNorm())
            .matrix();
    double dmin = std::sqrt(std::max(0.0, dist2.minCoeff()));
    rep.worst_min_dist = std::max(rep.worst_min_dist, dmin);
    if (dmin <= cov.radius + 1e-12) ++covered;
  }
  rep.fraction_covered = double(covered) / double(n_samples);
  rep.pass = covered == n_samples;
  return rep;
}

// --- CSV --------------------------------------------------------------

namespace {

std::string sanitize_label(std::string s) {
  for (char& c : s)
    if (c == ' ' || c == ',' || c == '\n' || c == '\t') c = '_';
  return s.empty() ? "unnamed" : s;
}

std::map<std::string, std::string> parse_header(const std::string& line,
                                                const char* what) {
  if (line.empty() || line[0] != '#')
    throw std::invalid_argument(std::string(what) +
                                ": first line must start with '#'");
  std::map<std::string, std::string> kv;
  std::istringstream ss(line.substr(1));
  std::string tok;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(std::string(what) +
                                  ": malformed header token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

std::vector<double> parse_row(const std::string& line, int expected,
                              const char* what) {
  std::vector<double> out;
  const char* p = line.c_str();
  char* end = nullptr;
  while (*p) {
    double v = std::strtod(p, &end);
    if (end == p)
      throw std::invalid_argument(std::string(what) + ": bad number in '" +
                                  line + "'");
    out.push_back(v);
    p = end;
    while (*p == ' ') ++p;
    if (*p == ',') ++p;
    while (*p == ' ') ++p;
  }
  if (int(out.size()) != expected)
    throw std::invalid_argument(std::string(what) +
                                ": wrong number of values in a row");
  return out;
}

}  // namespace

void Dictionary::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("Dictionary::save_csv: cannot open " +
                             path.string());
  out << "# d=" << dim() << " N=" << size() << " p=" << format_g17(ambient_.p())
      << " label=" << sanitize_label(label_) << "\n";
  for (int j = 0; j < size(); ++j) {
    for (int i = 0; i < dim(); ++i) {
      if (i) out << ",";
      out << format_g17(atoms_(i, j));
    }
    out << "\n";
  }
}

Dictionary Dictionary::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("Dictionary::load_csv: cannot open " +
                             path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("Dictionary::load_csv: empty file");
  auto kv = parse_header(line, "Dictionary::load_csv");
  for (const char* key : {"d", "N", "p", "label"})
    if (!kv.count(key))
      throw std::invalid_argument(
          std::string("Dictionary::load_csv: header missing ") + key);
  int d = std::stoi(kv["d"]);
  int n = std::stoi(kv["N"]);
  double p = std::strtod(kv["p"].c_str(), nullptr);
  Matrix atoms(d, n);
  for (int j = 0; j < n; ++j) {
    if (!std::getline(in, line))
      throw std::invalid_argument("Dictionary::load_csv: missing atom row " +
                                  std::to_string(j));
    auto row = parse_row(line, d, "Dictionary::load_csv");
    for (int i = 0; i < d; ++i) atoms(i, j) = row[i];
  }
  return Dictionary(std::move(atoms), SmoothSpace::lp(d, p), kv["label"]);
}

void CoveringSpec::save_csv(const std::filesystem::path& path) const {
  validate();
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("CoveringSpec::save_csv: cannot open " +
                             path.string());
  out << "# d=" << dim() << " N=" << centers.size()
      << " radius=" << format_g17(radius) << " target="
      << (target == Target::unit_sphere ? "sphere" : "ball") << "\n";
  for (const auto& c : centers) {
    for (int i = 0; i < c.size(); ++i) {
      if (i) out << ",";
      out << format_g17(c[i]);
    }
    out << "\n";
  }
}

CoveringSpec CoveringSpec::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("CoveringSpec::load_csv: cannot open " +
                             path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("CoveringSpec::load_csv: empty file");
  auto kv = parse_header(line, "CoveringSpec::load_csv");
  for (const char* key : {"d", "N", "radius", "target"})
    if (!kv.count(key))
      throw std::invalid_argument(
          std::string("CoveringSpec::load_csv: header missing ") + key);
  int d = std::stoi(kv["d"]);
  int n = std::stoi(kv["N"]);
  CoveringSpec cov;
  cov.radius = std::strtod(kv["radius"].c_str(), nullptr);
  if (kv["target"] == "sphere")
    cov.target = Target::unit_sphere;
  else if (kv["target"] == "ball")
    cov.target = Target::unit_ball;
  else
    throw std::invalid_argument(
        "CoveringSpec::load_csv: target must be sphere or ball");
  for (int j = 0; j < n; ++j) {
    if (!std::getline(in, line))
      throw std::invalid_argument("CoveringSpec::load_csv: missing center " +
                                  std::to_string(j));
    auto row = parse_row(line, d, "CoveringSpec::load_csv");
    cov.centers.push_back(Eigen::Map<Vector>(row.data(), d));
  }
  cov.validate();
  return cov;
}

}  // namespace gdesc
