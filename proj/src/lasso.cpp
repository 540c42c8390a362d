#include "shared_lasso/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "shared_lasso/parallel.hpp"
#include "shared_lasso/rng.hpp"

namespace shared_lasso {

void LassoOptions::validate() const {
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (cv_folds < 2) throw ConfigError("cv_folds must be at least 2");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))
    throw ConfigError("lambda_min_ratio must lie in (0, 1)");
  if (lambda_grid_size < 1) throw ConfigError("lambda_grid_size must be at least 1");
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

namespace {

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_response(const SparseBinaryDesign& X, std::span<const double> y) {
  if (y.size() != X.rows())
    throw StructuralError("response length " + std::to_string(y.size()) +
                          " does not match row count " + std::to_string(X.rows()));
  if (X.rows() == 0) throw StructuralError("cannot fit a model to zero rows");
}

/// Immutable per-design data shared by every solve on the same X.
struct Problem {
  Problem(const SparseBinaryDesign& design, std::span<const double> response,
          std::vector<double> factors, bool intercept)
      : X(design),
        columns(design),
        y(response),
        pf(std::move(factors)),
        curvature(design.cols()),
        n(static_cast<double>(design.rows())),
        fit_intercept(intercept) {
    for (std::size_t j = 0; j < X.cols(); ++j) {
      const double s = X.scale(j);
      curvature[j] = s * s * static_cast<double>(columns.count(j)) / n;
      if (curvature[j] > 0.0 && pf[j] == 0.0) has_unpenalized = true;
    }
    all.resize(X.cols());
    std::iota(all.begin(), all.end(), Index{0});
    ybar = fit_intercept ? mean_of(y) : 0.0;
    lmax = has_unpenalized ? 0.0 : lambda_max(X, y, pf, fit_intercept);
  }

  const SparseBinaryDesign& X;
  ColumnIndex columns;
  std::span<const double> y;
  std::vector<double> pf;
  std::vector<double> curvature;  // mean squared column value
  std::vector<Index> all;
  double n;
  bool fit_intercept;
  bool has_unpenalized = false;
  double ybar = 0.0;
  double lmax = 0.0;
};

struct State {
  double mu = 0.0;
  std::vector<double> beta;
  std::vector<double> resid;
};

State zero_state(const Problem& pb) {
  State s;
  s.mu = pb.ybar;
  s.beta.assign(pb.X.cols(), 0.0);
  s.resid.resize(pb.y.size());
  for (std::size_t i = 0; i < pb.y.size(); ++i) s.resid[i] = pb.y[i] - s.mu;
  return s;
}

State warm_state(const Problem& pb, const LassoFit& warm) {
  if (warm.coefficients.dim != pb.X.cols())
    throw StructuralError("warm start has " + std::to_string(warm.coefficients.dim) +
                          " coefficients, design has " + std::to_string(pb.X.cols()));
  State s;
  s.mu = pb.fit_intercept ? warm.intercept : 0.0;
  s.beta = warm.coefficients.to_dense();
  const auto fitted = pb.X.dot(s.beta);
  s.resid.resize(pb.y.size());
  for (std::size_t i = 0; i < pb.y.size(); ++i) s.resid[i] = pb.y[i] - s.mu - fitted[i];
  return s;
}

double objective(const Problem& pb, const State& s, double lambda) {
  double rss = 0.0;
  for (double r : s.resid) rss += r * r;
  double pen = 0.0;
  for (std::size_t j = 0; j < s.beta.size(); ++j) pen += pb.pf[j] * std::abs(s.beta[j]);
  return rss / (2.0 * pb.n) + lambda * pen;
}

LassoFit to_fit(const Problem& pb, const State& s, double lambda, std::size_t sweeps) {
  LassoFit f;
  f.intercept = s.mu;
  f.coefficients = SparseVector::from_dense(s.beta);
  f.lambda = lambda;
  f.penalty_factors = pb.pf;
  f.sweeps = sweeps;
  return f;
}

/// One coordinate pass over `cols` followed by an intercept update.
/// Returns the largest absolute parameter change.
double sweep(const Problem& pb, State& s, double lambda, std::span<const Index> cols) {
  double max_change = 0.0;
  for (Index j : cols) {
    const double h = pb.curvature[j];
    if (h == 0.0) continue;
    const double scale = pb.X.scale(j);
    const auto rows = pb.columns.rows_of(j);
    double g = 0.0;
    for (Index i : rows) g += s.resid[i];
    g = scale * g / pb.n;
    const double old = s.beta[j];
    const double updated = soft_threshold(g + h * old, lambda * pb.pf[j]) / h;
    if (updated != old) {
      const double step = scale * (updated - old);
      for (Index i : rows) s.resid[i] -= step;
      s.beta[j] = updated;
      max_change = std::max(max_change, std::abs(updated - old));
    }
  }
  if (pb.fit_intercept) {
    const double shift = mean_of(s.resid);
    if (shift != 0.0) {
      s.mu += shift;
      for (double& r : s.resid) r -= shift;
      max_change = std::max(max_change, std::abs(shift));
    }
  }
  return max_change;
}

/// Largest active set for which the exact refinement is attempted.
constexpr std::size_t kMaxRefineSize = 2000;
/// Zero crossings followed within one refinement before handing back to
/// coordinate descent.
constexpr std::size_t kMaxRefineSteps = 4;
/// Active-set sweeps between estimates of the contraction rate.
constexpr std::size_t kRateWindow = 10;
/// Cost of one dense flop relative to one sparse coordinate-update entry.
constexpr double kFlopCost = 0.25;

/// Active-set refinement for the nonzero coordinates among `candidates`.
/// With the signs held fixed the objective is a smooth quadratic on the
/// current orthant; each step moves toward its minimizer and stops where the
/// first coordinate reaches zero, which then leaves the set. The iterate is
/// replaced only if the objective does not increase.
bool refine(const Problem& pb, State& s, double lambda, std::span<const Index> candidates) {
  std::vector<Index> active;
  for (Index j : candidates)
    if (s.beta[j] != 0.0) active.push_back(j);
  const std::size_t a = active.size();
  if (a == 0 || a > kMaxRefineSize || a + (pb.fit_intercept ? 1 : 0) > pb.X.rows()) return false;
  const auto A = static_cast<Eigen::Index>(a);
  std::vector<std::ptrdiff_t> pos(pb.X.cols(), -1);
  for (std::size_t u = 0; u < a; ++u) pos[active[u]] = static_cast<std::ptrdiff_t>(u);

  // Centered, scaled Gram matrix and X'y of the active columns.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(A, A);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(A);
  std::vector<Eigen::Index> in_row;
  for (std::size_t i = 0; i < pb.X.rows(); ++i) {
    in_row.clear();
    for (auto j : pb.X.row(i))
      if (pos[j] >= 0) in_row.push_back(pos[j]);
    for (auto u : in_row) {
      xty(u) += pb.y[i];
      for (auto v : in_row) gram(u, v) += 1.0;
    }
  }
  const Eigen::VectorXd count = gram.diagonal();
  Eigen::VectorXd rhs(A), x(A), sign(A);
  for (Eigen::Index u = 0; u < A; ++u) {
    const double su = pb.X.scale(active[static_cast<std::size_t>(u)]);
    for (Eigen::Index v = 0; v < A; ++v) {
      double val = gram(u, v);
      if (pb.fit_intercept) val -= count(u) * count(v) / pb.n;
      gram(u, v) = val * su * pb.X.scale(active[static_cast<std::size_t>(v)]);
    }
    x(u) = s.beta[active[static_cast<std::size_t>(u)]];
    sign(u) = x(u) > 0 ? 1.0 : -1.0;
    rhs(u) = su * (xty(u) - count(u) * pb.ybar) -
             pb.n * lambda * pb.pf[active[static_cast<std::size_t>(u)]] * sign(u);
  }

  std::vector<Eigen::Index> keep(a);
  std::iota(keep.begin(), keep.end(), Eigen::Index{0});
  for (std::size_t step = 0; step < kMaxRefineSteps && !keep.empty(); ++step) {
    const auto k = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd sub(k, k);
    Eigen::VectorXd sub_rhs(k);
    for (Eigen::Index u = 0; u < k; ++u) {
      sub_rhs(u) = rhs(keep[static_cast<std::size_t>(u)]);
      for (Eigen::Index v = 0; v < k; ++v)
        sub(u, v) = gram(keep[static_cast<std::size_t>(u)], keep[static_cast<std::size_t>(v)]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd target = llt.solve(sub_rhs);
    if (!target.allFinite()) break;
    double t = 1.0;
    for (Eigen::Index u = 0; u < k; ++u) {
      const auto w = keep[static_cast<std::size_t>(u)];
      if (target(u) * sign(w) <= 0.0) t = std::min(t, x(w) / (x(w) - target(u)));
    }
    for (Eigen::Index u = 0; u < k; ++u) {
      const auto w = keep[static_cast<std::size_t>(u)];
      x(w) += t * (target(u) - x(w));
      if (x(w) * sign(w) <= 0.0) x(w) = 0.0;
    }
    if (t >= 1.0) break;
    std::erase_if(keep, [&](Eigen::Index w) { return x(w) == 0.0; });
  }

  State next;
  next.beta = s.beta;
  for (std::size_t u = 0; u < a; ++u) next.beta[active[u]] = x(static_cast<Eigen::Index>(u));
  const auto fitted = pb.X.dot(next.beta);
  next.resid.resize(pb.y.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pb.y.size(); ++i) total += pb.y[i] - fitted[i];
  next.mu = pb.fit_intercept ? total / pb.n : 0.0;
  for (std::size_t i = 0; i < pb.y.size(); ++i) next.resid[i] = pb.y[i] - next.mu - fitted[i];
  if (objective(pb, next, lambda) > objective(pb, s, lambda)) return false;
  s = std::move(next);
  return true;
}

/// Active-set coordinate descent: converge on the nonzero coordinates, then
/// confirm with a full sweep; repeat until the full sweep is quiet.
std::size_t solve(const Problem& pb, State& s, double lambda, const LassoOptions& opts,
                  const SweepObserver& observer) {
  std::size_t sweeps = 0;
  auto run = [&](std::span<const Index> cols) {
    if (sweeps >= opts.max_iterations)
      throw ConvergenceError("coordinate descent did not converge in " +
                                 std::to_string(opts.max_iterations) + " sweeps at lambda " +
                                 std::to_string(lambda),
                             to_fit(pb, s, lambda, sweeps));
    const double change = sweep(pb, s, lambda, cols);
    ++sweeps;
    if (observer) observer(sweeps, objective(pb, s, lambda));
    return change;
  };

  std::vector<Index> active;
  while (run(pb.all) >= opts.tolerance) {
    active.clear();
    for (Index j : pb.all)
      if (s.beta[j] != 0.0) active.push_back(j);
    // Refinement pays off when the observed contraction rate predicts more
    // remaining sweep work than one dense factorization.
    double work = static_cast<double>(active.size());
    for (Index j : active) work += static_cast<double>(pb.columns.count(j));
    const double a = static_cast<double>(active.size());
    const double refine_cost = kFlopCost * (a * a * a / 3.0 + work * work / pb.n);
    std::size_t stalled = 0, wait = kRateWindow;
    double window_start = 0.0;
    for (double change = run(active); change >= opts.tolerance; change = run(active)) {
      if (stalled == 0) window_start = change;
      if (++stalled < wait) continue;
      const double rate = std::pow(change / window_start, 1.0 / static_cast<double>(stalled));
      const double remaining = rate >= 1.0 ? std::numeric_limits<double>::infinity()
                                           : std::log(opts.tolerance / change) / std::log(rate);
      const bool accepted = remaining * work > refine_cost && refine(pb, s, lambda, active);
      stalled = 0;
      wait = accepted ? kRateWindow : std::min<std::size_t>(2 * wait, 1000);
    }
  }
  return sweeps;
}

bool short_circuits(const Problem& pb, double lambda) {
  return !pb.has_unpenalized && lambda >= pb.lmax;
}

}  // namespace

double lambda_max(const SparseBinaryDesign& X, std::span<const double> y,
                  std::span<const double> penalty_factors, bool fit_intercept) {
  check_response(X, y);
  if (!penalty_factors.empty() && penalty_factors.size() != X.cols())
    throw StructuralError("penalty_factors must have one entry per column");
  if (!penalty_factors.empty() &&
      std::none_of(penalty_factors.begin(), penalty_factors.end(), [](double v) { return v > 0.0; }))
    throw ConfigError("lambda_max needs at least one positive penalty factor");

  const double ybar = fit_intercept ? mean_of(y) : 0.0;
  std::vector<double> centered(y.begin(), y.end());
  for (double& v : centered) v -= ybar;
  const auto grad = X.transpose_dot(centered);
  const double n = static_cast<double>(X.rows());
  double best = 0.0;
  for (std::size_t j = 0; j < X.cols(); ++j) {
    const double pf = penalty_factors.empty() ? 1.0 : penalty_factors[j];
    if (pf > 0.0) best = std::max(best, std::abs(grad[j]) / (n * pf));
  }
  return best;
}

std::vector<double> effective_penalty_factors(const SparseBinaryDesign& X,
                                              std::span<const double> penalty_factors,
                                              const LassoOptions& opts) {
  std::vector<double> pf;
  if (penalty_factors.empty()) {
    pf.assign(X.cols(), 1.0);
  } else {
    if (penalty_factors.size() != X.cols())
      throw StructuralError("penalty_factors has " + std::to_string(penalty_factors.size()) +
                            " entries, design has " + std::to_string(X.cols()) + " columns");
    pf.assign(penalty_factors.begin(), penalty_factors.end());
  }
  for (double v : pf)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("penalty factors must be finite and non-negative");
  if (opts.scale_penalty_by_sd && X.rows() > 0) {
    const auto counts = X.column_counts();
    const double n = static_cast<double>(X.rows());
    for (std::size_t j = 0; j < pf.size(); ++j) {
      const double share = static_cast<double>(counts[j]) / n;
      const double sd = std::abs(X.scale(j)) * std::sqrt(share * (1.0 - share));
      if (sd > 0.0) pf[j] *= sd;
    }
  }
  return pf;
}

LassoFit fit(const SparseBinaryDesign& X, std::span<const double> y, double lambda,
             std::span<const double> penalty_factors, const LassoOptions& opts,
             const LassoFit* warm_start, const SweepObserver& observer) {
  opts.validate();
  check_response(X, y);
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  Problem pb(X, y, effective_penalty_factors(X, penalty_factors, opts), opts.fit_intercept);
  if (short_circuits(pb, lambda)) return to_fit(pb, zero_state(pb), lambda, 0);
  State s = warm_start ? warm_state(pb, *warm_start) : zero_state(pb);
  const std::size_t sweeps = solve(pb, s, lambda, opts, observer);
  return to_fit(pb, s, lambda, sweeps);
}

std::vector<double> lambda_grid(double lmax, const LassoOptions& opts) {
  opts.validate();
  const std::size_t m = opts.lambda_grid_size;
  std::vector<double> grid(m, lmax);
  if (m == 1 || lmax <= 0.0) return grid;
  const double log_ratio = std::log(opts.lambda_min_ratio);
  for (std::size_t k = 1; k < m; ++k)
    grid[k] = lmax * std::exp(log_ratio * static_cast<double>(k) / static_cast<double>(m - 1));
  return grid;
}

namespace {

/// Warm-started path. With `stop_early` the path also ends, keeping the fits
/// computed so far, on a convergence failure or once the fit saturates
/// (deviance explained >= 0.999, or a relative gain below 1e-5 between
/// successive lambdas). Otherwise failures propagate.
LassoPath run_path(const SparseBinaryDesign& X, std::span<const double> y,
                   std::span<const double> penalty_factors, const LassoOptions& opts,
                   std::span<const double> lambdas, bool stop_early) {
  opts.validate();
  check_response(X, y);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 0.0)) throw ConfigError("lambda grid values must be non-negative");
    if (k > 0 && lambdas[k] > lambdas[k - 1])
      throw ConfigError("lambda grid must be non-increasing");
  }
  Problem pb(X, y, effective_penalty_factors(X, penalty_factors, opts), opts.fit_intercept);
  LassoPath path;
  path.lambdas.assign(lambdas.begin(), lambdas.end());
  path.fits.reserve(lambdas.size());
  State s = zero_state(pb);
  double null_rss = 0.0;
  for (double r : s.resid) null_rss += r * r;
  double prev_ratio = 0.0;
  for (double lambda : lambdas) {
    if (short_circuits(pb, lambda)) {
      s = zero_state(pb);
      path.fits.push_back(to_fit(pb, s, lambda, 0));
      continue;
    }
    try {
      const std::size_t sweeps = solve(pb, s, lambda, opts, {});
      path.fits.push_back(to_fit(pb, s, lambda, sweeps));
    } catch (const ConvergenceError&) {
      if (!stop_early) throw;
      break;
    }
    if (stop_early && null_rss > 0.0) {
      double rss = 0.0;
      for (double r : s.resid) rss += r * r;
      const double ratio = 1.0 - rss / null_rss;
      if (ratio >= 0.999 || (prev_ratio > 0.0 && ratio - prev_ratio < 1e-5 * ratio)) break;
      prev_ratio = ratio;
    }
  }
  return path;
}

}  // namespace

LassoPath fit_path(const SparseBinaryDesign& X, std::span<const double> y,
                   std::span<const double> penalty_factors, const LassoOptions& opts,
                   std::span<const double> lambdas) {
  return run_path(X, y, penalty_factors, opts, lambdas, false);
}

LassoPath fit_path(const SparseBinaryDesign& X, std::span<const double> y,
                   std::span<const double> penalty_factors, const LassoOptions& opts) {
  const auto pf = effective_penalty_factors(X, penalty_factors, opts);
  const auto grid = lambda_grid(lambda_max(X, y, pf, opts.fit_intercept), opts);
  return fit_path(X, y, penalty_factors, opts, grid);
}

std::vector<std::uint32_t> random_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw ConfigError("fold count must be positive");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::uint32_t> folds(n);
  for (std::size_t i = 0; i < n; ++i) folds[perm[i]] = static_cast<std::uint32_t>(i % k);
  return folds;
}

std::vector<std::uint32_t> stratified_folds(std::span<const std::uint32_t> strata, std::size_t k,
                                            std::uint64_t seed) {
  if (k == 0) throw ConfigError("fold count must be positive");
  std::uint32_t n_strata = 0;
  for (auto s : strata) n_strata = std::max(n_strata, s + 1);
  std::vector<std::vector<std::size_t>> members(n_strata);
  for (std::size_t i = 0; i < strata.size(); ++i) members[strata[i]].push_back(i);

  Rng rng(seed);
  std::vector<std::uint32_t> folds(strata.size());
  std::size_t counter = 0;
  for (auto& rows : members) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t i : rows) folds[i] = static_cast<std::uint32_t>(counter++ % k);
  }
  return folds;
}

CvResult cross_validate(const SparseBinaryDesign& X, std::span<const double> y,
                        std::span<const double> penalty_factors, const LassoOptions& opts,
                        std::span<const std::uint32_t> folds, std::uint64_t seed) {
  opts.validate();
  check_response(X, y);
  const std::size_t n = X.rows();
  const std::size_t k = opts.cv_folds;
  if (n < k)
    throw ConfigError("cross-validation needs at least " + std::to_string(k) + " rows, got " +
                      std::to_string(n));
  if (folds.size() != n) throw StructuralError("fold assignment length must equal row count");
  std::vector<std::vector<std::size_t>> held_out(k), training(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (folds[i] >= k) throw ConfigError("fold id out of range");
    for (std::size_t f = 0; f < k; ++f) (f == folds[i] ? held_out[f] : training[f]).push_back(i);
  }
  for (std::size_t f = 0; f < k; ++f)
    if (held_out[f].empty()) throw ConfigError("fold " + std::to_string(f) + " is empty");

  const auto pf = effective_penalty_factors(X, penalty_factors, opts);
  CvResult cv;
  cv.seed = seed;
  cv.folds.assign(folds.begin(), folds.end());
  cv.lambdas = lambda_grid(lambda_max(X, y, pf, opts.fit_intercept), opts);
  const std::size_t m = cv.lambdas.size();

  std::vector<std::vector<double>> fold_mse(k, std::vector<double>(m));
  std::vector<std::size_t> fold_len(k, 0);
  parallel_for(k, opts.threads, [&](std::size_t f) {
    const auto X_train = X.select_rows(training[f]);
    const auto X_test = X.select_rows(held_out[f]);
    std::vector<double> y_train, y_test;
    for (std::size_t i : training[f]) y_train.push_back(y[i]);
    for (std::size_t i : held_out[f]) y_test.push_back(y[i]);
    const auto path = run_path(X_train, y_train, penalty_factors, opts, cv.lambdas, true);
    fold_len[f] = path.fits.size();
    for (std::size_t l = 0; l < path.fits.size(); ++l)
      fold_mse[f][l] = mse(predict(path.fits[l], X_test), y_test);
  });
  cv.converged_prefix = *std::min_element(fold_len.begin(), fold_len.end());
  if (cv.converged_prefix == 0)
    throw ConvergenceError("cross-validation: no lambda converged in every fold", {});

  cv.mean_mse.assign(m, std::numeric_limits<double>::quiet_NaN());
  cv.std_error.assign(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t l = 0; l < cv.converged_prefix; ++l) {
    double sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) sum += fold_mse[f][l];
    const double mean = sum / static_cast<double>(k);
    double ss = 0.0;
    for (std::size_t f = 0; f < k; ++f) ss += (fold_mse[f][l] - mean) * (fold_mse[f][l] - mean);
    cv.mean_mse[l] = mean;
    cv.std_error[l] = std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
  }
  for (std::size_t l = 1; l < cv.converged_prefix; ++l)
    if (cv.mean_mse[l] < cv.mean_mse[cv.index_min]) cv.index_min = l;
  cv.lambda_min = cv.lambdas[cv.index_min];
  return cv;
}

CvResult cross_validate(const SparseBinaryDesign& X, std::span<const double> y,
                        std::span<const double> penalty_factors, const LassoOptions& opts,
                        std::uint64_t seed) {
  opts.validate();
  if (X.rows() < opts.cv_folds)
    throw ConfigError("cross-validation needs at least " + std::to_string(opts.cv_folds) +
                      " rows, got " + std::to_string(X.rows()));
  const auto folds = random_folds(X.rows(), opts.cv_folds, seed);
  return cross_validate(X, y, penalty_factors, opts, folds, seed);
}

CvFit cv_fit(const SparseBinaryDesign& X, std::span<const double> y,
             std::span<const double> penalty_factors, const LassoOptions& opts,
             std::uint64_t seed, std::span<const std::uint32_t> folds) {
  CvFit out;
  out.cv = folds.empty() ? cross_validate(X, y, penalty_factors, opts, seed)
                         : cross_validate(X, y, penalty_factors, opts, folds, seed);
  const std::span<const double> prefix(out.cv.lambdas.data(), out.cv.index_min + 1);
  auto path = fit_path(X, y, penalty_factors, opts, prefix);
  out.fit = std::move(path.fits.back());
  return out;
}

std::vector<double> predict(const LassoFit& fit, const SparseBinaryDesign& X) {
  if (fit.coefficients.dim != X.cols())
    throw StructuralError("model has " + std::to_string(fit.coefficients.dim) +
                          " features, design has " + std::to_string(X.cols()));
  auto pred = X.dot(fit.coefficients.to_dense());
  for (double& v : pred) v += fit.intercept;
  return pred;
}

double mse(std::span<const double> pred, std::span<const double> y) {
  if (pred.size() != y.size()) throw StructuralError("mse: length mismatch");
  if (y.empty()) throw StructuralError("mse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (pred[i] - y[i]) * (pred[i] - y[i]);
  return ss / static_cast<double>(y.size());
}

double lasso_objective(const SparseBinaryDesign& X, std::span<const double> y,
                       const LassoFit& fit) {
  const auto pred = predict(fit, X);
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) rss += (y[i] - pred[i]) * (y[i] - pred[i]);
  double pen = 0.0;
  for (std::size_t k = 0; k < fit.coefficients.nnz(); ++k) {
    const double pf =
        fit.penalty_factors.empty() ? 1.0 : fit.penalty_factors[fit.coefficients.indices[k]];
    pen += pf * std::abs(fit.coefficients.values[k]);
  }
  return rss / (2.0 * static_cast<double>(y.size())) + fit.lambda * pen;
}

}  // namespace shared_lasso
