#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "shared_lasso/error.hpp"
#include "shared_lasso/sparse.hpp"

namespace shared_lasso {

/// Solver and model-selection settings.
///
/// Penalty convention: the loss is (1/(2n)) * RSS, so every lambda used or
/// reported here is "per-n". Multiply by n to obtain the lambda of the
/// unnormalized (1/2) * RSS objective.
struct LassoOptions {
  std::size_t lambda_grid_size = 100;
  double lambda_min_ratio = 1e-3;
  std::size_t max_iterations = 10000;  // coordinate sweeps per fit
  double tolerance = 1e-7;             // max absolute coefficient change in a sweep
  std::size_t cv_folds = 10;
  bool fit_intercept = true;
  /// Multiply each penalty factor by its column's standard deviation
  /// instead of standardizing the (binary) data itself.
  bool scale_penalty_by_sd = false;
  /// Worker cap for cross-validation folds; 0 resolves automatically.
  std::size_t threads = 1;

  void validate() const;
};

struct LassoFit {
  double intercept = 0.0;
  SparseVector coefficients;
  double lambda = 0.0;
  std::vector<double> penalty_factors;
  std::size_t sweeps = 0;
};

/// Fits along a decreasing lambda grid, each warm-started from the previous.
struct LassoPath {
  std::vector<double> lambdas;
  std::vector<LassoFit> fits;
};

struct CvResult {
  std::vector<double> lambdas;
  std::vector<double> mean_mse;
  std::vector<double> std_error;
  std::size_t index_min = 0;
  double lambda_min = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> folds;  // fold id per row
  /// Leading grid points reached by every fold's path. Later points carry NaN
  /// and are never selected.
  std::size_t converged_prefix = 0;
};

/// Raised when coordinate descent exhausts max_iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, LassoFit last_iterate)
      : Error(what), last_(std::move(last_iterate)) {}
  const LassoFit& last_iterate() const { return last_; }

 private:
  LassoFit last_;
};

/// Called after every sweep with the sweep number and the objective value.
using SweepObserver = std::function<void(std::size_t sweep, double objective)>;

/// sgn(z) * max(|z| - t, 0).
double soft_threshold(double z, double t);

/// Smallest lambda at which the all-zero coefficient vector is optimal:
/// max over penalized j of |sum_i x_ij (y_i - ybar)| / (n * pf_j).
/// An empty penalty_factors span means all ones.
double lambda_max(const SparseBinaryDesign& X, std::span<const double> y,
                  std::span<const double> penalty_factors, bool fit_intercept = true);

/// Penalty factors actually used for X under `opts` (unit when empty input,
/// scaled by column standard deviation when requested).
std::vector<double> effective_penalty_factors(const SparseBinaryDesign& X,
                                              std::span<const double> penalty_factors,
                                              const LassoOptions& opts);

/// Minimizes (1/(2n)) sum_i (y_i - mu - x_i'b)^2 + lambda * sum_j pf_j |b_j|.
LassoFit fit(const SparseBinaryDesign& X, std::span<const double> y, double lambda,
             std::span<const double> penalty_factors, const LassoOptions& opts,
             const LassoFit* warm_start = nullptr, const SweepObserver& observer = {});

/// Log-spaced grid from lambda_max down to lambda_min_ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, const LassoOptions& opts);

LassoPath fit_path(const SparseBinaryDesign& X, std::span<const double> y,
                   std::span<const double> penalty_factors, const LassoOptions& opts);
/// Path over a caller-supplied decreasing grid.
LassoPath fit_path(const SparseBinaryDesign& X, std::span<const double> y,
                   std::span<const double> penalty_factors, const LassoOptions& opts,
                   std::span<const double> lambdas);

/// Seeded random partition of n rows into k near-equal folds.
std::vector<std::uint32_t> random_folds(std::size_t n, std::size_t k, std::uint64_t seed);
/// Like random_folds, but every stratum is spread evenly over the folds.
std::vector<std::uint32_t> stratified_folds(std::span<const std::uint32_t> strata, std::size_t k,
                                            std::uint64_t seed);

/// k-fold CV over the full-data lambda grid. lambda_min is the largest grid
/// value attaining the minimum mean held-out MSE. Fold paths stop early on a
/// convergence failure or a saturated fit, and the curve ends at the last
/// lambda every fold reached.
CvResult cross_validate(const SparseBinaryDesign& X, std::span<const double> y,
                        std::span<const double> penalty_factors, const LassoOptions& opts,
                        std::uint64_t seed);
/// CV with a caller-supplied fold assignment.
CvResult cross_validate(const SparseBinaryDesign& X, std::span<const double> y,
                        std::span<const double> penalty_factors, const LassoOptions& opts,
                        std::span<const std::uint32_t> folds, std::uint64_t seed);

struct CvFit {
  CvResult cv;
  LassoFit fit;  // full-data fit at cv.lambda_min
};

/// Cross-validates, then returns the full-data path fit at lambda_min.
CvFit cv_fit(const SparseBinaryDesign& X, std::span<const double> y,
             std::span<const double> penalty_factors, const LassoOptions& opts,
             std::uint64_t seed, std::span<const std::uint32_t> folds = {});

std::vector<double> predict(const LassoFit& fit, const SparseBinaryDesign& X);
double mse(std::span<const double> pred, std::span<const double> y);

/// Value of the normalized lasso objective at `fit`.
double lasso_objective(const SparseBinaryDesign& X, std::span<const double> y,
                       const LassoFit& fit);

}  // namespace shared_lasso
