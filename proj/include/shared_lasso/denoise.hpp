#pragma once

#include <cstddef>
#include <vector>

#include "shared_lasso/dsl.hpp"
#include "shared_lasso/lasso.hpp"

namespace shared_lasso {

inline constexpr std::size_t kGammaGridSize = 100;
inline constexpr double kGammaMax = 0.5;

/// Test MSE of a soft-thresholded fit along an even gamma grid on [0, 1/2].
struct DenoiseSweep {
  std::vector<double> gammas;
  std::vector<double> thresholds;
  std::vector<double> mses;
  double argmin_gamma = 0.0;
  double min_mse = 0.0;
  double sigma = 0.0;
  std::size_t n = 0;
};

/// Global de-noising level sqrt(2 ln n) * gamma1 * sigma / sqrt(n).
double donoho_threshold(std::size_t n, double gamma1, double sigma);

/// Soft-thresholds every coefficient by t; the intercept is untouched.
LassoFit apply_threshold(const LassoFit& fit, double t);
/// Soft-thresholds beta and every delta_g by t.
DslFit apply_threshold(const DslFit& fit, double t);

/// The evenly spaced grid, endpoints exactly 0 and 0.5.
std::vector<double> gamma_grid();

/// Sample standard deviation of the training residuals.
double residual_sigma(const LassoFit& fit, const SparseBinaryDesign& X, std::span<const double> y);
double residual_sigma(const DslFit& fit, const GroupedDataset& train);

/// The argmin breaks ties toward the smaller gamma.
DenoiseSweep sweep_gamma(const LassoFit& fit, const GroupedDataset& test, double sigma,
                         std::size_t n);
DenoiseSweep sweep_gamma(const DslFit& fit, const GroupedDataset& test, double sigma,
                         std::size_t n);

}  // namespace shared_lasso
