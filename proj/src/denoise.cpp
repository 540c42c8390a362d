#include "shared_lasso/denoise.hpp"

#include <cmath>
#include <string>

namespace shared_lasso {

double donoho_threshold(std::size_t n, double gamma1, double sigma) {
  if (n < 2) throw ConfigError("de-noising threshold needs n >= 2, got " + std::to_string(n));
  if (!(gamma1 >= 0.0)) throw ConfigError("gamma1 must be non-negative");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  const double nn = static_cast<double>(n);
  return std::sqrt(2.0 * std::log(nn)) * gamma1 * sigma / std::sqrt(nn);
}

namespace {

SparseVector shrink(const SparseVector& v, double t) {
  SparseVector out = SparseVector::zeros(v.dim);
  for (std::size_t k = 0; k < v.nnz(); ++k) {
    const double s = soft_threshold(v.values[k], t);
    if (s != 0.0) {
      out.indices.push_back(v.indices[k]);
      out.values.push_back(s);
    }
  }
  return out;
}

void check_threshold(double t) {
  if (!(t >= 0.0)) throw ConfigError("threshold must be non-negative");
}

double sample_sd(std::span<const double> pred, std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) throw ConfigError("residual standard deviation needs at least two rows");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += y[i] - pred[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (y[i] - pred[i] - mean) * (y[i] - pred[i] - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

template <class Fit, class Evaluate>
DenoiseSweep sweep(const Fit& fit, double sigma, std::size_t n, Evaluate&& evaluate_mse) {
  DenoiseSweep out;
  out.sigma = sigma;
  out.n = n;
  out.gammas = gamma_grid();
  for (double gamma : out.gammas) {
    const double t = donoho_threshold(n, gamma, sigma);
    out.thresholds.push_back(t);
    out.mses.push_back(evaluate_mse(apply_threshold(fit, t)));
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < out.mses.size(); ++k)
    if (out.mses[k] < out.mses[best]) best = k;
  out.argmin_gamma = out.gammas[best];
  out.min_mse = out.mses[best];
  return out;
}

}  // namespace

LassoFit apply_threshold(const LassoFit& fit, double t) {
  check_threshold(t);
  LassoFit out = fit;
  out.coefficients = shrink(fit.coefficients, t);
  return out;
}

DslFit apply_threshold(const DslFit& fit, double t) {
  check_threshold(t);
  DslFit out = fit;
  out.beta = shrink(fit.beta, t);
  for (auto& d : out.deltas) d = shrink(d, t);
  return out;
}

std::vector<double> gamma_grid() {
  std::vector<double> grid(kGammaGridSize);
  for (std::size_t k = 0; k < kGammaGridSize; ++k)
    grid[k] = kGammaMax * static_cast<double>(k) / static_cast<double>(kGammaGridSize - 1);
  grid.front() = 0.0;
  grid.back() = kGammaMax;
  return grid;
}

double residual_sigma(const LassoFit& fit, const SparseBinaryDesign& X, std::span<const double> y) {
  return sample_sd(predict(fit, X), y);
}

double residual_sigma(const DslFit& fit, const GroupedDataset& train) {
  return sample_sd(predict(fit, train), train.y);
}

DenoiseSweep sweep_gamma(const LassoFit& fit, const GroupedDataset& test, double sigma,
                         std::size_t n) {
  return sweep(fit, sigma, n, [&](const LassoFit& f) { return mse(predict(f, test.X), test.y); });
}

DenoiseSweep sweep_gamma(const DslFit& fit, const GroupedDataset& test, double sigma,
                         std::size_t n) {
  return sweep(fit, sigma, n, [&](const DslFit& f) { return mse(predict(f, test), test.y); });
}

}  // namespace shared_lasso
