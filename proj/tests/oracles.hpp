#pragma once

// Test-only reference implementations. They share nothing with the library
// beyond plain data: dense arithmetic, brute force and enumeration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // row-major, n x p

struct Instance {
  Matrix X;
  std::vector<double> y;
  std::size_t n() const { return X.size(); }
  std::size_t p() const { return X.empty() ? 0 : X[0].size(); }
};

/// (1/(2n)) sum (y - mu - x'b)^2 + lambda sum pf|b| with mu profiled out.
inline double objective(const Instance& in, const std::vector<double>& b, double lambda,
                        const std::vector<double>& pf, bool intercept = true) {
  const std::size_t n = in.n();
  std::vector<double> r(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) f += in.X[i][j] * b[j];
    r[i] = in.y[i] - f;
    mean += r[i];
  }
  mean = intercept ? mean / static_cast<double>(n) : 0.0;
  double rss = 0.0;
  for (double v : r) rss += (v - mean) * (v - mean);
  double pen = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) pen += pf[j] * std::abs(b[j]);
  return rss / (2.0 * static_cast<double>(n)) + lambda * pen;
}

inline double intercept_for(const Instance& in, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < in.n(); ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) f += in.X[i][j] * b[j];
    s += in.y[i] - f;
  }
  return s / static_cast<double>(in.n());
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve_dense(Matrix A, std::vector<double> b) {
  const std::size_t k = b.size();
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (std::abs(A[piv][c]) < 1e-12) return std::nullopt;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < k; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t q = c; q < k; ++q) A[r][q] -= f * A[c][q];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(k);
  for (std::size_t c = k; c-- > 0;) {
    double s = b[c];
    for (std::size_t q = c + 1; q < k; ++q) s -= A[c][q] * x[q];
    x[c] = s / A[c][c];
  }
  return x;
}

/// Centered (when intercept) copies of X and y.
inline Instance centered(const Instance& in, bool intercept) {
  Instance c = in;
  if (!intercept) return c;
  const double n = static_cast<double>(in.n());
  for (std::size_t j = 0; j < in.p(); ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < in.n(); ++i) m += in.X[i][j];
    for (std::size_t i = 0; i < in.n(); ++i) c.X[i][j] -= m / n;
  }
  double m = 0.0;
  for (double v : in.y) m += v;
  for (double& v : c.y) v -= m / n;
  return c;
}

/// Smallest eigenvalue proxy: minimum pivot of the centered Gram / n.
inline double min_gram_pivot(const Instance& in, bool intercept = true) {
  const auto c = centered(in, intercept);
  const std::size_t p = in.p(), n = in.n();
  Matrix G(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) G[a][b] += c.X[i][a] * c.X[i][b] / static_cast<double>(n);
  double low = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p; ++k) {
    low = std::min(low, G[k][k]);
    if (G[k][k] <= 0.0) return 0.0;
    for (std::size_t r = k + 1; r < p; ++r) {
      const double f = G[r][k] / G[k][k];
      for (std::size_t q = k; q < p; ++q) G[r][q] -= f * G[k][q];
    }
  }
  return low;
}

/// Exact lasso solution by enumerating all 3^p sign patterns and keeping the
/// one whose restricted normal equations satisfy the optimality conditions.
inline std::vector<double> enumerate_lasso(const Instance& in, double lambda,
                                           const std::vector<double>& pf, bool intercept = true) {
  const auto c = centered(in, intercept);
  const std::size_t p = in.p(), n = in.n();
  const double nn = static_cast<double>(n);
  std::vector<double> best(p, 0.0);
  double best_obj = objective(in, best, lambda, pf, intercept);
  std::size_t patterns = 1;
  for (std::size_t j = 0; j < p; ++j) patterns *= 3;
  for (std::size_t code = 0; code < patterns; ++code) {
    std::vector<int> sign(p);
    std::size_t rest = code;
    std::vector<std::size_t> act;
    for (std::size_t j = 0; j < p; ++j) {
      sign[j] = static_cast<int>(rest % 3) - 1;
      rest /= 3;
      if (sign[j] != 0) act.push_back(j);
    }
    if (act.empty()) continue;
    Matrix A(act.size(), std::vector<double>(act.size(), 0.0));
    std::vector<double> rhs(act.size(), 0.0);
    for (std::size_t a = 0; a < act.size(); ++a) {
      for (std::size_t i = 0; i < n; ++i) {
        rhs[a] += c.X[i][act[a]] * c.y[i] / nn;
        for (std::size_t b = 0; b < act.size(); ++b)
          A[a][b] += c.X[i][act[a]] * c.X[i][act[b]] / nn;
      }
      rhs[a] -= lambda * pf[act[a]] * sign[act[a]];
    }
    const auto sol = solve_dense(A, rhs);
    if (!sol) continue;
    std::vector<double> b(p, 0.0);
    bool consistent = true;
    for (std::size_t a = 0; a < act.size(); ++a) {
      b[act[a]] = (*sol)[a];
      if (b[act[a]] * sign[act[a]] <= 0.0) consistent = false;
    }
    if (!consistent) continue;
    const double obj = objective(in, b, lambda, pf, intercept);
    if (obj < best_obj) {
      best_obj = obj;
      best = b;
    }
  }
  return best;
}

/// Brute-force minimizer: evaluates the objective on a (2K+1)^p grid, recenters
/// on the best point and halves the box until it is narrower than `width`.
inline std::vector<double> grid_refine_lasso(const Instance& in, double lambda,
                                             const std::vector<double>& pf,
                                             bool intercept = true, double width = 1e-10) {
  const std::size_t p = in.p();
  constexpr int K = 10;
  // Any minimizer has lambda * pf_j |b_j| <= objective(0).
  double half = 0.0;
  const double f0 = objective(in, std::vector<double>(p, 0.0), lambda, pf, intercept);
  for (std::size_t j = 0; j < p; ++j) half = std::max(half, f0 / (lambda * pf[j]));
  std::vector<double> center(p, 0.0);
  double best_obj = f0;
  std::vector<int> idx(p);
  while (half > width) {
    const double step = half / K;
    std::vector<double> best = center;
    std::fill(idx.begin(), idx.end(), -K);
    for (;;) {
      std::vector<double> b(p);
      for (std::size_t j = 0; j < p; ++j) b[j] = center[j] + idx[j] * step;
      const double obj = objective(in, b, lambda, pf, intercept);
      if (obj < best_obj) {
        best_obj = obj;
        best = b;
      }
      std::size_t j = 0;
      while (j < p && ++idx[j] > K) idx[j++] = -K;
      if (j == p) break;
    }
    center = best;
    half /= 2.0;
  }
  return center;
}

/// Maximum KKT violation of (mu, b) for the objective above.
inline double kkt_violation(const Instance& in, double mu, const std::vector<double>& b,
                            double lambda, const std::vector<double>& pf) {
  const std::size_t n = in.n();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = mu;
    for (std::size_t j = 0; j < b.size(); ++j) f += in.X[i][j] * b[j];
    r[i] = in.y[i] - f;
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) g += in.X[i][j] * r[i];
    g /= static_cast<double>(n);
    const double bound = lambda * pf[j];
    if (b[j] != 0.0)
      worst = std::max(worst, std::abs(g - bound * (b[j] > 0 ? 1.0 : -1.0)));
    else
      worst = std::max(worst, std::abs(g) - bound);
  }
  return worst;
}

/// Region counts of a family of sets over the universe [0, universe):
/// count[mask] = |{x : x in S_i exactly for the i in mask}|.
inline std::vector<std::size_t> venn_counts(const std::vector<std::vector<std::uint32_t>>& sets,
                                            std::uint32_t universe) {
  std::vector<std::size_t> count(std::size_t{1} << sets.size(), 0);
  for (std::uint32_t x = 0; x < universe; ++x) {
    std::size_t mask = 0;
    for (std::size_t s = 0; s < sets.size(); ++s)
      for (std::uint32_t e : sets[s])
        if (e == x) mask |= std::size_t{1} << s;
    ++count[mask];
  }
  count[0] = 0;
  return count;
}

}  // namespace oracle
