#pragma once

#include <cstdint>
#include <cstring>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "shared_lasso/dsl.hpp"
#include "shared_lasso/sparse.hpp"

namespace fixtures {

using shared_lasso::Index;
using shared_lasso::SparseBinaryDesign;

/// Bitwise equality, so NaN entries compare equal to themselves.
inline bool identical(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

inline SparseBinaryDesign to_design(const oracle::Matrix& X) {
  std::vector<std::vector<Index>> rows;
  for (const auto& r : X) {
    std::vector<Index> row;
    for (std::size_t j = 0; j < r.size(); ++j)
      if (r[j] != 0.0) row.push_back(static_cast<Index>(j));
    rows.push_back(row);
  }
  return SparseBinaryDesign::from_rows(rows, X.empty() ? 0 : X[0].size());
}

/// Random binary X with N(0,1)-ish y driven by a few true coefficients. Rejects
/// designs whose centered Gram is near singular so the solution is unique.
inline oracle::Instance random_instance(std::size_t n, std::size_t p, std::uint64_t seed,
                                        double density = 0.5, double min_pivot = 0.02) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (;;) {
    oracle::Instance in;
    in.X.assign(n, std::vector<double>(p, 0.0));
    for (auto& row : in.X)
      for (auto& v : row) v = bit(rng) ? 1.0 : 0.0;
    std::vector<double> beta(p);
    for (auto& b : beta) b = noise(rng);
    for (const auto& row : in.X) {
      double f = 0.0;
      for (std::size_t j = 0; j < p; ++j) f += row[j] * beta[j];
      in.y.push_back(f + 0.5 * noise(rng));
    }
    if (oracle::min_gram_pivot(in) >= min_pivot) return in;
  }
}

/// Random grouped dataset with binary features; groups are contiguous blocks.
inline shared_lasso::GroupedDataset random_grouped(const std::vector<std::size_t>& sizes,
                                                   std::size_t p, std::uint64_t seed,
                                                   double density = 0.4) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> beta(p);
  for (auto& b : beta) b = noise(rng);
  shared_lasso::GroupedDataset ds;
  std::vector<std::vector<Index>> rows;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    ds.group_names.push_back("g" + std::to_string(g + 1));
    std::vector<double> delta(p);
    for (auto& d : delta) d = 0.5 * noise(rng);
    for (std::size_t i = 0; i < sizes[g]; ++i) {
      std::vector<Index> row;
      double f = 0.0;
      for (std::size_t j = 0; j < p; ++j)
        if (bit(rng)) {
          row.push_back(static_cast<Index>(j));
          f += beta[j] + delta[j];
        }
      rows.push_back(row);
      ds.y.push_back(f + 0.5 * noise(rng));
      ds.groups.push_back(static_cast<std::uint32_t>(g));
    }
  }
  ds.X = SparseBinaryDesign::from_rows(rows, p);
  return ds;
}

}  // namespace fixtures
