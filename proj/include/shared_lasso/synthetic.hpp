#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "shared_lasso/dsl.hpp"

namespace shared_lasso {

/// Grouped binary regression data with a sparse shared effect and small
/// per-group offsets on the shared support.
struct SyntheticSpec {
  std::vector<std::size_t> group_sizes{100, 100, 100};  // rows per group in each split
  std::size_t n_features = 50;
  double density = 0.1;              // P(x_ij = 1)
  std::size_t support = 5;           // nonzeros of the shared effect
  double signal = 1.0;               // |beta_j| drawn from [signal/2, 3 signal/2]
  std::size_t offset_support = 2;    // nonzeros of each group offset
  double offset_scale = 0.2;         // offsets drawn from N(0, offset_scale^2)
  double noise_sd = 1.0;
  double intercept = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  GroupedDataset train;
  GroupedDataset test;
  std::vector<double> beta;
  std::vector<std::vector<double>> deltas;
};

/// Train and test splits drawn independently from one model.
SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace shared_lasso
