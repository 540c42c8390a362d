#include "shared_lasso/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "shared_lasso/error.hpp"
#include "shared_lasso/rng.hpp"

namespace shared_lasso {

namespace {

GroupedDataset draw(const SyntheticSpec& spec, const std::vector<double>& beta,
                    const std::vector<std::vector<double>>& deltas, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution present(spec.density);
  std::normal_distribution<double> noise(0.0, spec.noise_sd);
  GroupedDataset ds;
  for (std::size_t g = 0; g < spec.group_sizes.size(); ++g)
    ds.group_names.push_back("g" + std::to_string(g + 1));
  std::vector<std::vector<Index>> rows;
  for (std::uint32_t g = 0; g < spec.group_sizes.size(); ++g) {
    for (std::size_t i = 0; i < spec.group_sizes[g]; ++i) {
      std::vector<Index> row;
      double y = spec.intercept;
      for (Index j = 0; j < spec.n_features; ++j) {
        if (!present(rng)) continue;
        row.push_back(j);
        y += beta[j] + deltas[g][j];
      }
      if (spec.noise_sd > 0) y += noise(rng);
      rows.push_back(std::move(row));
      ds.y.push_back(y);
      ds.groups.push_back(g);
    }
  }
  ds.X = SparseBinaryDesign::from_rows(rows, spec.n_features);
  return ds;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.group_sizes.empty()) throw ConfigError("synthetic data needs at least one group");
  if (spec.support > spec.n_features) throw ConfigError("support exceeds the feature count");
  if (spec.density < 0 || spec.density > 1) throw ConfigError("density must lie in [0, 1]");

  Rng rng(derive_seed(spec.seed, "coefficients"));
  std::vector<Index> order(spec.n_features);
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  SyntheticData out;
  out.beta.assign(spec.n_features, 0.0);
  std::uniform_real_distribution<double> magnitude(0.5 * spec.signal, 1.5 * spec.signal);
  std::bernoulli_distribution negative(0.5);
  for (std::size_t k = 0; k < spec.support; ++k)
    out.beta[order[k]] = negative(rng) ? -magnitude(rng) : magnitude(rng);

  std::normal_distribution<double> offset(0.0, spec.offset_scale);
  const std::size_t pool = std::max<std::size_t>(spec.support, 1);
  for (std::size_t g = 0; g < spec.group_sizes.size(); ++g) {
    std::vector<double> d(spec.n_features, 0.0);
    std::vector<Index> candidates(order.begin(),
                                  order.begin() + static_cast<std::ptrdiff_t>(std::min(pool, order.size())));
    std::shuffle(candidates.begin(), candidates.end(), rng);
    for (std::size_t k = 0; k < std::min(spec.offset_support, candidates.size()); ++k)
      d[candidates[k]] = offset(rng);
    out.deltas.push_back(std::move(d));
  }

  out.train = draw(spec, out.beta, out.deltas, derive_seed(spec.seed, "train"));
  out.test = draw(spec, out.beta, out.deltas, derive_seed(spec.seed, "test"));
  return out;
}

}  // namespace shared_lasso
