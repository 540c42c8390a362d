#include "shared_lasso/resampling.hpp"

#include <algorithm>
#include <string>

#include "shared_lasso/error.hpp"
#include "shared_lasso/parallel.hpp"

namespace shared_lasso {

void BootstrapConfig::validate() const {
  if (replicates < 1) throw ConfigError("bootstrap needs at least one replicate");
  if (resample_size && *resample_size < 1) throw ConfigError("resample_size must be positive");
  solver.validate();
}

std::vector<std::size_t> resample_indices(std::size_t n, Rng& rng) {
  if (n == 0) throw ConfigError("cannot resample from zero rows");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t group, std::uint64_t k) {
  return derive_seed(master, {stream_tag("bootstrap"), group, k});
}

namespace {

/// Draws `size` rows (with replacement) from `rows`.
std::vector<std::size_t> draw(std::span<const std::size_t> rows, std::size_t size, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
  std::vector<std::size_t> out(size);
  for (auto& i : out) i = rows[pick(rng)];
  return out;
}

struct ReplicateOutcome {
  std::vector<Index> active;
  bool ok = false;
  std::string error;
};

/// Runs every replicate (possibly concurrently) and folds outcomes in index order.
template <class Replicate>
void run_replicates(std::size_t B, std::size_t threads, std::size_t width, Replicate&& replicate,
                    StabilityCounts& counts, ReplicateTally& tally) {
  std::vector<ReplicateOutcome> outcomes(B);
  parallel_for(B, threads, [&](std::size_t k) {
    try {
      outcomes[k].active = replicate(k);
      outcomes[k].ok = true;
    } catch (const Error& e) {
      outcomes[k].error = e.what();
    }
  });
  counts.counts.assign(width, 0);
  counts.replicates = B;
  for (std::size_t k = 0; k < B; ++k) {
    if (!outcomes[k].ok) {
      ++tally.failures;
      tally.failure_messages.push_back("replicate " + std::to_string(k) + ": " + outcomes[k].error);
      continue;
    }
    ++tally.successes;
    for (Index j : outcomes[k].active) ++counts.counts[j];
  }
}

}  // namespace

std::vector<GroupBootstrap> bootstrap_lasso_group(const GroupedDataset& ds,
                                                  const BootstrapConfig& cfg) {
  cfg.validate();
  ds.validate();
  std::vector<GroupBootstrap> out;
  for (std::uint32_t g = 0; g < ds.n_groups(); ++g) {
    const auto rows = ds.rows_of_group(g);
    const std::size_t size = cfg.resample_size.value_or(rows.size());
    if (size < cfg.solver.cv_folds)
      throw ConfigError("group '" + ds.group_names[g] + "' replicates have " + std::to_string(size) +
                        " rows, fewer than the " + std::to_string(cfg.solver.cv_folds) + " CV folds");
    GroupBootstrap gb;
    gb.group = ds.group_names[g];
    auto replicate = [&](std::size_t k) {
      Rng rng(replicate_seed(cfg.seed, g, k));
      const auto sample = draw(rows, size, rng);
      const auto X = ds.X.select_rows(sample);
      std::vector<double> y;
      y.reserve(sample.size());
      for (std::size_t i : sample) y.push_back(ds.y[i]);
      const auto result = cv_fit(X, y, {}, cfg.solver, derive_seed(replicate_seed(cfg.seed, g, k), "cv"));
      return result.fit.coefficients.indices;
    };
    run_replicates(cfg.replicates, cfg.threads, ds.n_features(), replicate, gb.counts, gb.tally);
    gb.reduced = union_of_counts(gb.counts, gb.group);
    out.push_back(std::move(gb));
  }
  return out;
}

DslBootstrap bootstrap_dsl(const GroupedDataset& ds, const WeightScheme& scheme,
                           const BootstrapConfig& cfg) {
  cfg.validate();
  ds.validate();
  DslBootstrap out;
  out.r = compute_weights(scheme, ds.group_sizes());
  const std::size_t p = ds.n_features();
  const std::size_t G = ds.n_groups();
  std::vector<std::vector<std::size_t>> group_rows;
  std::size_t total = 0;
  for (std::uint32_t g = 0; g < G; ++g) {
    group_rows.push_back(ds.rows_of_group(g));
    total += cfg.resample_size.value_or(group_rows.back().size());
  }
  if (total < cfg.solver.cv_folds)
    throw ConfigError("replicates have " + std::to_string(total) + " rows, fewer than the " +
                      std::to_string(cfg.solver.cv_folds) + " CV folds");

  auto replicate = [&](std::size_t k) {
    std::vector<std::size_t> sample;
    for (std::uint32_t g = 0; g < G; ++g) {
      Rng rng(replicate_seed(cfg.seed, g, k));
      const auto part = draw(group_rows[g], cfg.resample_size.value_or(group_rows[g].size()), rng);
      sample.insert(sample.end(), part.begin(), part.end());
    }
    const auto boot = ds.select_rows(sample);
    const auto fit = fit_dsl(boot, out.r, scheme.name(), cfg.solver,
                             derive_seed(replicate_seed(cfg.seed, kAllGroups, k), "cv"));
    std::vector<Index> active;
    for (Index j : fit.beta.indices) active.push_back(j);
    for (std::size_t g = 0; g < G; ++g)
      for (Index j : fit.deltas[g].indices) active.push_back(static_cast<Index>(p * (g + 1) + j));
    return active;
  };
  run_replicates(cfg.replicates, cfg.threads, p * (G + 1), replicate, out.augmented_counts,
                 out.tally);

  std::vector<bool> keep(p, false);
  std::vector<std::size_t> per_block(G + 1, 0);
  for (std::size_t c = 0; c < out.augmented_counts.counts.size(); ++c) {
    if (out.augmented_counts.counts[c] == 0) continue;
    keep[c % p] = true;
    ++per_block[c / p];
  }
  out.reduced.original_p = p;
  for (std::size_t j = 0; j < p; ++j)
    if (keep[j]) out.reduced.features.push_back(static_cast<Index>(j));
  out.reduced.source_sizes.emplace_back("shared", per_block[0]);
  for (std::size_t g = 0; g < G; ++g)
    out.reduced.source_sizes.emplace_back(ds.group_names[g], per_block[g + 1]);
  return out;
}

ReducedFeatureSet union_of_counts(const StabilityCounts& counts, std::string source) {
  ReducedFeatureSet set;
  set.original_p = counts.counts.size();
  for (std::size_t j = 0; j < counts.counts.size(); ++j)
    if (counts.counts[j] > 0) set.features.push_back(static_cast<Index>(j));
  set.source_sizes.emplace_back(std::move(source), set.features.size());
  return set;
}

ReducedFeatureSet merge_feature_sets(std::span<const ReducedFeatureSet> sets) {
  ReducedFeatureSet out;
  if (sets.empty()) return out;
  out.original_p = sets.front().original_p;
  for (const auto& s : sets) {
    if (s.original_p != out.original_p)
      throw StructuralError("cannot merge feature sets over different feature spaces");
    std::vector<Index> merged;
    std::set_union(out.features.begin(), out.features.end(), s.features.begin(), s.features.end(),
                   std::back_inserter(merged));
    out.features = std::move(merged);
    out.source_sizes.insert(out.source_sizes.end(), s.source_sizes.begin(), s.source_sizes.end());
  }
  return out;
}

ReducedDataset reduce_dataset(const GroupedDataset& ds, const ReducedFeatureSet& set) {
  if (set.original_p != ds.n_features())
    throw StructuralError("feature set is over " + std::to_string(set.original_p) +
                          " features, data has " + std::to_string(ds.n_features()));
  auto slice = column_slice(ds.X, set.features);
  ReducedDataset out;
  out.data.X = std::move(slice.matrix);
  out.data.y = ds.y;
  out.data.groups = ds.groups;
  out.data.group_names = ds.group_names;
  out.column_map = std::move(slice.column_map);
  return out;
}

std::vector<StabilityRecord> stability_report(const StabilityCounts& counts, std::size_t top_k) {
  std::vector<StabilityRecord> out;
  const double B = static_cast<double>(counts.replicates);
  for (std::size_t j = 0; j < counts.counts.size(); ++j)
    if (counts.counts[j] > 0)
      out.push_back({static_cast<Index>(j), counts.counts[j], static_cast<double>(counts.counts[j]) / B});
  std::stable_sort(out.begin(), out.end(),
                   [](const StabilityRecord& a, const StabilityRecord& b) { return a.count > b.count; });
  if (top_k > 0 && out.size() > top_k) out.resize(top_k);
  return out;
}

}  // namespace shared_lasso
