#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shared_lasso/dsl.hpp"
#include "shared_lasso/lasso.hpp"
#include "shared_lasso/rng.hpp"

namespace shared_lasso {

struct BootstrapConfig {
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  LassoOptions solver;
  /// Rows drawn per group and replicate; defaults to the group's own size.
  std::optional<std::size_t> resample_size;
  /// Worker cap across replicates; 0 resolves automatically.
  std::size_t threads = 1;

  void validate() const;
};

/// How many replicates selected each feature (or augmented column).
struct StabilityCounts {
  std::vector<std::uint32_t> counts;
  std::size_t replicates = 0;
};

/// Union of replicate active sets, sorted ascending.
struct ReducedFeatureSet {
  std::vector<Index> features;
  std::size_t original_p = 0;
  /// Number of distinct features contributed by each source (a group for
  /// BLS; the shared block and each offset block for BSLS).
  std::vector<std::pair<std::string, std::size_t>> source_sizes;
};

struct ReplicateTally {
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;  // "replicate k: what()"
};

struct GroupBootstrap {
  std::string group;
  StabilityCounts counts;
  ReducedFeatureSet reduced;
  ReplicateTally tally;
};

struct DslBootstrap {
  std::vector<double> r;
  StabilityCounts augmented_counts;  // over the p * (G + 1) augmented columns
  ReducedFeatureSet reduced;         // over original features
  ReplicateTally tally;
};

/// n indices drawn uniformly from [0, n) with replacement.
std::vector<std::size_t> resample_indices(std::size_t n, Rng& rng);

/// Seed of replicate k for group g. Whole-dataset streams use kAllGroups.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t group, std::uint64_t k);
inline constexpr std::uint64_t kAllGroups = ~std::uint64_t{0};

/// Bootstrapped lasso per group: CV-selected fit on each resample of each group.
std::vector<GroupBootstrap> bootstrap_lasso_group(const GroupedDataset& ds,
                                                  const BootstrapConfig& cfg);

/// Bootstrapped data-shared lasso over within-group resamples.
DslBootstrap bootstrap_dsl(const GroupedDataset& ds, const WeightScheme& scheme,
                           const BootstrapConfig& cfg);

/// Features with count >= 1.
ReducedFeatureSet union_of_counts(const StabilityCounts& counts, std::string source);
/// Sorted union of several feature sets over the same feature space.
ReducedFeatureSet merge_feature_sets(std::span<const ReducedFeatureSet> sets);

struct ReducedDataset {
  GroupedDataset data;
  std::vector<Index> column_map;  // new column -> original feature
};

ReducedDataset reduce_dataset(const GroupedDataset& ds, const ReducedFeatureSet& set);

struct StabilityRecord {
  Index feature;
  std::uint32_t count;
  double proportion;
};

/// Features with nonzero counts, sorted by count (descending) then id;
/// truncated to top_k when top_k > 0.
std::vector<StabilityRecord> stability_report(const StabilityCounts& counts,
                                              std::size_t top_k = 0);

}  // namespace shared_lasso
