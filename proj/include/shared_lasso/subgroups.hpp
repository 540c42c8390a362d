#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shared_lasso/dsl.hpp"
#include "shared_lasso/lasso.hpp"

namespace shared_lasso {

/// Sorted, duplicate-free feature ids with a label.
struct ActiveSet {
  std::string label;
  std::vector<Index> features;
};

struct ExtractedSets {
  std::vector<ActiveSet> per_group;  // support of each group's separate lasso
  ActiveSet shared;                  // support of the DSL shared coefficients
};

/// One venn region: the sets a feature belongs to (bit i = input set i).
struct VennRegion {
  std::uint32_t membership = 0;
  std::size_t count = 0;
};

struct Subgroups {
  ActiveSet all_intersection;          // (intersection of all groups) and shared
  std::vector<ActiveSet> shared_int;   // group g and shared
  ActiveSet additional;                // shared minus the union of all groups
  std::vector<std::string> set_labels; // group labels then the shared label
  std::vector<VennRegion> regions;     // nonempty regions, ascending membership
};

ExtractedSets extract_sets(std::span<const LassoFit> separate, const DslFit& dsl);

Subgroups subgroups(std::span<const ActiveSet> group_sets, const ActiveSet& shared);

/// Region counts of a family of sets (at most 31), keyed by membership mask.
std::vector<VennRegion> venn_regions(std::span<const ActiveSet> sets);

enum class RemovalMode {
  Refit,     // drop the columns and refit the DSL model
  ZeroOnly,  // zero the coefficients of the removed features in the baseline fit
};

enum class LambdaPolicy {
  Reselect,  // fresh cross-validation after removal
  Reuse,     // keep the baseline lambda
};

struct RemovalSettings {
  RemovalMode mode = RemovalMode::Refit;
  LambdaPolicy lambda_policy = LambdaPolicy::Reselect;
};

struct RemovalRow {
  std::string penalty;
  std::string removal_type;
  double all_pct = 0.0;
  std::vector<double> group_pct;
  std::size_t coef_removed = 0;
};

struct RemovalReport {
  std::vector<std::string> group_names;
  std::vector<RemovalRow> rows;
};

/// 100 * (after - before) / before, with 0 when both are equal.
double relative_change_pct(double before, double after);

/// Relative test-MSE change after removing `removed` features from the model
/// whose baseline fit and test evaluation are given.
RemovalRow removal_effect(const GroupedDataset& train, const GroupedDataset& test,
                          const WeightScheme& scheme, std::span<const Index> removed,
                          const DslFit& baseline_fit, const MseTable& baseline,
                          const LassoOptions& opts, std::uint64_t seed,
                          const RemovalSettings& settings = {});

/// Everything needed for one penalty block of the removal table.
struct SubgroupAnalysis {
  std::string penalty;
  ExtractedSets sets;
  Subgroups groups;
  DslFit baseline_fit;
  MseTable baseline;
  std::vector<RemovalRow> rows;  // no removal, all intersection, shared int g..., additional
};

/// Separate fits, baseline DSL fit, subgroup construction and every removal row.
SubgroupAnalysis analyze_subgroups(const GroupedDataset& train, const GroupedDataset& test,
                                   const WeightScheme& scheme, const LassoOptions& opts,
                                   std::uint64_t seed, const RemovalSettings& settings = {});
/// Same, reusing precomputed separate fits.
SubgroupAnalysis analyze_subgroups(const GroupedDataset& train, const GroupedDataset& test,
                                   const WeightScheme& scheme, std::span<const LassoFit> separate,
                                   const LassoOptions& opts, std::uint64_t seed,
                                   const RemovalSettings& settings = {});

}  // namespace shared_lasso
