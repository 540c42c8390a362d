#include "shared_lasso/subgroups.hpp"

#include <algorithm>
#include <iterator>

#include "shared_lasso/parallel.hpp"

namespace shared_lasso {

namespace {

std::vector<Index> intersect(std::span<const Index> a, std::span<const Index> b) {
  std::vector<Index> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Index> unite(std::span<const Index> a, std::span<const Index> b) {
  std::vector<Index> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Index> subtract(std::span<const Index> a, std::span<const Index> b) {
  std::vector<Index> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

SparseVector drop_features(const SparseVector& v, std::span<const Index> removed) {
  SparseVector out = SparseVector::zeros(v.dim);
  for (std::size_t k = 0; k < v.nnz(); ++k) {
    if (std::binary_search(removed.begin(), removed.end(), v.indices[k])) continue;
    out.indices.push_back(v.indices[k]);
    out.values.push_back(v.values[k]);
  }
  return out;
}

}  // namespace

ExtractedSets extract_sets(std::span<const LassoFit> separate, const DslFit& dsl) {
  if (separate.size() != dsl.deltas.size())
    throw StructuralError("expected one separate fit per DSL group");
  ExtractedSets out;
  for (std::size_t g = 0; g < separate.size(); ++g) {
    if (separate[g].coefficients.dim != dsl.n_features())
      throw StructuralError("separate fit " + std::to_string(g) +
                            " is over a different feature space than the DSL fit");
    const std::string label = g < dsl.group_names.size() ? dsl.group_names[g] : std::to_string(g);
    out.per_group.push_back({label, separate[g].coefficients.indices});
  }
  out.shared = {"shared", dsl.beta.indices};
  return out;
}

std::vector<VennRegion> venn_regions(std::span<const ActiveSet> sets) {
  if (sets.size() > 31) throw ConfigError("venn regions support at most 31 sets");
  std::vector<Index> all;
  for (const auto& s : sets) all = unite(all, s.features);
  std::vector<std::uint32_t> mask(all.size(), 0);
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (Index f : sets[s].features) {
      const auto pos = std::lower_bound(all.begin(), all.end(), f) - all.begin();
      mask[static_cast<std::size_t>(pos)] |= 1u << s;
    }
  std::vector<std::size_t> counts(std::size_t{1} << sets.size(), 0);
  for (auto m : mask) ++counts[m];
  std::vector<VennRegion> out;
  for (std::size_t m = 1; m < counts.size(); ++m)
    if (counts[m] > 0) out.push_back({static_cast<std::uint32_t>(m), counts[m]});
  return out;
}

Subgroups subgroups(std::span<const ActiveSet> group_sets, const ActiveSet& shared) {
  Subgroups out;
  std::vector<Index> common;
  std::vector<Index> any;
  for (std::size_t g = 0; g < group_sets.size(); ++g) {
    common = g == 0 ? group_sets[g].features : intersect(common, group_sets[g].features);
    any = unite(any, group_sets[g].features);
    out.shared_int.push_back(
        {"shared int " + group_sets[g].label, intersect(group_sets[g].features, shared.features)});
  }
  out.all_intersection = {"all intersection",
                          group_sets.empty() ? std::vector<Index>{}
                                             : intersect(common, shared.features)};
  out.additional = {"additional", subtract(shared.features, any)};

  std::vector<ActiveSet> family(group_sets.begin(), group_sets.end());
  family.push_back(shared);
  for (const auto& s : family) out.set_labels.push_back(s.label);
  out.regions = venn_regions(family);
  return out;
}

double relative_change_pct(double before, double after) {
  if (after == before) return 0.0;
  return 100.0 * (after - before) / before;
}

RemovalRow removal_effect(const GroupedDataset& train, const GroupedDataset& test,
                          const WeightScheme& scheme, std::span<const Index> removed,
                          const DslFit& baseline_fit, const MseTable& baseline,
                          const LassoOptions& opts, std::uint64_t seed,
                          const RemovalSettings& settings) {
  std::vector<Index> sorted(removed.begin(), removed.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (Index j : sorted)
    if (j >= train.n_features()) throw StructuralError("removed feature id out of range");

  MseTable after;
  if (settings.mode == RemovalMode::ZeroOnly) {
    DslFit zeroed = baseline_fit;
    zeroed.beta = drop_features(baseline_fit.beta, sorted);
    for (auto& d : zeroed.deltas) d = drop_features(d, sorted);
    after = evaluate(zeroed, test);
  } else {
    std::vector<Index> keep;
    for (Index j = 0; j < train.n_features(); ++j)
      if (!std::binary_search(sorted.begin(), sorted.end(), j)) keep.push_back(j);
    GroupedDataset tr = train, te = test;
    tr.X = column_slice(train.X, keep).matrix;
    te.X = column_slice(test.X, keep).matrix;
    const auto r = compute_weights(scheme, tr.group_sizes());
    const DslFit refit = settings.lambda_policy == LambdaPolicy::Reuse
                             ? fit_dsl_at(tr, r, scheme.name(), baseline_fit.lambda, opts)
                             : fit_dsl(tr, r, scheme.name(), opts, seed);
    after = evaluate(refit, te);
  }

  RemovalRow row;
  row.penalty = scheme.name();
  row.coef_removed = sorted.size();
  row.all_pct = relative_change_pct(baseline.all, after.all);
  for (std::size_t g = 0; g < baseline.per_group.size(); ++g)
    row.group_pct.push_back(relative_change_pct(baseline.per_group[g], after.per_group[g]));
  return row;
}

SubgroupAnalysis analyze_subgroups(const GroupedDataset& train, const GroupedDataset& test,
                                   const WeightScheme& scheme, std::span<const LassoFit> separate,
                                   const LassoOptions& opts, std::uint64_t seed,
                                   const RemovalSettings& settings) {
  SubgroupAnalysis a;
  a.penalty = scheme.name();
  a.baseline_fit = fit_dsl(train, scheme, opts, seed);
  a.baseline = evaluate(a.baseline_fit, test);
  a.sets = extract_sets(separate, a.baseline_fit);
  a.groups = subgroups(a.sets.per_group, a.sets.shared);

  std::vector<ActiveSet> removals{{"no removal", {}}, a.groups.all_intersection};
  removals.insert(removals.end(), a.groups.shared_int.begin(), a.groups.shared_int.end());
  removals.push_back(a.groups.additional);

  LassoOptions inner = opts;
  inner.threads = 1;
  a.rows.resize(removals.size());
  parallel_for(removals.size(), opts.threads, [&](std::size_t k) {
    a.rows[k] = removal_effect(train, test, scheme, removals[k].features, a.baseline_fit,
                               a.baseline, inner, seed, settings);
    a.rows[k].removal_type = removals[k].label;
  });
  return a;
}

SubgroupAnalysis analyze_subgroups(const GroupedDataset& train, const GroupedDataset& test,
                                   const WeightScheme& scheme, const LassoOptions& opts,
                                   std::uint64_t seed, const RemovalSettings& settings) {
  const auto separate = fit_separate(train, opts, seed);
  return analyze_subgroups(train, test, scheme, separate, opts, seed, settings);
}

}  // namespace shared_lasso
