#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "shared_lasso/subgroups.hpp"
#include "shared_lasso/synthetic.hpp"

using namespace shared_lasso;

namespace {

ActiveSet set_of(std::string label, std::vector<Index> f) { return ActiveSet{std::move(label), std::move(f)}; }

std::vector<ActiveSet> three(std::vector<Index> a, std::vector<Index> b, std::vector<Index> c) {
  return {set_of("drama", std::move(a)), set_of("comedy", std::move(b)),
          set_of("horror", std::move(c))};
}

void check_against_oracle(const std::vector<ActiveSet>& sets, std::uint32_t universe) {
  std::vector<std::vector<std::uint32_t>> raw;
  for (const auto& s : sets) raw.emplace_back(s.features.begin(), s.features.end());
  const auto expect = oracle::venn_counts(raw, universe);
  const auto got = venn_regions(sets);
  std::vector<std::size_t> dense(expect.size(), 0);
  std::uint32_t last = 0;
  for (const auto& r : got) {
    CHECK(r.count > 0);
    CHECK(r.membership > last);
    last = r.membership;
    dense[r.membership] = r.count;
  }
  CHECK(dense == expect);
}

LassoOptions quick() {
  LassoOptions o;
  o.lambda_grid_size = 20;
  o.cv_folds = 5;
  return o;
}

}  // namespace

TEST_CASE("subgroup construction") {
  SUBCASE("empty shared set empties everything") {
    const auto s = subgroups(three({1, 2}, {2, 3}, {4}), set_of("shared", {}));
    CHECK(s.all_intersection.features.empty());
    for (const auto& g : s.shared_int) CHECK(g.features.empty());
    CHECK(s.additional.features.empty());
  }
  SUBCASE("identical sets") {
    const std::vector<Index> same{1, 5, 9};
    const auto s = subgroups(three(same, same, same), set_of("shared", same));
    CHECK(s.all_intersection.features == same);
    for (const auto& g : s.shared_int) CHECK(g.features == same);
    CHECK(s.additional.features.empty());
  }
  SUBCASE("hand-built sets of sizes 3, 3, 3, 4") {
    const auto groups = three({0, 1, 2}, {1, 2, 3}, {2, 3, 4});
    const auto shared = set_of("shared", {2, 3, 7, 8});
    const auto s = subgroups(groups, shared);
    CHECK(s.all_intersection.features == std::vector<Index>{2});
    CHECK(s.shared_int[0].features == std::vector<Index>{2});
    CHECK(s.shared_int[1].features == std::vector<Index>{2, 3});
    CHECK(s.shared_int[2].features == std::vector<Index>{2, 3});
    CHECK(s.additional.features == std::vector<Index>{7, 8});
    CHECK(s.set_labels == std::vector<std::string>{"drama", "comedy", "horror", "shared"});
    auto all = groups;
    all.push_back(shared);
    check_against_oracle(all, 10);
  }
  SUBCASE("disjoint supports") {
    const auto s = subgroups(three({0}, {1}, {2}), set_of("shared", {3}));
    CHECK(s.all_intersection.features.empty());
    for (const auto& g : s.shared_int) CHECK(g.features.empty());
    CHECK(s.additional.features == std::vector<Index>{3});
    CHECK(s.regions.size() == 4);
  }
}

TEST_CASE("randomized four-set families match the enumeration oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t universe = 1 + static_cast<std::uint32_t>(rng() % 50);
    std::vector<ActiveSet> sets;
    for (int s = 0; s < 4; ++s) {
      std::bernoulli_distribution in(0.1 + 0.2 * s);
      std::vector<Index> f;
      for (Index x = 0; x < universe; ++x)
        if (in(rng)) f.push_back(x);
      sets.push_back(set_of("s" + std::to_string(s), f));
    }
    check_against_oracle(sets, universe);

    const std::vector<ActiveSet> groups(sets.begin(), sets.begin() + 3);
    const auto sg = subgroups(groups, sets[3]);
    std::set<Index> uni;
    for (const auto& s : sets) uni.insert(s.features.begin(), s.features.end());
    std::size_t total = 0;
    for (const auto& r : sg.regions) total += r.count;
    CHECK(total == uni.size());
    for (const auto& si : sg.shared_int) {
      CHECK(std::includes(si.features.begin(), si.features.end(),
                          sg.all_intersection.features.begin(), sg.all_intersection.features.end()));
      CHECK(std::includes(sets[3].features.begin(), sets[3].features.end(), si.features.begin(),
                          si.features.end()));
      std::vector<Index> both;
      std::set_intersection(si.features.begin(), si.features.end(), sg.additional.features.begin(),
                            sg.additional.features.end(), std::back_inserter(both));
      CHECK(both.empty());
    }
  }
}

TEST_CASE("extract_sets") {
  LassoFit a, b;
  a.coefficients = SparseVector::from_dense(std::vector<double>{0, 1, 0, 2});
  b.coefficients = SparseVector::zeros(4);
  DslFit d;
  d.beta = SparseVector::from_dense(std::vector<double>{3, 0, 0, 1});
  d.deltas = {SparseVector::zeros(4), SparseVector::from_dense(std::vector<double>{0, 0, 1, 0})};
  d.group_names = {"x", "y"};
  d.r = {1, 1};
  const std::vector<LassoFit> sep{a, b};
  const auto s = extract_sets(sep, d);
  CHECK(s.per_group[0].features == std::vector<Index>{1, 3});
  CHECK(s.per_group[0].label == "x");
  CHECK(s.per_group[1].features.empty());
  CHECK(s.shared.features == std::vector<Index>{0, 3});

  LassoFit wrong;
  wrong.coefficients = SparseVector::zeros(5);
  const std::vector<LassoFit> bad{a, wrong};
  CHECK_THROWS(extract_sets(bad, d));
}

TEST_CASE("relative change") {
  CHECK(relative_change_pct(2.0, 2.0) == 0.0);
  CHECK(relative_change_pct(2.0, 2.5) == doctest::Approx(25.0));
  CHECK(relative_change_pct(4.0, 3.0) == doctest::Approx(-25.0));
}

TEST_CASE("removal effects") {
  SyntheticSpec spec;
  spec.group_sizes = {30, 30, 30};
  spec.n_features = 12;
  spec.density = 0.3;
  spec.seed = 21;
  const auto data = make_synthetic(spec);
  const WeightScheme scheme{};
  const auto r = compute_weights(scheme, data.train.group_sizes());
  const auto base = fit_dsl(data.train, r, scheme.name(), quick(), 3);
  const auto table = evaluate(base, data.test);

  SUBCASE("no removal reproduces the baseline exactly") {
    for (auto mode : {RemovalMode::Refit, RemovalMode::ZeroOnly}) {
      const auto row = removal_effect(data.train, data.test, scheme, {}, base, table, quick(), 3,
                                      RemovalSettings{mode, LambdaPolicy::Reselect});
      CHECK(row.all_pct == 0.0);
      for (double v : row.group_pct) CHECK(v == 0.0);
      CHECK(row.coef_removed == 0);
    }
  }
  SUBCASE("zeroing every active feature gives the intercept-only change") {
    std::set<Index> active(base.beta.indices.begin(), base.beta.indices.end());
    for (const auto& d : base.deltas) active.insert(d.indices.begin(), d.indices.end());
    const std::vector<Index> removed(active.begin(), active.end());
    const auto row = removal_effect(data.train, data.test, scheme, removed, base, table, quick(), 3,
                                    RemovalSettings{RemovalMode::ZeroOnly, LambdaPolicy::Reselect});
    LassoFit null;
    null.intercept = base.intercept;
    null.coefficients = SparseVector::zeros(12);
    const auto nt = evaluate(null, data.test);
    CHECK(row.all_pct == doctest::Approx(relative_change_pct(table.all, nt.all)));
    for (std::size_t g = 0; g < 3; ++g)
      CHECK(row.group_pct[g] == doctest::Approx(relative_change_pct(table.per_group[g], nt.per_group[g])));
    CHECK(row.coef_removed == removed.size());
  }
  SUBCASE("refit with a reused lambda keeps the baseline lambda") {
    const std::vector<Index> removed{base.beta.indices.empty() ? Index{0} : base.beta.indices[0]};
    const auto row = removal_effect(data.train, data.test, scheme, removed, base, table, quick(), 3,
                                    RemovalSettings{RemovalMode::Refit, LambdaPolicy::Reuse});
    CHECK(row.coef_removed == 1);
    CHECK(row.group_pct.size() == 3);
  }
}

TEST_CASE("full analysis rows") {
  SyntheticSpec spec;
  spec.group_sizes = {25, 25, 25};
  spec.n_features = 10;
  spec.density = 0.3;
  spec.seed = 8;
  const auto data = make_synthetic(spec);
  const auto a = analyze_subgroups(data.train, data.test, WeightScheme{}, quick(), 2);
  REQUIRE(a.rows.size() == 6);
  CHECK(a.rows[0].removal_type == "no removal");
  CHECK(a.rows[0].all_pct == 0.0);
  CHECK(a.rows[1].coef_removed == a.groups.all_intersection.features.size());
  CHECK(a.rows[5].coef_removed == a.groups.additional.features.size());
  for (const auto& row : a.rows) CHECK(row.penalty == a.penalty);
  const auto b = analyze_subgroups(data.train, data.test, WeightScheme{}, quick(), 2);
  for (std::size_t k = 0; k < a.rows.size(); ++k) CHECK(a.rows[k].all_pct == b.rows[k].all_pct);
}
