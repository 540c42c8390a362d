#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "shared_lasso/dsl.hpp"
#include "shared_lasso/error.hpp"
#include "shared_lasso/synthetic.hpp"

using namespace shared_lasso;

namespace {

const std::vector<std::size_t> kImdbSizes{8286, 5027, 3073};

LassoOptions quick() {
  LassoOptions o;
  o.lambda_grid_size = 30;
  o.cv_folds = 5;
  return o;
}

GroupedDataset two_rows() {
  GroupedDataset ds;
  ds.X = SparseBinaryDesign::from_rows(std::vector<std::vector<Index>>{{0}, {0}}, 1);
  ds.y = {1.0, 2.0};
  ds.groups = {0, 1};
  ds.group_names = {"a", "b"};
  return ds;
}

}  // namespace

TEST_CASE("weight schemes on the reference group sizes") {
  const auto third = compute_weights(WeightScheme{WeightKind::SqrtThird, {}}, kImdbSizes);
  for (double v : third) CHECK(v == doctest::Approx(0.57735).epsilon(1e-5));

  const auto share = compute_weights(WeightScheme{WeightKind::SqrtShare, {}}, kImdbSizes);
  CHECK(std::abs(share[0] - 0.71111) <= 1e-4);
  CHECK(std::abs(share[1] - 0.55390) <= 1e-4);
  CHECK(std::abs(share[2] - 0.43306) <= 1e-4);

  const auto inv = compute_weights(WeightScheme{WeightKind::SqrtLogRatioInv, {}}, kImdbSizes);
  CHECK(std::abs(inv[0] - 1.03766) <= 1e-3);
  CHECK(std::abs(inv[1] - 1.06743) <= 1e-3);
  CHECK(std::abs(inv[2] - 1.09952) <= 1e-3);

  for (const auto& scheme : WeightScheme::builtin()) {
    const auto r = compute_weights(scheme, kImdbSizes);
    CHECK(std::accumulate(r.begin(), r.end(), 0.0) > 1.0);
  }
}

TEST_CASE("every built-in formula") {
  const std::vector<std::size_t> n{20, 30, 50};
  const double N = 100, lN = std::log(N);
  for (std::size_t g = 0; g < 3; ++g) {
    const double ng = static_cast<double>(n[g]), l = std::log(ng);
    auto r = [&](WeightKind k) { return compute_weights(WeightScheme{k, {}}, n)[g]; };
    CHECK(r(WeightKind::SizeRatioInv) == doctest::Approx(N / ng));
    CHECK(r(WeightKind::LogRatioInv) == doctest::Approx(lN / l));
    CHECK(r(WeightKind::LogRatio) == doctest::Approx(l / lN));
    CHECK(r(WeightKind::SqrtLogRatio) == doctest::Approx(std::sqrt(l / lN)));
    CHECK(r(WeightKind::SqrtMixed) == doctest::Approx(std::sqrt(l * N / (lN * ng))));
  }
  CHECK(WeightScheme::builtin().size() == 8);
}

TEST_CASE("weights are permutation equivariant") {
  const std::vector<std::size_t> n{7, 40, 13}, perm{13, 7, 40};
  for (const auto& scheme : WeightScheme::builtin()) {
    const auto a = compute_weights(scheme, n);
    const auto b = compute_weights(scheme, perm);
    CHECK(a[2] == b[0]);
    CHECK(a[0] == b[1]);
    CHECK(a[1] == b[2]);
  }
}

TEST_CASE("weight errors and warnings") {
  const std::vector<std::size_t> tiny{1, 5, 5};
  CHECK_THROWS_AS(compute_weights(WeightScheme{WeightKind::LogRatio, {}}, tiny), ConfigError);
  CHECK_NOTHROW(compute_weights(WeightScheme{WeightKind::SqrtShare, {}}, tiny));
  CHECK_THROWS_AS(compute_weights(WeightScheme{WeightKind::Custom, {0.5, 0.5}}, tiny), ConfigError);
  CHECK_THROWS_AS(compute_weights(WeightScheme{WeightKind::Custom, {0.5, -1, 1}}, tiny), ConfigError);

  Diagnostics diag;
  const auto r = compute_weights(WeightScheme{WeightKind::Custom, {0.3, 0.3, 0.3}}, tiny, &diag);
  CHECK(is_separate_regime(r));
  CHECK(diag.warnings.size() == 1);
  Diagnostics quiet;
  compute_weights(WeightScheme{WeightKind::SqrtThird, {}}, tiny, &quiet);
  CHECK(quiet.warnings.empty());
}

TEST_CASE("scheme names round trip") {
  for (const auto& s : WeightScheme::builtin()) CHECK(WeightScheme::parse(s.name()).kind == s.kind);
  const auto c = WeightScheme::parse("custom:0.3,0.25,1");
  CHECK(c.kind == WeightKind::Custom);
  CHECK(c.custom == std::vector<double>{0.3, 0.25, 1.0});
  CHECK(WeightScheme::parse(c.name()).custom == c.custom);
  CHECK_THROWS_AS(WeightScheme::parse("sqrt_fourth"), ConfigError);
  CHECK_THROWS_AS(WeightScheme::parse("custom:"), ConfigError);
  CHECK_THROWS_AS(WeightScheme::parse("custom:1,x"), ConfigError);
}

TEST_CASE("augmented design") {
  SUBCASE("single group is [X | X] with unit factors") {
    auto ds = fixtures::random_grouped({6}, 3, 2);
    const auto aug = build_augmented(ds, std::vector<double>{1.0});
    CHECK(aug.Z.cols() == 6);
    CHECK(aug.penalty_factors == std::vector<double>(6, 1.0));
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(aug.Z.value(i, j) == ds.X.value(i, j));
        CHECK(aug.Z.value(i, 3 + j) == ds.X.value(i, j));
      }
  }
  SUBCASE("two one-row groups") {
    const auto aug = build_augmented(two_rows(), std::vector<double>{0.7, 0.4});
    CHECK(aug.Z == SparseBinaryDesign::from_rows(
                       std::vector<std::vector<Index>>{{0, 1}, {0, 2}}, 3));
    CHECK(aug.penalty_factors == std::vector<double>{1.0, 0.7, 0.4});
    CHECK(aug.column_map[2].block == 2);
    CHECK(aug.column_map[2].feature == 0);
  }
  SUBCASE("column count is p (G + 1)") {
    auto ds = fixtures::random_grouped({3, 4, 5}, 7, 3);
    const auto aug = build_augmented(ds, std::vector<double>{1, 1, 1});
    CHECK(aug.Z.cols() == 28);
    CHECK(aug.Z.rows() == 12);
    CHECK(aug.Z.nnz() == 2 * ds.X.nnz());
  }
  SUBCASE("scaled construction carries 1/r_g scales") {
    const auto aug = build_scaled_augmented(two_rows(), std::vector<double>{0.5, 0.25});
    CHECK(aug.penalty_factors == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(aug.Z.value(0, 1) == 2.0);
    CHECK(aug.Z.value(1, 2) == 4.0);
  }
}

TEST_CASE("penalty-factor and scaled-block constructions agree") {
  auto ds = fixtures::random_grouped({6, 6}, 4, 77, 0.5);
  const std::vector<double> r{0.8, 0.6};
  LassoOptions o;
  o.tolerance = 1e-12;
  o.max_iterations = 200000;
  o.lambda_grid_size = 20;
  const auto pf = build_augmented(ds, r);
  const auto sc = build_scaled_augmented(ds, r);
  const auto a = fit_path(pf.Z, ds.y, pf.penalty_factors, o);
  const auto b = fit_path(sc.Z, ds.y, sc.penalty_factors, o, a.lambdas);
  for (std::size_t k = 0; k < a.fits.size(); ++k) {
    const auto ua = unpack(pf, a.fits[k], r);
    const auto ub = unpack(sc, b.fits[k], r);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(std::abs(ua.beta.at(j) - ub.beta.at(j)) <= 1e-8);
      for (std::size_t g = 0; g < 2; ++g)
        CHECK(std::abs(ua.deltas[g].at(j) - ub.deltas[g].at(j)) <= 1e-8);
    }
  }
}

TEST_CASE("weights below one in total force the shared part to zero") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto ds = fixtures::random_grouped({10, 10, 10}, 8, 40 + seed);
    const std::vector<double> r{0.3, 0.3, 0.3};
    for (const auto& f : fit_dsl_path(ds, r, "custom", quick())) CHECK(f.beta.nnz() == 0);
  }
}

TEST_CASE("fit_dsl") {
  SUBCASE("zero response") {
    auto ds = fixtures::random_grouped({15, 15}, 5, 8);
    std::fill(ds.y.begin(), ds.y.end(), 0.0);
    const auto f = fit_dsl(ds, WeightScheme{}, quick(), 1);
    CHECK(f.beta.nnz() == 0);
    for (const auto& d : f.deltas) CHECK(d.nnz() == 0);
    CHECK(f.intercept == 0.0);
  }
  SUBCASE("single group predicts like a plain lasso at matched lambda") {
    auto ds = fixtures::random_grouped({30}, 6, 9);
    LassoOptions o = quick();
    o.tolerance = 1e-12;
    o.max_iterations = 200000;
    const double lam = 0.05;
    const auto d = fit_dsl_at(ds, std::vector<double>{1.0}, "custom", lam, o);
    const auto plain = fit(ds.X, ds.y, lam, {}, o);
    const auto pd = predict(d, ds);
    const auto pp = predict(plain, ds.X);
    for (std::size_t i = 0; i < pd.size(); ++i) CHECK(std::abs(pd[i] - pp[i]) <= 1e-6);
  }
  SUBCASE("objective no worse than embedded separate solutions") {
    SyntheticSpec spec;
    spec.group_sizes = {40, 40, 40};
    spec.n_features = 15;
    spec.seed = 3;
    const auto data = make_synthetic(spec);
    const auto r = compute_weights(WeightScheme{}, data.train.group_sizes());
    const auto f = fit_dsl(data.train, r, "sqrt_third", quick(), 4);
    const auto separate = fit_separate(data.train, quick(), 5);
    DslFit embedded = f;
    embedded.beta = SparseVector::zeros(15);
    for (std::size_t g = 0; g < 3; ++g) embedded.deltas[g] = separate[g].coefficients;
    // The embedded point needs its own best intercept to be a fair comparison.
    double shift = 0.0;
    const auto pred = predict(embedded, data.train);
    for (std::size_t i = 0; i < pred.size(); ++i) shift += data.train.y[i] - pred[i];
    embedded.intercept += shift / static_cast<double>(pred.size());
    CHECK(dsl_objective(data.train, f) <= dsl_objective(data.train, embedded) + 1e-9);
  }
  SUBCASE("cv result is reported") {
    auto ds = fixtures::random_grouped({15, 15}, 5, 8);
    CvResult cv;
    const auto f = fit_dsl(ds, compute_weights(WeightScheme{}, ds.group_sizes()), "sqrt_third",
                           quick(), 1, &cv);
    CHECK(f.lambda == cv.lambda_min);
    CHECK(cv.lambdas.size() == 30);
  }
}

TEST_CASE("pooled and separate baselines") {
  SUBCASE("single group: pooled and separate coincide") {
    auto ds = fixtures::random_grouped({30}, 6, 12);
    const auto pooled = fit_pooled(ds, quick(), 5);
    const auto separate = fit_separate(ds, quick(), 5);
    REQUIRE(separate.size() == 1);
    CHECK(evaluate(pooled, ds).all == doctest::Approx(evaluate(separate, ds).all));
  }
  SUBCASE("constant response gives an intercept-only pooled fit") {
    auto ds = fixtures::random_grouped({12, 12}, 6, 12);
    std::fill(ds.y.begin(), ds.y.end(), 3.5);
    const auto pooled = fit_pooled(ds, quick(), 5);
    CHECK(pooled.coefficients.nnz() == 0);
    CHECK(pooled.intercept == doctest::Approx(3.5));
  }
  SUBCASE("small group is named in the error") {
    auto ds = fixtures::random_grouped({30, 3}, 4, 1);
    try {
      fit_separate(ds, quick(), 1);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("g2") != std::string::npos);
    }
  }
  SUBCASE("separate fits do not depend on thread count") {
    auto ds = fixtures::random_grouped({20, 20, 20}, 6, 13);
    LassoOptions one = quick(), many = quick();
    many.threads = 3;
    const auto a = fit_separate(ds, one, 9);
    const auto b = fit_separate(ds, many, 9);
    for (std::size_t g = 0; g < 3; ++g) CHECK(a[g].coefficients == b[g].coefficients);
  }
}

TEST_CASE("evaluation") {
  auto ds = fixtures::random_grouped({5, 7}, 4, 14);
  SUBCASE("perfect fit") {
    DslFit f;
    f.r = {1, 1};
    f.group_names = ds.group_names;
    f.beta = SparseVector::from_dense(std::vector<double>{1, -1, 0.5, 0});
    f.deltas = {SparseVector::from_dense(std::vector<double>{0, 0, 0, 2}), SparseVector::zeros(4)};
    f.intercept = 0.25;
    ds.y = predict(f, ds);
    const auto t = evaluate(f, ds);
    CHECK(t.all == 0.0);
    CHECK(t.per_group == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("intercept only") {
    LassoFit f;
    f.intercept = 1.0;
    f.coefficients = SparseVector::zeros(4);
    const auto t = evaluate(f, ds);
    for (std::uint32_t g = 0; g < 2; ++g) {
      double s = 0.0;
      const auto rows = ds.rows_of_group(g);
      for (auto i : rows) s += (ds.y[i] - 1.0) * (ds.y[i] - 1.0);
      CHECK(t.per_group[g] == doctest::Approx(s / rows.size()));
    }
    CHECK(t.group_names == ds.group_names);
  }
  SUBCASE("only beta + delta_g matters") {
    DslFit f;
    f.r = {1, 1};
    f.group_names = ds.group_names;
    f.beta = SparseVector::from_dense(std::vector<double>{1, 0, 0.5, 0});
    f.deltas = {SparseVector::from_dense(std::vector<double>{0, 1, 0, 0}),
                SparseVector::from_dense(std::vector<double>{0, 0, -1, 0})};
    const auto before = evaluate(f, ds);
    const std::vector<double> v{0.3, -2, 1, 4};
    DslFit moved = f;
    auto b = f.beta.to_dense();
    for (std::size_t j = 0; j < 4; ++j) b[j] += v[j];
    moved.beta = SparseVector::from_dense(b);
    for (std::size_t g = 0; g < 2; ++g) {
      auto d = f.deltas[g].to_dense();
      for (std::size_t j = 0; j < 4; ++j) d[j] -= v[j];
      moved.deltas[g] = SparseVector::from_dense(d);
    }
    const auto after = evaluate(moved, ds);
    CHECK(after.all == doctest::Approx(before.all).epsilon(1e-12));
    CHECK(after.per_group[0] == doctest::Approx(before.per_group[0]).epsilon(1e-12));
  }
  SUBCASE("unknown group id") {
    ds.groups[0] = 5;
    LassoFit f;
    f.coefficients = SparseVector::zeros(4);
    CHECK_THROWS_AS(evaluate(f, ds), DataError);
  }
}
