#include "shared_lasso/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "shared_lasso/parallel.hpp"
#include "shared_lasso/rng.hpp"

namespace shared_lasso {

std::vector<std::size_t> GroupedDataset::group_sizes() const {
  std::vector<std::size_t> sizes(n_groups(), 0);
  for (auto g : groups) {
    if (g >= sizes.size()) throw DataError("group label " + std::to_string(g) + " out of range");
    ++sizes[g];
  }
  return sizes;
}

std::vector<std::size_t> GroupedDataset::rows_of_group(std::uint32_t g) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i] == g) rows.push_back(i);
  return rows;
}

GroupedDataset GroupedDataset::select_rows(std::span<const std::size_t> rows) const {
  GroupedDataset out;
  out.X = X.select_rows(rows);
  out.group_names = group_names;
  out.y.reserve(rows.size());
  out.groups.reserve(rows.size());
  for (std::size_t i : rows) {
    out.y.push_back(y[i]);
    out.groups.push_back(groups[i]);
  }
  return out;
}

void GroupedDataset::validate(bool require_nonempty) const {
  if (y.size() != X.rows() || groups.size() != X.rows())
    throw DataError("dataset has " + std::to_string(X.rows()) + " rows but " +
                    std::to_string(y.size()) + " responses and " + std::to_string(groups.size()) +
                    " group labels");
  if (group_names.empty()) throw DataError("dataset declares no groups");
  const auto sizes = group_sizes();
  if (require_nonempty)
    for (std::size_t g = 0; g < sizes.size(); ++g)
      if (sizes[g] == 0) throw DataError("group '" + group_names[g] + "' has no rows");
}

std::string WeightScheme::name() const {
  switch (kind) {
    case WeightKind::SqrtThird: return "sqrt_third";
    case WeightKind::SqrtShare: return "sqrt_share";
    case WeightKind::SqrtLogRatioInv: return "sqrt_log_ratio_inv";
    case WeightKind::SizeRatioInv: return "size_ratio_inv";
    case WeightKind::LogRatioInv: return "log_ratio_inv";
    case WeightKind::LogRatio: return "log_ratio";
    case WeightKind::SqrtLogRatio: return "sqrt_log_ratio";
    case WeightKind::SqrtMixed: return "sqrt_mixed";
    case WeightKind::Custom: {
      std::string s = "custom:";
      for (std::size_t g = 0; g < custom.size(); ++g) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, custom[g]);
        if (g) s += ',';
        s.append(buf, res.ptr);
      }
      return s;
    }
  }
  return "unknown";
}

std::string WeightScheme::formula() const {
  switch (kind) {
    case WeightKind::SqrtThird: return "sqrt(1/3)";
    case WeightKind::SqrtShare: return "sqrt(n_g/N)";
    case WeightKind::SqrtLogRatioInv: return "sqrt(logN/log n_g)";
    case WeightKind::SizeRatioInv: return "N/n_g";
    case WeightKind::LogRatioInv: return "logN/log n_g";
    case WeightKind::LogRatio: return "log n_g/logN";
    case WeightKind::SqrtLogRatio: return "sqrt(log n_g/logN)";
    case WeightKind::SqrtMixed: return "sqrt((log n_g*N)/(logN*n_g))";
    case WeightKind::Custom: return name();
  }
  return "unknown";
}

std::vector<WeightScheme> WeightScheme::builtin() {
  return {{WeightKind::SqrtThird, {}},    {WeightKind::SqrtShare, {}},
          {WeightKind::SqrtLogRatioInv, {}}, {WeightKind::SizeRatioInv, {}},
          {WeightKind::LogRatioInv, {}},  {WeightKind::LogRatio, {}},
          {WeightKind::SqrtLogRatio, {}}, {WeightKind::SqrtMixed, {}}};
}

WeightScheme WeightScheme::parse(std::string_view text) {
  for (const auto& s : builtin())
    if (s.name() == text) return s;
  constexpr std::string_view prefix = "custom:";
  if (text.substr(0, prefix.size()) == prefix) {
    WeightScheme s{WeightKind::Custom, {}};
    std::string_view rest = text.substr(prefix.size());
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      double v = 0.0;
      auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
        throw ConfigError("invalid custom weight '" + std::string(item) + "'");
      s.custom.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (s.custom.empty()) throw ConfigError("custom weights need at least one value");
    return s;
  }
  throw ConfigError("unknown weight scheme '" + std::string(text) + "'");
}

bool is_separate_regime(std::span<const double> r) {
  return std::accumulate(r.begin(), r.end(), 0.0) <= 1.0;
}

std::vector<double> compute_weights(const WeightScheme& scheme,
                                    std::span<const std::size_t> group_sizes, Diagnostics* diag) {
  const std::size_t G = group_sizes.size();
  std::vector<double> r(G);
  if (scheme.kind == WeightKind::Custom) {
    if (scheme.custom.size() != G)
      throw ConfigError("custom weights list " + std::to_string(scheme.custom.size()) +
                        " values for " + std::to_string(G) + " groups");
    r = scheme.custom;
  } else {
    if (G < 2) throw ConfigError("weight scheme " + scheme.name() + " needs at least two groups");
    const bool uses_logs = scheme.kind != WeightKind::SqrtThird &&
                           scheme.kind != WeightKind::SqrtShare &&
                           scheme.kind != WeightKind::SizeRatioInv;
    double N = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
      if (group_sizes[g] == 0) throw ConfigError("group " + std::to_string(g) + " is empty");
      if (uses_logs && group_sizes[g] < 2)
        throw ConfigError("weight scheme " + scheme.name() + " needs every group size >= 2");
      N += static_cast<double>(group_sizes[g]);
    }
    const double logN = std::log(N);
    for (std::size_t g = 0; g < G; ++g) {
      const double n = static_cast<double>(group_sizes[g]);
      const double logn = std::log(n);
      switch (scheme.kind) {
        case WeightKind::SqrtThird: r[g] = std::sqrt(1.0 / 3.0); break;
        case WeightKind::SqrtShare: r[g] = std::sqrt(n / N); break;
        case WeightKind::SqrtLogRatioInv: r[g] = std::sqrt(logN / logn); break;
        case WeightKind::SizeRatioInv: r[g] = N / n; break;
        case WeightKind::LogRatioInv: r[g] = logN / logn; break;
        case WeightKind::LogRatio: r[g] = logn / logN; break;
        case WeightKind::SqrtLogRatio: r[g] = std::sqrt(logn / logN); break;
        case WeightKind::SqrtMixed: r[g] = std::sqrt((logn * N) / (logN * n)); break;
        case WeightKind::Custom: break;
      }
    }
  }
  for (double v : r)
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError("group weights must be finite and positive");
  if (diag && is_separate_regime(r))
    diag->warn("group weights sum to " + std::to_string(std::accumulate(r.begin(), r.end(), 0.0)) +
               " <= 1: the shared coefficients vanish and the fit is equivalent to separate "
               "regressions");
  return r;
}

namespace {

AugmentedDesign augment(const GroupedDataset& ds, std::span<const double> r, bool scaled) {
  ds.validate(false);
  const std::size_t p = ds.n_features();
  const std::size_t G = ds.n_groups();
  if (r.size() != G)
    throw StructuralError("expected " + std::to_string(G) + " group weights, got " +
                          std::to_string(r.size()));
  AugmentedDesign aug;
  aug.n_features = p;
  aug.n_groups = G;
  const std::size_t width = p * (G + 1);

  std::vector<std::size_t> offsets{0};
  offsets.reserve(ds.X.rows() + 1);
  std::vector<Index> cols;
  cols.reserve(2 * ds.X.nnz());
  for (std::size_t i = 0; i < ds.X.rows(); ++i) {
    const auto row = ds.X.row(i);
    cols.insert(cols.end(), row.begin(), row.end());
    const std::size_t base = p * (ds.groups[i] + 1);
    for (Index j : row) cols.push_back(static_cast<Index>(base + j));
    offsets.push_back(cols.size());
  }

  std::vector<double> scales;
  aug.penalty_factors.assign(width, 1.0);
  if (scaled) {
    scales.assign(width, 1.0);
    for (std::size_t g = 0; g < G; ++g)
      std::fill_n(scales.begin() + static_cast<std::ptrdiff_t>(p * (g + 1)), p, 1.0 / r[g]);
  } else {
    for (std::size_t g = 0; g < G; ++g)
      std::fill_n(aug.penalty_factors.begin() + static_cast<std::ptrdiff_t>(p * (g + 1)), p, r[g]);
  }
  if (!ds.X.has_unit_scales()) {
    if (scales.empty()) scales.assign(width, 1.0);
    for (std::size_t b = 0; b <= G; ++b)
      for (std::size_t j = 0; j < p; ++j) scales[b * p + j] *= ds.X.scale(j);
  }
  aug.Z = SparseBinaryDesign(ds.X.rows(), width, std::move(offsets), std::move(cols),
                             std::move(scales));
  aug.column_map.reserve(width);
  for (std::size_t b = 0; b <= G; ++b)
    for (std::size_t j = 0; j < p; ++j)
      aug.column_map.push_back({static_cast<std::uint32_t>(b), static_cast<Index>(j)});
  return aug;
}

std::vector<std::uint32_t> dsl_folds(const GroupedDataset& ds, const LassoOptions& opts,
                                     std::uint64_t seed) {
  return stratified_folds(ds.groups, opts.cv_folds, seed);
}

}  // namespace

AugmentedDesign build_augmented(const GroupedDataset& ds, std::span<const double> r) {
  return augment(ds, r, false);
}

AugmentedDesign build_scaled_augmented(const GroupedDataset& ds, std::span<const double> r) {
  return augment(ds, r, true);
}

std::vector<double> DslFit::group_coefficients(std::size_t g) const {
  auto out = beta.to_dense();
  for (std::size_t k = 0; k < deltas[g].nnz(); ++k) out[deltas[g].indices[k]] += deltas[g].values[k];
  return out;
}

DslFit unpack(const AugmentedDesign& aug, const LassoFit& fit, std::span<const double> r) {
  const std::size_t p = aug.n_features;
  const std::size_t G = aug.n_groups;
  if (fit.coefficients.dim != p * (G + 1))
    throw StructuralError("augmented fit has the wrong number of coefficients");
  std::vector<std::vector<double>> blocks(G + 1, std::vector<double>(p, 0.0));
  for (std::size_t k = 0; k < fit.coefficients.nnz(); ++k) {
    const Index col = fit.coefficients.indices[k];
    const auto origin = aug.column_map[col];
    blocks[origin.block][origin.feature] = aug.Z.scale(col) * fit.coefficients.values[k];
  }
  DslFit out;
  out.r.assign(r.begin(), r.end());
  out.lambda = fit.lambda;
  out.intercept = fit.intercept;
  out.beta = SparseVector::from_dense(blocks[0]);
  for (std::size_t g = 0; g < G; ++g) out.deltas.push_back(SparseVector::from_dense(blocks[g + 1]));
  return out;
}

DslFit fit_dsl(const GroupedDataset& ds, std::span<const double> r, const std::string& scheme_name,
               const LassoOptions& opts, std::uint64_t seed, CvResult* cv_out) {
  ds.validate();
  const auto aug = build_augmented(ds, r);
  const auto folds = dsl_folds(ds, opts, seed);
  auto result = cv_fit(aug.Z, ds.y, aug.penalty_factors, opts, seed, folds);
  DslFit out = unpack(aug, result.fit, r);
  out.scheme = scheme_name;
  out.group_names = ds.group_names;
  if (cv_out) *cv_out = std::move(result.cv);
  return out;
}

DslFit fit_dsl(const GroupedDataset& ds, const WeightScheme& scheme, const LassoOptions& opts,
               std::uint64_t seed, Diagnostics* diag, CvResult* cv_out) {
  ds.validate();
  const auto r = compute_weights(scheme, ds.group_sizes(), diag);
  return fit_dsl(ds, r, scheme.name(), opts, seed, cv_out);
}

DslFit fit_dsl_at(const GroupedDataset& ds, std::span<const double> r,
                  const std::string& scheme_name, double lambda, const LassoOptions& opts) {
  ds.validate();
  const auto aug = build_augmented(ds, r);
  DslFit out =
      unpack(aug, fit(aug.Z, ds.y, lambda, aug.penalty_factors, opts), r);
  out.scheme = scheme_name;
  out.group_names = ds.group_names;
  return out;
}

std::vector<DslFit> fit_dsl_path(const GroupedDataset& ds, std::span<const double> r,
                                 const std::string& scheme_name, const LassoOptions& opts) {
  ds.validate();
  const auto aug = build_augmented(ds, r);
  const auto path = fit_path(aug.Z, ds.y, aug.penalty_factors, opts);
  std::vector<DslFit> out;
  out.reserve(path.fits.size());
  for (const auto& f : path.fits) {
    out.push_back(unpack(aug, f, r));
    out.back().scheme = scheme_name;
    out.back().group_names = ds.group_names;
  }
  return out;
}

LassoFit fit_pooled(const GroupedDataset& ds, const LassoOptions& opts, std::uint64_t seed) {
  ds.validate();
  return cv_fit(ds.X, ds.y, {}, opts, seed).fit;
}

std::vector<LassoFit> fit_separate(const GroupedDataset& ds, const LassoOptions& opts,
                                   std::uint64_t seed) {
  ds.validate();
  const auto sizes = ds.group_sizes();
  for (std::size_t g = 0; g < ds.n_groups(); ++g)
    if (sizes[g] < opts.cv_folds)
      throw ConfigError("group '" + ds.group_names[g] + "' has " + std::to_string(sizes[g]) +
                        " rows, fewer than the " + std::to_string(opts.cv_folds) + " CV folds");
  const std::size_t workers = std::min(resolve_threads(opts.threads), ds.n_groups());
  LassoOptions inner = opts;
  inner.threads = std::max<std::size_t>(1, resolve_threads(opts.threads) / std::max<std::size_t>(workers, 1));
  std::vector<LassoFit> fits(ds.n_groups());
  parallel_for(ds.n_groups(), workers, [&](std::size_t g) {
    const auto sub = ds.select_rows(ds.rows_of_group(static_cast<std::uint32_t>(g)));
    const auto fold_seed = ds.n_groups() == 1 ? seed : derive_seed(seed, {g});
    fits[g] = cv_fit(sub.X, sub.y, {}, inner, fold_seed).fit;
  });
  return fits;
}

std::vector<double> predict(const DslFit& fit, const GroupedDataset& ds) {
  if (fit.n_features() != ds.n_features())
    throw StructuralError("model has " + std::to_string(fit.n_features()) +
                          " features, data has " + std::to_string(ds.n_features()));
  std::vector<std::vector<double>> coef;
  for (std::size_t g = 0; g < fit.deltas.size(); ++g) coef.push_back(fit.group_coefficients(g));
  std::vector<double> pred(ds.X.rows());
  for (std::size_t i = 0; i < ds.X.rows(); ++i) {
    const auto g = ds.groups[i];
    if (g >= coef.size()) throw DataError("row " + std::to_string(i) + " has an unknown group");
    double s = 0.0;
    for (Index j : ds.X.row(i)) s += ds.X.scale(j) * coef[g][j];
    pred[i] = fit.intercept + s;
  }
  return pred;
}

std::vector<double> predict_separate(std::span<const LassoFit> fits, const GroupedDataset& ds) {
  std::vector<double> pred(ds.X.rows());
  std::vector<std::vector<double>> coef;
  for (const auto& f : fits) {
    if (f.coefficients.dim != ds.n_features())
      throw StructuralError("separate model feature count does not match data");
    coef.push_back(f.coefficients.to_dense());
  }
  for (std::size_t i = 0; i < ds.X.rows(); ++i) {
    const auto g = ds.groups[i];
    if (g >= fits.size()) throw DataError("row " + std::to_string(i) + " has an unknown group");
    double s = 0.0;
    for (Index j : ds.X.row(i)) s += ds.X.scale(j) * coef[g][j];
    pred[i] = fits[g].intercept + s;
  }
  return pred;
}

MseTable mse_table(std::span<const double> pred, const GroupedDataset& ds) {
  ds.validate(false);
  MseTable t;
  t.group_names = ds.group_names;
  t.all = mse(pred, ds.y);
  std::vector<double> ss(ds.n_groups(), 0.0);
  std::vector<std::size_t> count(ds.n_groups(), 0);
  for (std::size_t i = 0; i < ds.y.size(); ++i) {
    const double d = pred[i] - ds.y[i];
    ss[ds.groups[i]] += d * d;
    ++count[ds.groups[i]];
  }
  for (std::size_t g = 0; g < ss.size(); ++g)
    t.per_group.push_back(count[g] ? ss[g] / static_cast<double>(count[g]) : std::nan(""));
  return t;
}

MseTable evaluate(const DslFit& fit, const GroupedDataset& test) {
  if (test.n_groups() != fit.deltas.size())
    throw DataError("test data has " + std::to_string(test.n_groups()) + " groups, model has " +
                    std::to_string(fit.deltas.size()));
  return mse_table(predict(fit, test), test);
}

MseTable evaluate(const LassoFit& pooled, const GroupedDataset& test) {
  return mse_table(predict(pooled, test.X), test);
}

MseTable evaluate(std::span<const LassoFit> separate, const GroupedDataset& test) {
  if (test.n_groups() != separate.size())
    throw DataError("test data has " + std::to_string(test.n_groups()) + " groups, " +
                    std::to_string(separate.size()) + " separate models given");
  return mse_table(predict_separate(separate, test), test);
}

double dsl_objective(const GroupedDataset& ds, const DslFit& fit) {
  const auto pred = predict(fit, ds);
  double rss = 0.0;
  for (std::size_t i = 0; i < ds.y.size(); ++i) rss += (ds.y[i] - pred[i]) * (ds.y[i] - pred[i]);
  double pen = 0.0;
  for (double v : fit.beta.values) pen += std::abs(v);
  for (std::size_t g = 0; g < fit.deltas.size(); ++g)
    for (double v : fit.deltas[g].values) pen += fit.r[g] * std::abs(v);
  return rss / (2.0 * static_cast<double>(ds.y.size())) + fit.lambda * pen;
}

}  // namespace shared_lasso
