#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shared_lasso/lasso.hpp"
#include "shared_lasso/sparse.hpp"

namespace shared_lasso {

/// Rows of a binary design, their responses and a group label per row.
/// Group labels are 0-based indices into group_names.
struct GroupedDataset {
  SparseBinaryDesign X;
  std::vector<double> y;
  std::vector<std::uint32_t> groups;
  std::vector<std::string> group_names;

  std::size_t n_groups() const { return group_names.size(); }
  std::size_t n_features() const { return X.cols(); }
  std::vector<std::size_t> group_sizes() const;
  std::vector<std::size_t> rows_of_group(std::uint32_t g) const;
  GroupedDataset select_rows(std::span<const std::size_t> rows) const;
  /// Throws DataError on inconsistent lengths or out-of-range labels; with
  /// require_nonempty, also when some group has no rows.
  void validate(bool require_nonempty = true) const;
};

/// Collects non-fatal diagnostics (for example the separate-regression warning).
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

enum class WeightKind {
  SqrtThird,        // sqrt(1/3)
  SqrtShare,        // sqrt(n_g / N)
  SqrtLogRatioInv,  // sqrt(log N / log n_g)
  SizeRatioInv,     // N / n_g
  LogRatioInv,      // log N / log n_g
  LogRatio,         // log n_g / log N
  SqrtLogRatio,     // sqrt(log n_g / log N)
  SqrtMixed,        // sqrt((log n_g * N) / (log N * n_g))
  Custom,
};

/// Rule for the per-group penalty multipliers r_g on the group offsets.
struct WeightScheme {
  WeightKind kind = WeightKind::SqrtThird;
  std::vector<double> custom;

  /// Command-line name, e.g. "sqrt_share" or "custom:0.3,0.3,0.3".
  std::string name() const;
  /// Formula label used in reports, e.g. "sqrt(n_g/N)".
  std::string formula() const;
  /// Parses a name produced by name(). Throws ConfigError on unknown names.
  static WeightScheme parse(std::string_view text);
  /// The eight built-in schemes in reporting order.
  static std::vector<WeightScheme> builtin();
};

/// r_g for every group, natural logarithms. Warns through `diag` when the
/// weights sum to at most one (the separate-regression regime).
std::vector<double> compute_weights(const WeightScheme& scheme,
                                    std::span<const std::size_t> group_sizes,
                                    Diagnostics* diag = nullptr);

/// True when sum r_g <= 1, where the shared coefficients are forced to zero.
bool is_separate_regime(std::span<const double> r);

struct AugmentedColumn {
  std::uint32_t block;  // 0 = shared, g + 1 = offset of group g
  Index feature;
};

/// The stacked design Z = [X | blockdiag(X_1..X_G)] with one penalty factor
/// per column and the (block, feature) origin of every column.
struct AugmentedDesign {
  SparseBinaryDesign Z;
  std::vector<double> penalty_factors;
  std::vector<AugmentedColumn> column_map;
  std::size_t n_features = 0;
  std::size_t n_groups = 0;
};

/// Binary Z; offset block g carries penalty factor r_g.
AugmentedDesign build_augmented(const GroupedDataset& ds, std::span<const double> r);
/// Alternative construction: offset block g carries column scale 1/r_g and
/// every penalty factor is 1. Solves the same problem after unpacking.
AugmentedDesign build_scaled_augmented(const GroupedDataset& ds, std::span<const double> r);

struct DslFit {
  std::string scheme;
  std::vector<double> r;
  double lambda = 0.0;
  double intercept = 0.0;
  SparseVector beta;
  std::vector<SparseVector> deltas;
  std::vector<std::string> group_names;

  std::size_t n_features() const { return beta.dim; }
  /// beta + delta_g as a dense vector.
  std::vector<double> group_coefficients(std::size_t g) const;
};

/// Maps an augmented-lasso fit back to (beta, delta_1..delta_G). Column
/// scales are folded into the coefficients.
DslFit unpack(const AugmentedDesign& aug, const LassoFit& fit, std::span<const double> r);

/// Cross-validated DSL fit (group-stratified folds, one global lambda).
DslFit fit_dsl(const GroupedDataset& ds, const WeightScheme& scheme, const LassoOptions& opts,
               std::uint64_t seed, Diagnostics* diag = nullptr, CvResult* cv_out = nullptr);
DslFit fit_dsl(const GroupedDataset& ds, std::span<const double> r, const std::string& scheme_name,
               const LassoOptions& opts, std::uint64_t seed, CvResult* cv_out = nullptr);
/// DSL fit at a fixed lambda.
DslFit fit_dsl_at(const GroupedDataset& ds, std::span<const double> r,
                  const std::string& scheme_name, double lambda, const LassoOptions& opts);
/// DSL fits along the augmented problem's default lambda grid.
std::vector<DslFit> fit_dsl_path(const GroupedDataset& ds, std::span<const double> r,
                                 const std::string& scheme_name, const LassoOptions& opts);

/// One lasso on all rows, ignoring groups.
LassoFit fit_pooled(const GroupedDataset& ds, const LassoOptions& opts, std::uint64_t seed);
/// One cross-validated lasso per group. A single group reuses `seed` and so
/// reproduces fit_pooled exactly.
std::vector<LassoFit> fit_separate(const GroupedDataset& ds, const LassoOptions& opts,
                                   std::uint64_t seed);

std::vector<double> predict(const DslFit& fit, const GroupedDataset& ds);
std::vector<double> predict_separate(std::span<const LassoFit> fits, const GroupedDataset& ds);

/// Test-set MSE over all rows and per group.
struct MseTable {
  double all = 0.0;
  std::vector<double> per_group;
  std::vector<std::string> group_names;
};

MseTable mse_table(std::span<const double> pred, const GroupedDataset& ds);
MseTable evaluate(const DslFit& fit, const GroupedDataset& test);
MseTable evaluate(const LassoFit& pooled, const GroupedDataset& test);
MseTable evaluate(std::span<const LassoFit> separate, const GroupedDataset& test);

/// (1/(2N)) RSS + lambda (|beta|_1 + sum_g r_g |delta_g|_1).
double dsl_objective(const GroupedDataset& ds, const DslFit& fit);

}  // namespace shared_lasso
