#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace shared_lasso {

using Index = std::uint32_t;

/// Compressed sparse row storage for a binary design matrix.
///
/// Only the positions of nonzero entries are stored. The logical value of a
/// stored entry (i, j) is scale(j), which is 1 unless per-column scales were
/// attached; unstored entries are 0. Column ids within a row are strictly
/// increasing. Instances are immutable after construction.
class SparseBinaryDesign {
 public:
  SparseBinaryDesign() : row_offsets_{0} {}

  /// Validates and adopts raw CSR arrays. An empty `scales` means all ones.
  SparseBinaryDesign(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_offsets,
                     std::vector<Index> col_indices, std::vector<double> scales = {});

  /// Builds from one sorted column-id set per row.
  static SparseBinaryDesign from_rows(std::span<const std::vector<Index>> rows,
                                      std::size_t n_cols);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return col_indices_.size(); }

  std::span<const Index> row(std::size_t i) const {
    return {col_indices_.data() + row_offsets_[i], col_indices_.data() + row_offsets_[i + 1]};
  }
  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }

  bool has_unit_scales() const { return scales_.empty(); }
  double scale(std::size_t j) const { return scales_.empty() ? 1.0 : scales_[j]; }
  /// Per-column scales, materialized (length cols()).
  std::vector<double> scales() const;
  /// Same structure with new per-column scales (length cols(), or empty for ones).
  SparseBinaryDesign with_scales(std::vector<double> scales) const;

  /// Logical value of entry (i, j).
  double value(std::size_t i, std::size_t j) const;

  /// out[j] = sum over stored (i, j) of scale(j) * v[i].
  std::vector<double> transpose_dot(std::span<const double> v) const;
  /// out[i] = sum over stored (i, j) of scale(j) * beta[j].
  std::vector<double> dot(std::span<const double> beta) const;

  /// Number of stored entries per column (document frequency for text data).
  std::vector<std::size_t> column_counts() const;

  /// New matrix whose row k is row rows[k] of this one; repeats are allowed.
  SparseBinaryDesign select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const SparseBinaryDesign&, const SparseBinaryDesign&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<Index> col_indices_;
  std::vector<double> scales_;
};

/// Result of column_slice: the sliced matrix plus new-column -> old-column ids.
struct ColumnSlice {
  SparseBinaryDesign matrix;
  std::vector<Index> column_map;
};

/// Keeps the listed columns, renumbered in `keep` order. Duplicate or
/// out-of-range ids raise StructuralError. Scales follow their columns.
ColumnSlice column_slice(const SparseBinaryDesign& m, std::span<const Index> keep);

/// Column-major adjacency of a design, built once per solve.
class ColumnIndex {
 public:
  explicit ColumnIndex(const SparseBinaryDesign& m);

  std::span<const Index> rows_of(std::size_t j) const {
    return {rows_.data() + offsets_[j], rows_.data() + offsets_[j + 1]};
  }
  std::size_t count(std::size_t j) const { return offsets_[j + 1] - offsets_[j]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Index> rows_;
};

/// Sparse real vector with strictly increasing indices and nonzero values.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<Index> indices;
  std::vector<double> values;

  static SparseVector zeros(std::size_t dim) { return SparseVector{dim, {}, {}}; }
  static SparseVector from_dense(std::span<const double> dense);
  std::vector<double> to_dense() const;
  double at(std::size_t j) const;
  std::size_t nnz() const { return indices.size(); }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Plain-text sparse format: "n_rows n_cols" then one line of column ids per row.
void write_sparse_text(std::ostream& out, const SparseBinaryDesign& m);
SparseBinaryDesign read_sparse_text(std::istream& in);

}  // namespace shared_lasso
