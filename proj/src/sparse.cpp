#include "shared_lasso/sparse.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "shared_lasso/error.hpp"

namespace shared_lasso {

SparseBinaryDesign::SparseBinaryDesign(std::size_t n_rows, std::size_t n_cols,
                                       std::vector<std::size_t> row_offsets,
                                       std::vector<Index> col_indices, std::vector<double> scales)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      scales_(std::move(scales)) {
  if (n_cols_ > std::numeric_limits<Index>::max() || n_rows_ > std::numeric_limits<Index>::max())
    throw StructuralError("design dimensions exceed 32-bit index range");
  if (row_offsets_.size() != n_rows_ + 1)
    throw StructuralError("row_offsets must have n_rows + 1 entries");
  if (row_offsets_.front() != 0 || row_offsets_.back() != col_indices_.size())
    throw StructuralError("row_offsets must start at 0 and end at the entry count");
  if (!scales_.empty() && scales_.size() != n_cols_)
    throw StructuralError("scales must have one entry per column");
  for (std::size_t i = 0; i < n_rows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1])
      throw StructuralError("row_offsets must be non-decreasing");
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] >= n_cols_)
        throw StructuralError("column id " + std::to_string(col_indices_[k]) +
                              " out of range in row " + std::to_string(i));
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
        throw StructuralError("column ids must be strictly increasing in row " +
                              std::to_string(i));
    }
  }
}

SparseBinaryDesign SparseBinaryDesign::from_rows(std::span<const std::vector<Index>> rows,
                                                 std::size_t n_cols) {
  std::vector<std::size_t> offsets{0};
  offsets.reserve(rows.size() + 1);
  std::vector<Index> cols;
  for (const auto& r : rows) {
    cols.insert(cols.end(), r.begin(), r.end());
    offsets.push_back(cols.size());
  }
  return SparseBinaryDesign(rows.size(), n_cols, std::move(offsets), std::move(cols));
}

std::vector<double> SparseBinaryDesign::scales() const {
  return scales_.empty() ? std::vector<double>(n_cols_, 1.0) : scales_;
}

SparseBinaryDesign SparseBinaryDesign::with_scales(std::vector<double> scales) const {
  if (!scales.empty() && scales.size() != n_cols_)
    throw StructuralError("scales must have one entry per column");
  SparseBinaryDesign out = *this;
  out.scales_ = std::move(scales);
  return out;
}

double SparseBinaryDesign::value(std::size_t i, std::size_t j) const {
  if (i >= n_rows_ || j >= n_cols_) throw StructuralError("entry index out of range");
  auto r = row(i);
  return std::binary_search(r.begin(), r.end(), static_cast<Index>(j)) ? scale(j) : 0.0;
}

std::vector<double> SparseBinaryDesign::transpose_dot(std::span<const double> v) const {
  if (v.size() != n_rows_)
    throw StructuralError("transpose_dot: vector length " + std::to_string(v.size()) +
                          " does not match row count " + std::to_string(n_rows_));
  std::vector<double> out(n_cols_, 0.0);
  for (std::size_t i = 0; i < n_rows_; ++i)
    for (Index j : row(i)) out[j] += v[i];
  if (!scales_.empty())
    for (std::size_t j = 0; j < n_cols_; ++j) out[j] *= scales_[j];
  return out;
}

std::vector<double> SparseBinaryDesign::dot(std::span<const double> beta) const {
  if (beta.size() != n_cols_)
    throw StructuralError("dot: coefficient length " + std::to_string(beta.size()) +
                          " does not match column count " + std::to_string(n_cols_));
  std::vector<double> out(n_rows_, 0.0);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    double s = 0.0;
    for (Index j : row(i)) s += scale(j) * beta[j];
    out[i] = s;
  }
  return out;
}

std::vector<std::size_t> SparseBinaryDesign::column_counts() const {
  std::vector<std::size_t> counts(n_cols_, 0);
  for (Index j : col_indices_) ++counts[j];
  return counts;
}

SparseBinaryDesign SparseBinaryDesign::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::size_t> offsets{0};
  offsets.reserve(rows.size() + 1);
  std::vector<Index> cols;
  for (std::size_t i : rows) {
    if (i >= n_rows_) throw StructuralError("select_rows: row id out of range");
    auto r = row(i);
    cols.insert(cols.end(), r.begin(), r.end());
    offsets.push_back(cols.size());
  }
  return SparseBinaryDesign(rows.size(), n_cols_, std::move(offsets), std::move(cols), scales_);
}

ColumnSlice column_slice(const SparseBinaryDesign& m, std::span<const Index> keep) {
  constexpr Index kDropped = std::numeric_limits<Index>::max();
  std::vector<Index> remap(m.cols(), kDropped);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] >= m.cols())
      throw StructuralError("column_slice: column id " + std::to_string(keep[k]) +
                            " out of range");
    if (remap[keep[k]] != kDropped)
      throw StructuralError("column_slice: duplicate column id " + std::to_string(keep[k]));
    remap[keep[k]] = static_cast<Index>(k);
  }
  const bool sorted = std::is_sorted(keep.begin(), keep.end());

  std::vector<std::size_t> offsets{0};
  offsets.reserve(m.rows() + 1);
  std::vector<Index> cols;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const std::size_t start = cols.size();
    for (Index j : m.row(i))
      if (remap[j] != kDropped) cols.push_back(remap[j]);
    if (!sorted) std::sort(cols.begin() + static_cast<std::ptrdiff_t>(start), cols.end());
    offsets.push_back(cols.size());
  }
  std::vector<double> scales;
  if (!m.has_unit_scales()) {
    scales.reserve(keep.size());
    for (Index j : keep) scales.push_back(m.scale(j));
  }
  return {SparseBinaryDesign(m.rows(), keep.size(), std::move(offsets), std::move(cols),
                             std::move(scales)),
          std::vector<Index>(keep.begin(), keep.end())};
}

ColumnIndex::ColumnIndex(const SparseBinaryDesign& m) : offsets_(m.cols() + 1, 0) {
  for (Index j : m.col_indices()) ++offsets_[j + 1];
  for (std::size_t j = 0; j < m.cols(); ++j) offsets_[j + 1] += offsets_[j];
  rows_.resize(m.nnz());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (Index j : m.row(i)) rows_[cursor[j]++] = static_cast<Index>(i);
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v{dense.size(), {}, {}};
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (dense[j] != 0.0) {
      v.indices.push_back(static_cast<Index>(j));
      v.values.push_back(dense[j]);
    }
  }
  return v;
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim, 0.0);
  for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] = values[k];
  return out;
}

double SparseVector::at(std::size_t j) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), static_cast<Index>(j));
  if (it == indices.end() || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

void write_sparse_text(std::ostream& out, const SparseBinaryDesign& m) {
  if (!m.has_unit_scales())
    throw StructuralError("the sparse text format stores binary designs only");
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    bool first = true;
    for (Index j : m.row(i)) {
      if (!first) out << ' ';
      out << j;
      first = false;
    }
    out << '\n';
  }
}

SparseBinaryDesign read_sparse_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("sparse text: missing header line");
  std::istringstream header(line);
  std::size_t n_rows = 0, n_cols = 0;
  if (!(header >> n_rows >> n_cols)) throw DataError("sparse text: malformed header '" + line + "'");

  std::vector<std::size_t> offsets{0};
  offsets.reserve(n_rows + 1);
  std::vector<Index> cols;
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (!std::getline(in, line))
      throw DataError("sparse text: expected " + std::to_string(n_rows) + " rows, found " +
                      std::to_string(i));
    std::istringstream ls(line);
    long long j = 0;
    while (ls >> j) {
      if (j < 0) throw DataError("sparse text: negative column id in row " + std::to_string(i));
      cols.push_back(static_cast<Index>(j));
    }
    if (!ls.eof()) throw DataError("sparse text: non-numeric token in row " + std::to_string(i));
    offsets.push_back(cols.size());
  }
  try {
    return SparseBinaryDesign(n_rows, n_cols, std::move(offsets), std::move(cols));
  } catch (const StructuralError& e) {
    throw DataError(std::string("sparse text: ") + e.what());
  }
}

}  // namespace shared_lasso
