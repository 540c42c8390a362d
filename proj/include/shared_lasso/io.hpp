#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "shared_lasso/corpus.hpp"
#include "shared_lasso/denoise.hpp"
#include "shared_lasso/dsl.hpp"
#include "shared_lasso/lasso.hpp"
#include "shared_lasso/resampling.hpp"
#include "shared_lasso/subgroups.hpp"

namespace shared_lasso::io {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal representation ("." separator, no locale).
std::string format_double(double v);

// Fit documents. Coefficients are [[index, value], ...] pairs and every
// lambda uses the per-n convention.
Json to_json(const SparseVector& v);
SparseVector sparse_from_json(const Json& j, std::size_t dim);
Json to_json(const LassoFit& fit);
LassoFit lasso_fit_from_json(const Json& j);
Json to_json(const DslFit& fit);
DslFit dsl_fit_from_json(const Json& j);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// A data directory: groups.txt, optional vocab.tsv, and train/ and test/
/// each holding design.txt and labels.csv (row,id,rating,group).
struct DataDir {
  GroupedDataset train;
  GroupedDataset test;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::string> tokens;  // empty when no vocabulary was written
  std::vector<std::size_t> doc_freq;
};

void write_split(const std::filesystem::path& dir, const GroupedDataset& ds,
                 const std::vector<std::string>& ids);
GroupedDataset read_split(const std::filesystem::path& dir,
                          const std::vector<std::string>& group_names,
                          std::vector<std::string>* ids = nullptr);
void write_vocab(const std::filesystem::path& path, const std::vector<std::string>& tokens,
                 const std::vector<std::size_t>& doc_freq);
void write_data_dir(const std::filesystem::path& dir, const DataDir& data);
DataDir read_data_dir(const std::filesystem::path& dir);
/// The data directory restricted to the given original feature ids.
DataDir slice_data_dir(const DataDir& data, const ReducedFeatureSet& set);

// Report emitters. All use LF line endings and a fixed column order.
void write_mse_header(std::ostream& out, const std::vector<std::string>& group_names);
void write_mse_row(std::ostream& out, const std::string& model, const std::string& weights,
                   const MseTable& t);
void write_stability_tsv(std::ostream& out, const std::vector<StabilityRecord>& records,
                         const std::vector<std::string>& labels);
void write_union(std::ostream& out, const ReducedFeatureSet& set);
void write_sweep_csv(std::ostream& out, const DenoiseSweep& sweep);
Json sweep_summary(const DenoiseSweep& sweep);
void write_removal_header(std::ostream& out, const std::vector<std::string>& group_names);
void write_removal_row(std::ostream& out, const RemovalRow& row);
Json venn_json(const Subgroups& s);

}  // namespace shared_lasso::io
