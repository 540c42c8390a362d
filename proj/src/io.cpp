#include "shared_lasso/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "shared_lasso/error.hpp"

namespace shared_lasso::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const SparseVector& v) {
  Json pairs = Json::array();
  for (std::size_t k = 0; k < v.nnz(); ++k) pairs.push_back(Json::array({v.indices[k], v.values[k]}));
  return pairs;
}

SparseVector sparse_from_json(const Json& j, std::size_t dim) {
  std::vector<double> dense(dim, 0.0);
  for (const auto& pair : j) {
    const auto idx = pair.at(0).get<std::size_t>();
    if (idx >= dim) throw DataError("coefficient index " + std::to_string(idx) + " out of range");
    dense[idx] = pair.at(1).get<double>();
  }
  return SparseVector::from_dense(dense);
}

Json to_json(const LassoFit& fit) {
  Json j;
  j["lambda"] = fit.lambda;
  j["intercept"] = fit.intercept;
  j["coef"] = to_json(fit.coefficients);
  j["penalty_convention"] = "per-n";
  j["n_features"] = fit.coefficients.dim;
  return j;
}

LassoFit lasso_fit_from_json(const Json& j) {
  try {
    LassoFit f;
    f.lambda = j.at("lambda").get<double>();
    f.intercept = j.at("intercept").get<double>();
    const auto dim = j.at("n_features").get<std::size_t>();
    f.coefficients = sparse_from_json(j.at("coef"), dim);
    if (j.value("penalty_convention", "per-n") != "per-n")
      throw DataError("unsupported penalty convention");
    return f;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed lasso fit document: ") + e.what());
  }
}

Json to_json(const DslFit& fit) {
  Json j;
  j["scheme"] = fit.scheme;
  j["r"] = fit.r;
  j["lambda"] = fit.lambda;
  j["intercept"] = fit.intercept;
  j["beta"] = to_json(fit.beta);
  Json delta = Json::object();
  for (std::size_t g = 0; g < fit.deltas.size(); ++g) delta[fit.group_names.at(g)] = to_json(fit.deltas[g]);
  j["delta"] = delta;
  j["penalty_convention"] = "per-n";
  j["n_features"] = fit.beta.dim;
  return j;
}

DslFit dsl_fit_from_json(const Json& j) {
  try {
    DslFit f;
    f.scheme = j.at("scheme").get<std::string>();
    f.r = j.at("r").get<std::vector<double>>();
    f.lambda = j.at("lambda").get<double>();
    f.intercept = j.at("intercept").get<double>();
    const auto dim = j.at("n_features").get<std::size_t>();
    f.beta = sparse_from_json(j.at("beta"), dim);
    for (const auto& [name, pairs] : j.at("delta").items()) {
      f.group_names.push_back(name);
      f.deltas.push_back(sparse_from_json(pairs, dim));
    }
    if (f.r.size() != f.deltas.size()) throw DataError("weights and offsets disagree in length");
    return f;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed DSL fit document: ") + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_split(const fs::path& dir, const GroupedDataset& ds, const std::vector<std::string>& ids) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "design.txt");
    write_sparse_text(out, ds.X);
  }
  auto out = open_out(dir / "labels.csv");
  out << "row,id,rating,group\n";
  for (std::size_t i = 0; i < ds.y.size(); ++i)
    out << i << ',' << (i < ids.size() ? ids[i] : std::to_string(i)) << ','
        << format_double(ds.y[i]) << ',' << ds.group_names.at(ds.groups[i]) << '\n';
}

GroupedDataset read_split(const fs::path& dir, const std::vector<std::string>& group_names,
                          std::vector<std::string>* ids) {
  GroupedDataset ds;
  ds.group_names = group_names;
  {
    std::ifstream in(dir / "design.txt");
    if (!in) throw DataError("cannot read " + (dir / "design.txt").string());
    ds.X = read_sparse_text(in);
  }
  std::ifstream in(dir / "labels.csv");
  if (!in) throw DataError("cannot read " + (dir / "labels.csv").string());
  std::string line;
  std::getline(in, line);
  if (line != "row,id,rating,group")
    throw DataError((dir / "labels.csv").string() + ": unexpected header '" + line + "'");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    auto where = [&] { return (dir / "labels.csv").string() + ":" + std::to_string(line_no); };
    if (fields.size() != 4) throw DataError(where() + ": expected 4 fields");
    double y = 0.0;
    auto res = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), y);
    if (res.ec != std::errc{}) throw DataError(where() + ": bad rating '" + fields[2] + "'");
    const auto it = std::find(group_names.begin(), group_names.end(), fields[3]);
    if (it == group_names.end()) throw DataError(where() + ": unknown group '" + fields[3] + "'");
    ds.y.push_back(y);
    ds.groups.push_back(static_cast<std::uint32_t>(it - group_names.begin()));
    if (ids) ids->push_back(fields[1]);
  }
  ds.validate(false);
  return ds;
}

void write_vocab(const fs::path& path, const std::vector<std::string>& tokens,
                 const std::vector<std::size_t>& doc_freq) {
  auto out = open_out(path);
  out << "feature_id\ttoken\tdoc_freq\n";
  for (std::size_t j = 0; j < tokens.size(); ++j)
    out << j << '\t' << tokens[j] << '\t' << (j < doc_freq.size() ? doc_freq[j] : 0) << '\n';
}

void write_data_dir(const fs::path& dir, const DataDir& data) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "groups.txt");
    for (const auto& g : data.train.group_names) out << g << '\n';
  }
  write_split(dir / "train", data.train, data.train_ids);
  write_split(dir / "test", data.test, data.test_ids);
  if (!data.tokens.empty()) write_vocab(dir / "vocab.tsv", data.tokens, data.doc_freq);
}

DataDir read_data_dir(const fs::path& dir) {
  DataDir data;
  std::vector<std::string> groups;
  {
    std::ifstream in(dir / "groups.txt");
    if (!in) throw DataError("cannot read " + (dir / "groups.txt").string());
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) groups.push_back(line);
  }
  data.train = read_split(dir / "train", groups, &data.train_ids);
  data.test = read_split(dir / "test", groups, &data.test_ids);
  if (data.train.n_features() != data.test.n_features())
    throw DataError("train and test designs have different feature counts");
  std::ifstream in(dir / "vocab.tsv");
  if (in) {
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string id, token, df;
      std::getline(ss, id, '\t');
      std::getline(ss, token, '\t');
      std::getline(ss, df, '\t');
      data.tokens.push_back(token);
      data.doc_freq.push_back(df.empty() ? 0 : std::stoul(df));
    }
    if (data.tokens.size() != data.train.n_features())
      throw DataError("vocab.tsv lists " + std::to_string(data.tokens.size()) +
                      " tokens for a design with " + std::to_string(data.train.n_features()) +
                      " columns");
  }
  return data;
}

DataDir slice_data_dir(const DataDir& data, const ReducedFeatureSet& set) {
  DataDir out;
  out.train = reduce_dataset(data.train, set).data;
  out.test = reduce_dataset(data.test, set).data;
  out.train_ids = data.train_ids;
  out.test_ids = data.test_ids;
  if (!data.tokens.empty())
    for (Index j : set.features) {
      out.tokens.push_back(data.tokens[j]);
      out.doc_freq.push_back(data.doc_freq[j]);
    }
  return out;
}

void write_mse_header(std::ostream& out, const std::vector<std::string>& group_names) {
  out << "model,weights,all";
  for (const auto& g : group_names) out << ',' << g;
  out << '\n';
}

void write_mse_row(std::ostream& out, const std::string& model, const std::string& weights,
                   const MseTable& t) {
  out << model << ',' << weights << ',' << format_double(t.all);
  for (double v : t.per_group) out << ',' << format_double(v);
  out << '\n';
}

void write_stability_tsv(std::ostream& out, const std::vector<StabilityRecord>& records,
                         const std::vector<std::string>& labels) {
  out << "feature_id\ttoken\tcount\tproportion\n";
  for (const auto& r : records)
    out << r.feature << '\t' << (r.feature < labels.size() ? labels[r.feature] : "") << '\t'
        << r.count << '\t' << format_double(r.proportion) << '\n';
}

void write_union(std::ostream& out, const ReducedFeatureSet& set) {
  for (Index j : set.features) out << j << '\n';
}

void write_sweep_csv(std::ostream& out, const DenoiseSweep& sweep) {
  out << "gamma,threshold,mse\n";
  for (std::size_t k = 0; k < sweep.gammas.size(); ++k)
    out << format_double(sweep.gammas[k]) << ',' << format_double(sweep.thresholds[k]) << ','
        << format_double(sweep.mses[k]) << '\n';
}

Json sweep_summary(const DenoiseSweep& sweep) {
  Json j;
  j["argmin_gamma"] = sweep.argmin_gamma;
  j["min_mse"] = sweep.min_mse;
  j["sigma"] = sweep.sigma;
  j["n"] = sweep.n;
  return j;
}

void write_removal_header(std::ostream& out, const std::vector<std::string>& group_names) {
  out << "penalty,removal_type,all_pct";
  for (const auto& g : group_names) out << ',' << g << "_pct";
  out << ",coef_removed\n";
}

void write_removal_row(std::ostream& out, const RemovalRow& row) {
  out << row.penalty << ',' << row.removal_type << ',' << format_double(row.all_pct);
  for (double v : row.group_pct) out << ',' << format_double(v);
  out << ',' << row.coef_removed << '\n';
}

Json venn_json(const Subgroups& s) {
  Json j;
  j["sets"] = s.set_labels;
  Json regions = Json::object();
  std::size_t total = 0;
  for (const auto& r : s.regions) {
    std::string key;
    for (std::size_t b = 0; b < s.set_labels.size(); ++b) {
      if (!(r.membership & (1u << b))) continue;
      if (!key.empty()) key += '&';
      key += s.set_labels[b];
    }
    regions[key] = r.count;
    total += r.count;
  }
  j["regions"] = regions;
  j["union_size"] = total;
  return j;
}

}  // namespace shared_lasso::io
