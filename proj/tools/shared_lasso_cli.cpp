// shared-lasso: batch driver for featurization, model fitting, bootstrap
// reduction, de-noising sweeps and subgroup removal tables.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shared_lasso/corpus.hpp"
#include "shared_lasso/denoise.hpp"
#include "shared_lasso/dsl.hpp"
#include "shared_lasso/error.hpp"
#include "shared_lasso/io.hpp"
#include "shared_lasso/lasso.hpp"
#include "shared_lasso/parallel.hpp"
#include "shared_lasso/resampling.hpp"
#include "shared_lasso/rng.hpp"
#include "shared_lasso/subgroups.hpp"
#include "shared_lasso/synthetic.hpp"

#ifndef SHARED_LASSO_VERSION
#define SHARED_LASSO_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
namespace sl = shared_lasso;
using sl::io::Json;

namespace {

struct SolverFlags {
  std::size_t folds = 10;
  std::size_t grid_size = 100;
  double lambda_min_ratio = 1e-3;
  double tolerance = 1e-7;
  std::size_t max_iterations = 10000;
  bool standardize = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--folds", folds, "Cross-validation folds")->capture_default_str();
    cmd->add_option("--grid-size", grid_size, "Lambda grid points")->capture_default_str();
    cmd->add_option("--lambda-min-ratio", lambda_min_ratio, "Smallest lambda / lambda_max")
        ->capture_default_str();
    cmd->add_option("--tol", tolerance, "Max coefficient change per sweep")->capture_default_str();
    cmd->add_option("--max-iter", max_iterations, "Coordinate sweeps per fit")
        ->capture_default_str();
    cmd->add_flag("--standardize", standardize,
                  "Scale penalty factors by column standard deviation");
  }

  sl::LassoOptions options(std::size_t threads) const {
    sl::LassoOptions o;
    o.cv_folds = folds;
    o.lambda_grid_size = grid_size;
    o.lambda_min_ratio = lambda_min_ratio;
    o.tolerance = tolerance;
    o.max_iterations = max_iterations;
    o.scale_penalty_by_sd = standardize;
    o.threads = threads;
    o.validate();
    return o;
  }

  Json to_json() const {
    return {{"folds", folds},         {"grid_size", grid_size},
            {"lambda_min_ratio", lambda_min_ratio}, {"tolerance", tolerance},
            {"max_iterations", max_iterations},     {"standardize", standardize}};
  }
};

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::vector<std::string> argv;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sl::DataError("cannot write " + path.string());
  return out;
}

void write_manifest(const fs::path& out_dir, const Globals& g, const std::string& command,
                    Json config, const std::vector<std::string>& outputs) {
  Json m;
  m["tool"] = "shared-lasso";
  m["version"] = SHARED_LASSO_VERSION;
  m["tokenizer_version"] = std::string(sl::kTokenizerVersion);
  m["command"] = command;
  m["argv"] = g.argv;
  m["seed"] = g.seed;
  m["threads"] = sl::resolve_threads(g.threads);
  m["penalty_convention"] = "per-n";
  m["config"] = std::move(config);
  m["outputs"] = outputs;
  sl::io::write_json(out_dir / "manifest.json", m);
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

std::vector<sl::WeightScheme> parse_schemes(const std::vector<std::string>& names) {
  std::vector<sl::WeightScheme> out;
  for (const auto& name : names) {
    if (name == "all") {
      for (auto& s : sl::WeightScheme::builtin()) out.push_back(s);
    } else {
      out.push_back(sl::WeightScheme::parse(name));
    }
  }
  if (out.empty()) out.push_back({});
  return out;
}

std::vector<double> weights_for(const sl::WeightScheme& scheme, const sl::GroupedDataset& train) {
  sl::Diagnostics diag;
  auto r = sl::compute_weights(scheme, train.group_sizes(), &diag);
  for (const auto& w : diag.warnings) warn(scheme.name() + ": " + w);
  return r;
}

Json pooled_json(const sl::LassoFit& fit) {
  Json j;
  j["model"] = "pooled";
  j.update(sl::io::to_json(fit));
  return j;
}

Json separate_json(std::span<const sl::LassoFit> fits, const std::vector<std::string>& names) {
  Json j;
  j["model"] = "separate";
  Json per = Json::object();
  for (std::size_t g = 0; g < fits.size(); ++g) per[names[g]] = sl::io::to_json(fits[g]);
  j["fits"] = per;
  return j;
}

Json dsl_json(const sl::DslFit& fit) {
  Json j;
  j["model"] = "dsl";
  j.update(sl::io::to_json(fit));
  return j;
}

std::string file_safe(std::string name) {
  for (char& c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) c = '_';
  return name;
}

// ---- featurize -------------------------------------------------------------

struct FeaturizeArgs {
  fs::path corpus;
  fs::path genres;
  bool grouped = false;
  std::vector<std::string> priority{"drama", "comedy", "horror"};
  std::size_t min_df = 5;
  fs::path out;
};

int run_featurize(const FeaturizeArgs& a, const Globals& g) {
  if (a.grouped && a.genres.empty())
    throw sl::ConfigError("--grouped requires a genre sidecar via --genres");
  std::optional<sl::GenreTable> table;
  if (!a.genres.empty()) table = sl::read_genre_table(a.genres);
  const auto reviews = sl::ingest(a.corpus, table ? &*table : nullptr);
  const std::vector<std::string> priority = a.grouped ? a.priority : std::vector<std::string>{};
  const auto split = sl::group_and_split(reviews, priority, sl::derive_seed(g.seed, "split"), a.min_df);

  sl::io::DataDir data;
  data.train = split.train;
  data.test = split.test;
  data.train_ids = split.train_keys;
  data.test_ids = split.test_keys;
  data.tokens = split.vocab.tokens;
  data.doc_freq = split.vocab.doc_freq;
  sl::io::write_data_dir(a.out, data);

  std::cerr << "reviews " << reviews.size() << ", train n " << split.train.y.size() << ", test n "
            << split.test.y.size() << ", p " << split.vocab.size() << '\n';
  const auto sizes = split.train.group_sizes();
  for (std::size_t k = 0; k < sizes.size(); ++k)
    std::cerr << "  " << split.train.group_names[k] << ": " << sizes[k] << '\n';

  Json cfg{{"corpus", a.corpus.string()}, {"genres", a.genres.string()}, {"grouped", a.grouped},
           {"priority", a.priority},      {"min_df", a.min_df}};
  cfg["train_n"] = split.train.y.size();
  cfg["test_n"] = split.test.y.size();
  cfg["p"] = split.vocab.size();
  cfg["train_group_sizes"] = sizes;
  write_manifest(a.out, g, "featurize", cfg,
                 {"groups.txt", "vocab.tsv", "train/design.txt", "train/labels.csv",
                  "test/design.txt", "test/labels.csv"});
  return sl::kExitOk;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::vector<std::size_t> sizes{200, 200, 200};
  sl::SyntheticSpec spec;
  fs::path out;
};

int run_synth(SynthArgs a, const Globals& g) {
  a.spec.group_sizes = a.sizes;
  a.spec.seed = sl::derive_seed(g.seed, "synthetic");
  const auto syn = sl::make_synthetic(a.spec);
  sl::io::DataDir data;
  data.train = syn.train;
  data.test = syn.test;
  sl::io::write_data_dir(a.out, data);
  Json truth;
  truth["beta"] = syn.beta;
  truth["deltas"] = syn.deltas;
  sl::io::write_json(a.out / "truth.json", truth);
  Json cfg{{"group_sizes", a.sizes},          {"features", a.spec.n_features},
           {"density", a.spec.density},       {"support", a.spec.support},
           {"signal", a.spec.signal},         {"offset_support", a.spec.offset_support},
           {"offset_scale", a.spec.offset_scale}, {"noise", a.spec.noise_sd},
           {"intercept", a.spec.intercept}};
  write_manifest(a.out, g, "synth", cfg,
                 {"groups.txt", "train/design.txt", "train/labels.csv", "test/design.txt",
                  "test/labels.csv", "truth.json"});
  return sl::kExitOk;
}

// ---- fit / report ----------------------------------------------------------

struct FitArgs {
  fs::path data;
  std::vector<std::string> models{"dsl"};
  std::vector<std::string> weights{"sqrt_third"};
  SolverFlags solver;
  fs::path out;
};

int run_fit(const FitArgs& a, const Globals& g, const std::string& command) {
  const auto data = sl::io::read_data_dir(a.data);
  const auto opts = a.solver.options(g.threads);
  const auto schemes = parse_schemes(a.weights);
  fs::create_directories(a.out);
  std::vector<std::string> outputs{"mse.csv"};

  auto csv = open_out(a.out / "mse.csv");
  sl::io::write_mse_header(csv, data.train.group_names);
  for (const auto& model : a.models) {
    if (model == "pooled") {
      const auto fit = sl::fit_pooled(data.train, opts, sl::derive_seed(g.seed, "pooled"));
      sl::io::write_json(a.out / "fit_pooled.json", pooled_json(fit));
      sl::io::write_mse_row(csv, "pooled", "", sl::evaluate(fit, data.test));
      outputs.push_back("fit_pooled.json");
    } else if (model == "separate") {
      const auto fits = sl::fit_separate(data.train, opts, sl::derive_seed(g.seed, "separate"));
      sl::io::write_json(a.out / "fit_separate.json", separate_json(fits, data.train.group_names));
      sl::io::write_mse_row(csv, "separate", "", sl::evaluate(std::span(fits), data.test));
      outputs.push_back("fit_separate.json");
    } else if (model == "dsl") {
      for (const auto& scheme : schemes) {
        const auto r = weights_for(scheme, data.train);
        const auto fit = sl::fit_dsl(data.train, r, scheme.name(), opts,
                                     sl::derive_seed(g.seed, "dsl"));
        const auto name = "fit_dsl_" + file_safe(scheme.name()) + ".json";
        sl::io::write_json(a.out / name, dsl_json(fit));
        sl::io::write_mse_row(csv, "dsl", scheme.formula(), sl::evaluate(fit, data.test));
        outputs.push_back(name);
      }
    } else {
      throw sl::ConfigError("unknown model '" + model + "' (expected pooled, separate or dsl)");
    }
    csv.flush();
  }

  std::vector<std::string> scheme_names;
  for (const auto& s : schemes) scheme_names.push_back(s.name());
  Json cfg{{"data", a.data.string()}, {"models", a.models}, {"weights", scheme_names},
           {"solver", a.solver.to_json()}};
  write_manifest(a.out, g, command, cfg, outputs);
  return sl::kExitOk;
}

// ---- bootstrap -------------------------------------------------------------

struct BootstrapArgs {
  fs::path data;
  std::string mode = "bls";
  std::size_t replicates = 100;
  std::string weights = "sqrt_third";
  std::optional<std::size_t> resample_size;
  SolverFlags solver;
  fs::path out;
};

int run_bootstrap(const BootstrapArgs& a, const Globals& g) {
  const auto data = sl::io::read_data_dir(a.data);
  sl::BootstrapConfig cfg;
  cfg.replicates = a.replicates;
  cfg.seed = sl::derive_seed(g.seed, "bootstrap");
  cfg.solver = a.solver.options(1);
  cfg.resample_size = a.resample_size;
  cfg.threads = g.threads;
  cfg.validate();
  fs::create_directories(a.out);
  std::vector<std::string> outputs;

  sl::ReducedFeatureSet reduced;
  std::size_t failures = 0;
  if (a.mode == "bls") {
    const auto per_group = sl::bootstrap_lasso_group(data.train, cfg);
    std::vector<sl::ReducedFeatureSet> sets;
    for (const auto& gb : per_group) {
      const auto name = "stability_" + file_safe(gb.group) + ".tsv";
      auto out = open_out(a.out / name);
      sl::io::write_stability_tsv(out, sl::stability_report(gb.counts), data.tokens);
      outputs.push_back(name);
      sets.push_back(gb.reduced);
      failures += gb.tally.failures;
      for (const auto& m : gb.tally.failure_messages) warn(gb.group + " " + m);
      std::cerr << gb.group << ": union " << gb.reduced.features.size() << " of "
                << data.train.n_features() << '\n';
    }
    reduced = sl::merge_feature_sets(sets);
  } else if (a.mode == "bsls") {
    const auto scheme = sl::WeightScheme::parse(a.weights);
    weights_for(scheme, data.train);
    const auto b = sl::bootstrap_dsl(data.train, scheme, cfg);
    // Augmented columns are labelled "<block>:<token or id>".
    const std::size_t p = data.train.n_features();
    std::vector<std::string> labels;
    for (std::size_t block = 0; block <= data.train.n_groups(); ++block)
      for (std::size_t j = 0; j < p; ++j)
        labels.push_back((block == 0 ? std::string("shared") : data.train.group_names[block - 1]) +
                         ":" + (data.tokens.empty() ? std::to_string(j) : data.tokens[j]));
    auto out = open_out(a.out / "stability_augmented.tsv");
    sl::io::write_stability_tsv(out, sl::stability_report(b.augmented_counts), labels);
    outputs.push_back("stability_augmented.tsv");
    failures = b.tally.failures;
    for (const auto& m : b.tally.failure_messages) warn(m);
    reduced = b.reduced;
  } else {
    throw sl::ConfigError("unknown bootstrap mode '" + a.mode + "' (expected bls or bsls)");
  }
  std::cerr << "reduced feature set: " << reduced.features.size() << " of "
            << data.train.n_features() << '\n';

  {
    auto out = open_out(a.out / "union.txt");
    sl::io::write_union(out, reduced);
  }
  outputs.push_back("union.txt");
  const auto reduced_data = sl::io::slice_data_dir(data, reduced);
  sl::io::write_data_dir(a.out / "reduced", reduced_data);
  outputs.push_back("reduced/");

  // Full versus reduced per-group lasso test MSE.
  const auto opts = a.solver.options(g.threads);
  const auto seed = sl::derive_seed(g.seed, "separate");
  const auto full_fits = sl::fit_separate(data.train, opts, seed);
  const auto red_fits = sl::fit_separate(reduced_data.train, opts, seed);
  auto csv = open_out(a.out / "reduction_mse.csv");
  sl::io::write_mse_header(csv, data.train.group_names);
  sl::io::write_mse_row(csv, "separate", "full", sl::evaluate(std::span(full_fits), data.test));
  sl::io::write_mse_row(csv, "separate", "reduced",
                        sl::evaluate(std::span(red_fits), reduced_data.test));
  outputs.push_back("reduction_mse.csv");

  Json c{{"data", a.data.string()}, {"mode", a.mode},   {"replicates", a.replicates},
         {"weights", a.weights},    {"solver", a.solver.to_json()}};
  c["resample_size"] = a.resample_size ? Json(*a.resample_size) : Json(nullptr);
  c["reduced_size"] = reduced.features.size();
  c["replicate_failures"] = failures;
  write_manifest(a.out, g, "bootstrap", c, outputs);
  return sl::kExitOk;
}

// ---- denoise ---------------------------------------------------------------

struct DenoiseArgs {
  fs::path fit;
  fs::path data;
  std::string sigma = "auto";
  std::optional<std::size_t> n;
  fs::path out;
};

int run_denoise(const DenoiseArgs& a, const Globals& g) {
  const auto data = sl::io::read_data_dir(a.data);
  const auto doc = sl::io::read_json(a.fit);
  const std::string model = doc.value("model", doc.contains("scheme") ? "dsl" : "pooled");
  const std::size_t n = a.n.value_or(data.train.y.size());

  std::optional<double> sigma_override;
  if (a.sigma != "auto") {
    try {
      std::size_t used = 0;
      sigma_override = std::stod(a.sigma, &used);
      if (used != a.sigma.size() || *sigma_override < 0) throw std::invalid_argument("sigma");
    } catch (const std::exception&) {
      throw sl::ConfigError("--sigma must be 'auto' or a non-negative number");
    }
  }

  sl::DenoiseSweep sweep;
  if (model == "dsl") {
    const auto fit = sl::io::dsl_fit_from_json(doc);
    const double sigma = sigma_override.value_or(sl::residual_sigma(fit, data.train));
    sweep = sl::sweep_gamma(fit, data.test, sigma, n);
  } else if (model == "pooled") {
    const auto fit = sl::io::lasso_fit_from_json(doc);
    const double sigma =
        sigma_override.value_or(sl::residual_sigma(fit, data.train.X, data.train.y));
    sweep = sl::sweep_gamma(fit, data.test, sigma, n);
  } else {
    throw sl::ConfigError("denoise accepts pooled or dsl fits, not '" + model + "'");
  }

  fs::create_directories(a.out);
  {
    auto out = open_out(a.out / "sweep.csv");
    sl::io::write_sweep_csv(out, sweep);
  }
  sl::io::write_json(a.out / "summary.json", sl::io::sweep_summary(sweep));
  std::cerr << "argmin gamma " << sweep.argmin_gamma << ", min mse " << sweep.min_mse << '\n';
  Json cfg{{"fit", a.fit.string()}, {"data", a.data.string()}, {"sigma", a.sigma}, {"n", n}};
  write_manifest(a.out, g, "denoise", cfg, {"sweep.csv", "summary.json"});
  return sl::kExitOk;
}

// ---- subgroups -------------------------------------------------------------

struct SubgroupArgs {
  fs::path data;
  std::vector<std::string> weights{"sqrt_third"};
  bool zero_only = false;
  bool reuse_lambda = false;
  SolverFlags solver;
  fs::path out;
};

int run_subgroups(const SubgroupArgs& a, const Globals& g) {
  const auto data = sl::io::read_data_dir(a.data);
  const auto opts = a.solver.options(g.threads);
  const auto schemes = parse_schemes(a.weights);
  sl::RemovalSettings settings;
  settings.mode = a.zero_only ? sl::RemovalMode::ZeroOnly : sl::RemovalMode::Refit;
  settings.lambda_policy = a.reuse_lambda ? sl::LambdaPolicy::Reuse : sl::LambdaPolicy::Reselect;

  fs::create_directories(a.out);
  std::vector<std::string> outputs{"removal.csv"};
  const auto separate = sl::fit_separate(data.train, opts, sl::derive_seed(g.seed, "separate"));
  auto csv = open_out(a.out / "removal.csv");
  sl::io::write_removal_header(csv, data.train.group_names);
  for (const auto& scheme : schemes) {
    weights_for(scheme, data.train);
    const auto analysis = sl::analyze_subgroups(data.train, data.test, scheme, separate, opts,
                                                sl::derive_seed(g.seed, "dsl"), settings);
    for (const auto& row : analysis.rows) sl::io::write_removal_row(csv, row);
    csv.flush();
    const auto name = "venn_" + file_safe(scheme.name()) + ".json";
    Json venn = sl::io::venn_json(analysis.groups);
    venn["penalty"] = scheme.name();
    sl::io::write_json(a.out / name, venn);
    outputs.push_back(name);
  }
  std::vector<std::string> scheme_names;
  for (const auto& s : schemes) scheme_names.push_back(s.name());
  Json cfg{{"data", a.data.string()},  {"weights", scheme_names}, {"zero_only", a.zero_only},
           {"reuse_lambda", a.reuse_lambda}, {"solver", a.solver.to_json()}};
  write_manifest(a.out, g, "subgroups", cfg, outputs);
  return sl::kExitOk;
}

constexpr const char* kFormats = R"(Output formats (LF line endings, '.' decimal separator):
  mse.csv, reduction_mse.csv   model,weights,all,<group...>
  removal.csv                  penalty,removal_type,all_pct,<group>_pct...,coef_removed
  sweep.csv                    gamma,threshold,mse
  stability_*.tsv              feature_id, token, count, proportion (tab separated)
  union.txt                    one feature id per line
  labels.csv                   row,id,rating,group
  vocab.tsv                    feature_id, token, doc_freq (tab separated)
Lambdas use the per-n convention: loss (1/(2n)) RSS; multiply by n for (1/2) RSS.
Exit codes: 0 ok, 2 configuration error, 3 data error, 4 convergence failure, 1 other.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-shared lasso toolkit", "shared-lasso"};
  app.footer(kFormats);
  app.set_version_flag("--version", SHARED_LASSO_VERSION);
  app.require_subcommand(1);

  Globals g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
  app.add_option("--seed", g.seed, "Master seed; every stage derives a named sub-stream")
      ->capture_default_str();
  app.add_option("--threads", g.threads,
                 "Worker cap (0 = SHARED_LASSO_THREADS or hardware concurrency)")
      ->capture_default_str();

  FeaturizeArgs fa;
  auto* featurize = app.add_subcommand("featurize", "Ingest a review corpus into a data directory");
  featurize->add_option("--corpus", fa.corpus, "aclImdb-style root")->required();
  featurize->add_option("--genres", fa.genres, "Genre sidecar TSV: review_id<TAB>g1,g2,...");
  featurize->add_flag("--grouped", fa.grouped, "Group reviews by genre (needs --genres)");
  featurize->add_option("--priority", fa.priority, "Genre priority order")
      ->delimiter(',')
      ->capture_default_str();
  featurize->add_option("--min-df", fa.min_df, "Minimum training document frequency")
      ->capture_default_str();
  featurize->add_option("--out", fa.out, "Output data directory")->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Write a synthetic grouped data directory");
  synth->add_option("--groups", sa.sizes, "Rows per group in each split")
      ->delimiter(',')
      ->capture_default_str();
  synth->add_option("--features", sa.spec.n_features)->capture_default_str();
  synth->add_option("--density", sa.spec.density)->capture_default_str();
  synth->add_option("--support", sa.spec.support)->capture_default_str();
  synth->add_option("--signal", sa.spec.signal)->capture_default_str();
  synth->add_option("--offset-support", sa.spec.offset_support)->capture_default_str();
  synth->add_option("--offset-scale", sa.spec.offset_scale)->capture_default_str();
  synth->add_option("--noise", sa.spec.noise_sd)->capture_default_str();
  synth->add_option("--intercept", sa.spec.intercept)->capture_default_str();
  synth->add_option("--out", sa.out)->required();

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit pooled, separate or data-shared models");
  fit->add_option("--data", fit_args.data, "Data directory")->required();
  fit->add_option("--model", fit_args.models, "pooled, separate or dsl (repeatable)")
      ->capture_default_str();
  fit->add_option("--weights", fit_args.weights,
                  "Weight scheme (repeatable): sqrt_third, sqrt_share, sqrt_log_ratio_inv, "
                  "size_ratio_inv, log_ratio_inv, log_ratio, sqrt_log_ratio, sqrt_mixed, "
                  "custom:a,b,..., or all")
      ->capture_default_str();
  fit_args.solver.attach(fit);
  fit->add_option("--out", fit_args.out)->required();

  FitArgs report_args;
  report_args.models = {"pooled", "separate", "dsl"};
  report_args.weights = {"all"};
  auto* report = app.add_subcommand("report", "Pooled, separate and every DSL scheme in one table");
  report->add_option("--data", report_args.data, "Data directory")->required();
  report->add_option("--weights", report_args.weights, "Weight schemes (repeatable)")
      ->capture_default_str();
  report_args.solver.attach(report);
  report->add_option("--out", report_args.out)->required();

  BootstrapArgs ba;
  auto* bootstrap = app.add_subcommand("bootstrap", "Bootstrapped lasso (bls) or DSL (bsls)");
  bootstrap->add_option("--data", ba.data, "Data directory")->required();
  bootstrap->add_option("--mode", ba.mode, "bls or bsls")->capture_default_str();
  bootstrap->add_option("-B,--replicates", ba.replicates)->capture_default_str();
  bootstrap->add_option("--weights", ba.weights, "Weight scheme for bsls")->capture_default_str();
  bootstrap->add_option("--resample-size", ba.resample_size,
                        "Rows per resample (default: the group's size)");
  ba.solver.attach(bootstrap);
  bootstrap->add_option("--out", ba.out)->required();

  DenoiseArgs da;
  auto* denoise = app.add_subcommand("denoise", "Soft-threshold gamma sweep of a fitted model");
  denoise->add_option("--fit", da.fit, "fit_pooled.json or fit_dsl_*.json")->required();
  denoise->add_option("--data", da.data, "Data directory")->required();
  denoise->add_option("--sigma", da.sigma, "auto (training residual SD) or a value")
      ->capture_default_str();
  denoise->add_option("--n", da.n, "n in the threshold (default: training rows)");
  denoise->add_option("--out", da.out)->required();

  SubgroupArgs ga;
  auto* subgroups = app.add_subcommand("subgroups", "Subgroup removal table and venn counts");
  subgroups->add_option("--data", ga.data, "Data directory")->required();
  subgroups->add_option("--weights", ga.weights, "Weight schemes (repeatable, or all)")
      ->capture_default_str();
  subgroups->add_flag("--zero-only", ga.zero_only, "Zero coefficients instead of refitting");
  subgroups->add_flag("--reuse-lambda", ga.reuse_lambda, "Keep the baseline lambda on refit");
  ga.solver.attach(subgroups);
  subgroups->add_option("--out", ga.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? sl::kExitOk : sl::kExitConfig;
  }

  try {
    if (*featurize) return run_featurize(fa, g);
    if (*synth) return run_synth(sa, g);
    if (*fit) return run_fit(fit_args, g, "fit");
    if (*report) return run_fit(report_args, g, "report");
    if (*bootstrap) return run_bootstrap(ba, g);
    if (*denoise) return run_denoise(da, g);
    if (*subgroups) return run_subgroups(ga, g);
  } catch (const sl::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return sl::kExitConfig;
  } catch (const sl::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return sl::kExitConvergence;
  } catch (const sl::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return sl::kExitData;
  } catch (const sl::StructuralError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return sl::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sl::kExitOther;
  }
  return sl::kExitOther;
}
