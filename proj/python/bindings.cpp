#include <algorithm>
#include <map>
#include <optional>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "shared_lasso/denoise.hpp"
#include "shared_lasso/dsl.hpp"
#include "shared_lasso/error.hpp"
#include "shared_lasso/io.hpp"
#include "shared_lasso/lasso.hpp"
#include "shared_lasso/resampling.hpp"
#include "shared_lasso/subgroups.hpp"
#include "shared_lasso/synthetic.hpp"

namespace py = pybind11;
namespace sl = shared_lasso;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

sl::SparseBinaryDesign design_from_dense(const Array& a) {
  if (a.ndim() != 2) throw sl::StructuralError("design must be a 2-d array");
  const auto n = static_cast<std::size_t>(a.shape(0)), p = static_cast<std::size_t>(a.shape(1));
  auto v = a.unchecked<2>();
  std::vector<std::vector<sl::Index>> rows(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const double x = v(i, j);
      if (x == 1.0)
        rows[i].push_back(static_cast<sl::Index>(j));
      else if (x != 0.0)
        throw sl::DataError("design entries must be 0 or 1");
    }
  return sl::SparseBinaryDesign::from_rows(rows, p);
}

Array dense(const sl::SparseBinaryDesign& X) {
  Array out({X.rows(), X.cols()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < X.cols(); ++j) v(i, j) = X.value(i, j);
  return out;
}

Array to_array(const std::vector<double>& v) { return Array(v.size(), v.data()); }

std::vector<double> coef(const sl::SparseVector& v) { return v.to_dense(); }

sl::GroupedDataset make_dataset(const sl::SparseBinaryDesign& X, std::vector<double> y,
                                std::vector<std::uint32_t> groups,
                                std::optional<std::vector<std::string>> names) {
  sl::GroupedDataset ds;
  ds.X = X;
  ds.y = std::move(y);
  ds.groups = std::move(groups);
  if (names) {
    ds.group_names = *names;
  } else {
    std::uint32_t g_max = 0;
    for (auto g : ds.groups) g_max = std::max(g_max, g + 1);
    for (std::uint32_t g = 0; g < g_max; ++g) ds.group_names.push_back("g" + std::to_string(g + 1));
  }
  ds.validate(false);
  return ds;
}

py::dict mse_dict(const sl::MseTable& t) {
  py::dict d;
  d["all"] = t.all;
  for (std::size_t g = 0; g < t.per_group.size(); ++g) d[py::str(t.group_names.at(g))] = t.per_group[g];
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Data-shared lasso on sparse binary designs";

  auto base = py::register_exception<sl::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<sl::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<sl::DataError>(m, "DataError", base.ptr());
  py::register_exception<sl::StructuralError>(m, "StructuralError", base.ptr());
  py::register_exception<sl::ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<sl::SparseBinaryDesign>(m, "Design")
      .def(py::init(&design_from_dense), py::arg("dense"))
      .def_static("from_rows",
                  [](const std::vector<std::vector<sl::Index>>& rows, std::size_t n_cols) {
                    return sl::SparseBinaryDesign::from_rows(rows, n_cols);
                  },
                  py::arg("rows"), py::arg("n_cols"))
      .def_property_readonly("shape", [](const sl::SparseBinaryDesign& X) {
        return py::make_tuple(X.rows(), X.cols());
      })
      .def_property_readonly("nnz", &sl::SparseBinaryDesign::nnz)
      .def("to_dense", &dense)
      .def("row", [](const sl::SparseBinaryDesign& X, std::size_t i) {
        if (i >= X.rows()) throw py::index_error();
        const auto r = X.row(i);
        return std::vector<sl::Index>(r.begin(), r.end());
      });
  py::implicitly_convertible<py::array, sl::SparseBinaryDesign>();

  py::class_<sl::LassoOptions>(m, "LassoOptions")
      .def(py::init<>())
      .def_readwrite("lambda_grid_size", &sl::LassoOptions::lambda_grid_size)
      .def_readwrite("lambda_min_ratio", &sl::LassoOptions::lambda_min_ratio)
      .def_readwrite("max_iterations", &sl::LassoOptions::max_iterations)
      .def_readwrite("tolerance", &sl::LassoOptions::tolerance)
      .def_readwrite("cv_folds", &sl::LassoOptions::cv_folds)
      .def_readwrite("fit_intercept", &sl::LassoOptions::fit_intercept)
      .def_readwrite("scale_penalty_by_sd", &sl::LassoOptions::scale_penalty_by_sd)
      .def_readwrite("threads", &sl::LassoOptions::threads);

  py::class_<sl::LassoFit>(m, "LassoFit")
      .def_readonly("intercept", &sl::LassoFit::intercept)
      .def_readonly("lambda_", &sl::LassoFit::lambda)
      .def_readonly("sweeps", &sl::LassoFit::sweeps)
      .def_property_readonly("coef", [](const sl::LassoFit& f) { return to_array(coef(f.coefficients)); })
      .def("predict", [](const sl::LassoFit& f, const sl::SparseBinaryDesign& X) {
        return to_array(sl::predict(f, X));
      });

  py::class_<sl::CvResult>(m, "CvResult")
      .def_readonly("lambdas", &sl::CvResult::lambdas)
      .def_readonly("mean_mse", &sl::CvResult::mean_mse)
      .def_readonly("std_error", &sl::CvResult::std_error)
      .def_readonly("index_min", &sl::CvResult::index_min)
      .def_readonly("lambda_min", &sl::CvResult::lambda_min)
      .def_readonly("converged_prefix", &sl::CvResult::converged_prefix);

  py::class_<sl::GroupedDataset>(m, "GroupedDataset")
      .def(py::init(&make_dataset), py::arg("X"), py::arg("y"), py::arg("groups"),
           py::arg("group_names") = std::nullopt)
      .def_readonly("X", &sl::GroupedDataset::X)
      .def_readonly("y", &sl::GroupedDataset::y)
      .def_readonly("groups", &sl::GroupedDataset::groups)
      .def_readonly("group_names", &sl::GroupedDataset::group_names)
      .def_property_readonly("n_features", &sl::GroupedDataset::n_features)
      .def("group_sizes", &sl::GroupedDataset::group_sizes);

  py::class_<sl::DslFit>(m, "DslFit")
      .def_readonly("scheme", &sl::DslFit::scheme)
      .def_readonly("r", &sl::DslFit::r)
      .def_readonly("lambda_", &sl::DslFit::lambda)
      .def_readonly("intercept", &sl::DslFit::intercept)
      .def_readonly("group_names", &sl::DslFit::group_names)
      .def_property_readonly("beta", [](const sl::DslFit& f) { return to_array(coef(f.beta)); })
      .def_property_readonly("deltas", [](const sl::DslFit& f) {
        std::vector<Array> out;
        for (const auto& d : f.deltas) out.push_back(to_array(coef(d)));
        return out;
      })
      .def("group_coefficients", [](const sl::DslFit& f, std::size_t g) {
        return to_array(f.group_coefficients(g));
      })
      .def("predict", [](const sl::DslFit& f, const sl::GroupedDataset& ds) {
        return to_array(sl::predict(f, ds));
      });

  m.def("soft_threshold", &sl::soft_threshold, py::arg("z"), py::arg("t"));
  m.def("lambda_max",
        [](const sl::SparseBinaryDesign& X, std::vector<double> y, std::vector<double> pf, bool intercept) {
          return sl::lambda_max(X, y, pf, intercept);
        },
        py::arg("X"), py::arg("y"), py::arg("penalty_factors") = std::vector<double>{},
        py::arg("fit_intercept") = true);
  m.def("fit_lasso",
        [](const sl::SparseBinaryDesign& X, std::vector<double> y, double lambda,
           std::vector<double> pf, const sl::LassoOptions& opts) {
          py::gil_scoped_release release;
          return sl::fit(X, y, lambda, pf, opts);
        },
        "Minimizes (1/(2n)) RSS + lambda * sum pf_j |b_j|.", py::arg("X"), py::arg("y"),
        py::arg("lambda_"), py::arg("penalty_factors") = std::vector<double>{},
        py::arg("options") = sl::LassoOptions{});
  m.def("fit_path",
        [](const sl::SparseBinaryDesign& X, std::vector<double> y, std::vector<double> pf,
           const sl::LassoOptions& opts) {
          py::gil_scoped_release release;
          auto path = sl::fit_path(X, y, pf, opts);
          return std::make_pair(path.lambdas, path.fits);
        },
        py::arg("X"), py::arg("y"), py::arg("penalty_factors") = std::vector<double>{},
        py::arg("options") = sl::LassoOptions{});
  m.def("cv_fit",
        [](const sl::SparseBinaryDesign& X, std::vector<double> y, std::vector<double> pf,
           const sl::LassoOptions& opts, std::uint64_t seed) {
          py::gil_scoped_release release;
          auto r = sl::cv_fit(X, y, pf, opts, seed);
          return std::make_pair(r.fit, r.cv);
        },
        py::arg("X"), py::arg("y"), py::arg("penalty_factors") = std::vector<double>{},
        py::arg("options") = sl::LassoOptions{}, py::arg("seed") = 0);
  m.def("mse", [](std::vector<double> pred, std::vector<double> y) { return sl::mse(pred, y); });

  m.def("weight_schemes", [] {
    std::vector<std::string> names;
    for (const auto& s : sl::WeightScheme::builtin()) names.push_back(s.name());
    return names;
  });
  m.def("compute_weights",
        [](const std::string& scheme, std::vector<std::size_t> sizes) {
          return sl::compute_weights(sl::WeightScheme::parse(scheme), sizes);
        },
        py::arg("scheme"), py::arg("group_sizes"));
  m.def("fit_dsl",
        [](const sl::GroupedDataset& ds, const std::string& scheme, const sl::LassoOptions& opts,
           std::uint64_t seed) {
          py::gil_scoped_release release;
          return sl::fit_dsl(ds, sl::WeightScheme::parse(scheme), opts, seed);
        },
        py::arg("data"), py::arg("scheme") = "sqrt_third", py::arg("options") = sl::LassoOptions{},
        py::arg("seed") = 0);
  m.def("fit_dsl_at",
        [](const sl::GroupedDataset& ds, std::vector<double> r, double lambda,
           const sl::LassoOptions& opts) { return sl::fit_dsl_at(ds, r, "custom", lambda, opts); },
        py::arg("data"), py::arg("r"), py::arg("lambda_"), py::arg("options") = sl::LassoOptions{});
  m.def("fit_pooled",
        [](const sl::GroupedDataset& ds, const sl::LassoOptions& opts, std::uint64_t seed) {
          py::gil_scoped_release release;
          return sl::fit_pooled(ds, opts, seed);
        },
        py::arg("data"), py::arg("options") = sl::LassoOptions{}, py::arg("seed") = 0);
  m.def("fit_separate",
        [](const sl::GroupedDataset& ds, const sl::LassoOptions& opts, std::uint64_t seed) {
          py::gil_scoped_release release;
          return sl::fit_separate(ds, opts, seed);
        },
        py::arg("data"), py::arg("options") = sl::LassoOptions{}, py::arg("seed") = 0);
  m.def("evaluate", [](const sl::DslFit& f, const sl::GroupedDataset& test) {
    return mse_dict(sl::evaluate(f, test));
  });
  m.def("evaluate", [](const sl::LassoFit& f, const sl::GroupedDataset& test) {
    return mse_dict(sl::evaluate(f, test));
  });
  m.def("evaluate", [](const std::vector<sl::LassoFit>& fits, const sl::GroupedDataset& test) {
    return mse_dict(sl::evaluate(fits, test));
  });

  m.def("make_synthetic",
        [](std::vector<std::size_t> group_sizes, std::size_t n_features, double density,
           std::size_t support, double signal, std::size_t offset_support, double offset_scale,
           double noise_sd, std::uint64_t seed) {
          sl::SyntheticSpec spec;
          spec.group_sizes = std::move(group_sizes);
          spec.n_features = n_features;
          spec.density = density;
          spec.support = support;
          spec.signal = signal;
          spec.offset_support = offset_support;
          spec.offset_scale = offset_scale;
          spec.noise_sd = noise_sd;
          spec.seed = seed;
          auto d = sl::make_synthetic(spec);
          return py::make_tuple(d.train, d.test, to_array(d.beta));
        },
        "Returns (train, test, true shared coefficients).",
        py::arg("group_sizes") = std::vector<std::size_t>{100, 100, 100}, py::arg("n_features") = 50,
        py::arg("density") = 0.1, py::arg("support") = 5, py::arg("signal") = 1.0,
        py::arg("offset_support") = 2, py::arg("offset_scale") = 0.2, py::arg("noise_sd") = 1.0,
        py::arg("seed") = 0);
  m.def("read_data_dir",
        [](const std::filesystem::path& dir) {
          auto d = sl::io::read_data_dir(dir);
          return py::make_tuple(d.train, d.test, d.tokens);
        },
        "Returns (train, test, tokens) from a featurized data directory.", py::arg("path"));

  m.def("bootstrap_lasso",
        [](const sl::GroupedDataset& ds, std::size_t replicates, std::uint64_t seed,
           const sl::LassoOptions& opts, std::size_t threads) {
          sl::BootstrapConfig cfg;
          cfg.replicates = replicates;
          cfg.seed = seed;
          cfg.solver = opts;
          cfg.threads = threads;
          std::vector<sl::GroupBootstrap> res;
          {
            py::gil_scoped_release release;
            res = sl::bootstrap_lasso_group(ds, cfg);
          }
          py::dict out;
          std::vector<sl::ReducedFeatureSet> sets;
          for (const auto& g : res) {
            py::dict d;
            d["counts"] = g.counts.counts;
            d["union"] = g.reduced.features;
            d["failures"] = g.tally.failures;
            out[py::str(g.group)] = d;
            sets.push_back(g.reduced);
          }
          return py::make_tuple(sl::merge_feature_sets(sets).features, out);
        },
        "Bootstrapped lasso per group. Returns (merged union, per-group details).",
        py::arg("data"), py::arg("replicates") = 100, py::arg("seed") = 0,
        py::arg("options") = sl::LassoOptions{}, py::arg("threads") = 1);
  m.def("bootstrap_dsl",
        [](const sl::GroupedDataset& ds, const std::string& scheme, std::size_t replicates,
           std::uint64_t seed, const sl::LassoOptions& opts, std::size_t threads) {
          sl::BootstrapConfig cfg;
          cfg.replicates = replicates;
          cfg.seed = seed;
          cfg.solver = opts;
          cfg.threads = threads;
          py::gil_scoped_release release;
          auto res = sl::bootstrap_dsl(ds, sl::WeightScheme::parse(scheme), cfg);
          return std::make_pair(res.reduced.features, res.augmented_counts.counts);
        },
        "Bootstrapped DSL. Returns (union over original features, augmented column counts).",
        py::arg("data"), py::arg("scheme") = "sqrt_third", py::arg("replicates") = 100,
        py::arg("seed") = 0, py::arg("options") = sl::LassoOptions{}, py::arg("threads") = 1);
  m.def("reduce_dataset",
        [](const sl::GroupedDataset& ds, std::vector<sl::Index> features) {
          sl::ReducedFeatureSet set{std::move(features), ds.n_features(), {}};
          return sl::reduce_dataset(ds, set).data;
        },
        py::arg("data"), py::arg("features"));

  m.def("donoho_threshold", &sl::donoho_threshold, py::arg("n"), py::arg("gamma1"), py::arg("sigma"));
  m.def("gamma_grid", &sl::gamma_grid);
  m.def("residual_sigma", py::overload_cast<const sl::DslFit&, const sl::GroupedDataset&>(&sl::residual_sigma));
  m.def("sweep_gamma",
        [](const sl::DslFit& f, const sl::GroupedDataset& test, double sigma, std::size_t n) {
          auto s = sl::sweep_gamma(f, test, sigma, n);
          py::dict d;
          d["gammas"] = s.gammas;
          d["thresholds"] = s.thresholds;
          d["mses"] = s.mses;
          d["argmin_gamma"] = s.argmin_gamma;
          d["min_mse"] = s.min_mse;
          return d;
        },
        py::arg("fit"), py::arg("test"), py::arg("sigma"), py::arg("n"));
  m.def("apply_threshold", py::overload_cast<const sl::DslFit&, double>(&sl::apply_threshold),
        py::arg("fit"), py::arg("t"));

  m.def("venn_regions",
        [](const std::vector<std::vector<sl::Index>>& sets) {
          std::vector<sl::ActiveSet> in;
          for (std::size_t k = 0; k < sets.size(); ++k) {
            auto f = sets[k];
            std::sort(f.begin(), f.end());
            f.erase(std::unique(f.begin(), f.end()), f.end());
            in.push_back({"s" + std::to_string(k), std::move(f)});
          }
          std::map<std::uint32_t, std::size_t> out;
          for (const auto& r : sl::venn_regions(in)) out[r.membership] = r.count;
          return out;
        },
        "Region sizes keyed by membership mask (bit k = set k).", py::arg("sets"));
  m.def("analyze_subgroups",
        [](const sl::GroupedDataset& train, const sl::GroupedDataset& test, const std::string& scheme,
           const sl::LassoOptions& opts, std::uint64_t seed) {
          sl::SubgroupAnalysis a;
          {
            py::gil_scoped_release release;
            a = sl::analyze_subgroups(train, test, sl::WeightScheme::parse(scheme), opts, seed);
          }
          py::list rows;
          for (const auto& r : a.rows) {
            py::dict d;
            d["removal_type"] = r.removal_type;
            d["all_pct"] = r.all_pct;
            d["group_pct"] = r.group_pct;
            d["coef_removed"] = r.coef_removed;
            rows.append(d);
          }
          return rows;
        },
        py::arg("train"), py::arg("test"), py::arg("scheme") = "sqrt_third",
        py::arg("options") = sl::LassoOptions{}, py::arg("seed") = 0);
}
