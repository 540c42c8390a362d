#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "shared_lasso/error.hpp"
#include "shared_lasso/io.hpp"
#include "tempdir.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string err;
};

/// Runs the CLI with stdout and stderr captured to files in `dir`.
Run cli(const fixtures::TempDir& dir, const std::string& args) {
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + SHARED_LASSO_CLI_PATH + "\" " + args + " >\"" +
                          (dir / "stdout.txt").string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = fixtures::read_file(err);
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t count(const std::string& s, char c) {
  std::size_t n = 0;
  for (char x : s) n += x == c;
  return n;
}

}  // namespace

TEST_CASE("cli end to end on synthetic data") {
  fixtures::TempDir dir;
  const auto d = (dir / "data").string();
  REQUIRE(cli(dir, "--seed 3 synth --groups 30,30 --features 15 --out " + d).code == 0);
  CHECK(fs::exists(dir / "data/truth.json"));
  CHECK(shared_lasso::io::read_json(dir / "data/manifest.json")["command"] == "synth");

  SUBCASE("fit writes the fit and an MSE table") {
    const auto out = dir / "fit";
    REQUIRE(cli(dir, "fit --data " + d + " --model dsl --weights sqrt_third --out " + out.string()).code == 0);
    const auto rows = lines(fixtures::read_file(out / "mse.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "model,weights,all,g1,g2");
    CHECK(count(rows[1], ',') == 4);
    const auto fit = shared_lasso::io::dsl_fit_from_json(shared_lasso::io::read_json(out / "fit_dsl_sqrt_third.json"));
    CHECK(fit.group_names == std::vector<std::string>{"g1", "g2"});
    CHECK(fit.r[0] == doctest::Approx(std::sqrt(1.0 / 3.0)));

    SUBCASE("denoise on the saved fit") {
      const auto dn = dir / "denoise";
      REQUIRE(cli(dir, "denoise --fit " + (out / "fit_dsl_sqrt_third.json").string() + " --data " + d +
                           " --out " + dn.string()).code == 0);
      const auto sweep = lines(fixtures::read_file(dn / "sweep.csv"));
      CHECK(sweep.size() == 101);
      CHECK(sweep[0] == "gamma,threshold,mse");
      const auto summary = shared_lasso::io::read_json(dn / "summary.json");
      CHECK(summary["n"] == 60);
      CHECK(cli(dir, "denoise --fit " + (out / "fit_dsl_sqrt_third.json").string() + " --data " + d +
                         " --sigma nope --out " + dn.string()).code == shared_lasso::kExitConfig);
    }
  }
  SUBCASE("weights summing to at most one warn") {
    const auto r = cli(dir, "fit --data " + d + " --model dsl --weights custom:0.3,0.3 --out " +
                                (dir / "f2").string());
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
  }
  SUBCASE("report covers every built-in scheme") {
    REQUIRE(cli(dir, "report --data " + d + " --out " + (dir / "rep").string()).code == 0);
    const auto rows = lines(fixtures::read_file(dir / "rep/mse.csv"));
    REQUIRE(rows.size() == 11);
    CHECK(rows[1].rfind("pooled,", 0) == 0);
    CHECK(rows[2].rfind("separate,", 0) == 0);
    for (std::size_t k = 3; k < rows.size(); ++k) CHECK(rows[k].rfind("dsl,", 0) == 0);
  }
  SUBCASE("bootstrap is reproducible") {
    const std::string args = "--seed 5 bootstrap --data " + d + " -B 2 --out ";
    REQUIRE(cli(dir, args + (dir / "b1").string()).code == 0);
    REQUIRE(cli(dir, args + (dir / "b2").string()).code == 0);
    for (const char* f : {"stability_g1.tsv", "stability_g2.tsv", "union.txt", "reduction_mse.csv"})
      CHECK(fixtures::read_file(dir / "b1" / f) == fixtures::read_file(dir / "b2" / f));
    const auto rows = lines(fixtures::read_file(dir / "b1/stability_g1.tsv"));
    for (std::size_t k = 1; k < rows.size(); ++k) {
      std::istringstream in(rows[k]);
      std::string id, token, c;
      std::getline(in, id, '\t');
      std::getline(in, token, '\t');
      std::getline(in, c, '\t');
      CHECK(std::stoi(c) >= 1);
      CHECK(std::stoi(c) <= 2);
    }
    CHECK(fs::exists(dir / "b1/reduced/groups.txt"));
  }
  SUBCASE("subgroups writes removal rows and venn counts") {
    REQUIRE(cli(dir, "subgroups --data " + d + " --out " + (dir / "sg").string()).code == 0);
    const auto rows = lines(fixtures::read_file(dir / "sg/removal.csv"));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "penalty,removal_type,all_pct,g1_pct,g2_pct,coef_removed");
    CHECK(rows[1] == "sqrt_third,no removal,0,0,0,0");
    const auto venn = shared_lasso::io::read_json(dir / "sg/venn_sqrt_third.json");
    CHECK(venn["sets"].size() == 3);
  }
  SUBCASE("error exit codes") {
    CHECK(cli(dir, "fit --data " + (dir / "missing").string() + " --out " + (dir / "x").string()).code ==
          shared_lasso::kExitData);
    CHECK(cli(dir, "fit --data " + d + " --model nope --out " + (dir / "x").string()).code ==
          shared_lasso::kExitConfig);
    CHECK(cli(dir, "fit --out " + (dir / "x").string()).code == shared_lasso::kExitConfig);
    CHECK(cli(dir, "bootstrap --data " + d + " --mode nope --out " + (dir / "x").string()).code ==
          shared_lasso::kExitConfig);
    CHECK(cli(dir, "--help").code == 0);
  }
}

TEST_CASE("cli featurize on a toy corpus") {
  fixtures::TempDir dir;
  fixtures::write_toy_corpus(dir / "corpus");
  const auto corpus = (dir / "corpus").string();

  SUBCASE("ungrouped") {
    REQUIRE(cli(dir, "featurize --corpus " + corpus + " --min-df 1 --out " + (dir / "fz").string()).code == 0);
    const auto train = lines(fixtures::read_file(dir / "fz/train/labels.csv"));
    const auto test = lines(fixtures::read_file(dir / "fz/test/labels.csv"));
    CHECK(train.size() - 1 + test.size() - 1 == 6);
    CHECK(lines(fixtures::read_file(dir / "fz/groups.txt")) == std::vector<std::string>{"all"});
    const auto manifest = shared_lasso::io::read_json(dir / "fz/manifest.json");
    CHECK(manifest["command"] == "featurize");
    CHECK(manifest["penalty_convention"] == "per-n");
    CHECK(manifest.contains("tokenizer_version"));
    const auto data = shared_lasso::io::read_data_dir(dir / "fz");
    CHECK(data.tokens.size() == data.train.n_features());
  }
  SUBCASE("grouped by genre priority") {
    REQUIRE(cli(dir, "featurize --corpus " + corpus + " --grouped --genres " + corpus +
                         "/genres.tsv --priority drama,comedy --min-df 1 --out " + (dir / "g").string())
                .code == 0);
    CHECK(lines(fixtures::read_file(dir / "g/groups.txt")) == std::vector<std::string>{"drama", "comedy"});
  }
  SUBCASE("grouping without genres names the missing flag") {
    const auto r = cli(dir, "featurize --corpus " + corpus + " --grouped --out " + (dir / "x").string());
    CHECK(r.code == shared_lasso::kExitConfig);
    CHECK(r.err.find("--genres") != std::string::npos);
  }
}
