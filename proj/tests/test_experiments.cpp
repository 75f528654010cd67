#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "trapfk/experiments.hpp"

using namespace trapfk;
using nlohmann::json;

TEST(Catalog, NamesAreUniqueAndCoverTheSuite) {
  std::set<std::string> names;
  for (const auto& e : experiment_catalog()) EXPECT_TRUE(names.insert(e.name).second) << e.name;
  for (const char* n : {"env-tail", "walk-basics", "clock-marginal", "fk-charfn", "fk-selfsim", "aging",
                        "coarse-lemma21", "coarse-lemma24", "displacement", "green-free", "green-ball",
                        "hitting-bounds", "fd-limit", "ctrw-compare"}) {
    EXPECT_TRUE(names.count(n)) << n;
  }
}

TEST(Catalog, DefaultsPassTheirOwnValidation) {
  for (const auto& e : experiment_catalog()) EXPECT_NO_THROW(resolve_params(e, json::object())) << e.name;
}

TEST(Params, UnknownExperimentAndKeyAreUsageErrors) {
  EXPECT_THROW(find_experiment("nope"), UsageError);
  const auto& def = find_experiment("fk-charfn");
  EXPECT_THROW(resolve_params(def, json{{"bogus", 1}}), UsageError);
  EXPECT_THROW(resolve_params(def, json{{"alpha", "half"}}), UsageError);
  EXPECT_THROW(resolve_params(def, json::array()), UsageError);
}

TEST(Params, PreconditionsAreCheckedBeforeWork) {
  EXPECT_THROW(resolve_params(find_experiment("fk-charfn"), json{{"alpha", 1.5}}), UsageError);
  EXPECT_THROW(resolve_params(find_experiment("green-free"), json{{"dims", {2}}}), UsageError);
  EXPECT_THROW(resolve_params(find_experiment("aging"), json{{"mode", "sideways"}}), UsageError);
  EXPECT_THROW(resolve_params(find_experiment("fk-charfn"), json{{"paths", 0}}), UsageError);
}

TEST(Params, OverridesAreApplied) {
  const auto p = resolve_params(find_experiment("fk-charfn"), json{{"paths", 500}});
  EXPECT_EQ(p["paths"], 500);
  EXPECT_EQ(p["alpha"], 0.5);
}

TEST(Csv, FormatsAndQuotes) {
  Csv c({"a", "b", "c"});
  c.row(1, 0.5, std::string("x,y"));
  c.row(std::size_t{2}, std::nan(""), "q\"q");
  EXPECT_EQ(c.str(), "a,b,c\n1,0.5,\"x,y\"\n2,nan,\"q\"\"q\"\n");
  EXPECT_THROW(c.row(1, 2), InputError);
}

TEST(Svg, RendersDeterministically) {
  SvgPlot p("t", "x", "y");
  p.log_x().add("s", {1, 10, 100}, {1, 2, 3}, SeriesStyle::points);
  const std::vector<double> sample{0.1, 0.5, 0.2};
  p.add_ecdf("e", sample);
  const auto a = p.render();
  EXPECT_EQ(a, p.render());
  EXPECT_NE(a.find("<svg"), std::string::npos);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_THROW(p.add("bad", {1, 2}, {1}), InputError);
}

TEST(Run, GreenFreeReportsWatsonBracket) {
  const auto rep = run_experiment("green-free", json{{"dims", {3}}}, 1, 1);
  EXPECT_TRUE(rep.passed());
  const auto j = rep.to_json();
  EXPECT_EQ(j["experiment"], "green-free");
  EXPECT_TRUE(j.contains("seed_provenance"));
  EXPECT_TRUE(j.contains("constants"));
  bool found = false;
  for (const auto& row : rep.output.rows) {
    if (row.statistic.find("Watson") != std::string::npos) {
      found = true;
      EXPECT_TRUE(row.pass);
      EXPECT_LE(row.lower, 1.516386);
      EXPECT_GE(row.upper, 1.516386);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Run, FkCharfnReportsTheMittagLefflerTarget) {
  const auto rep = run_experiment("fk-charfn", json{{"paths", 2000}, {"xi2", {2.0}}}, 1, 1);
  bool found = false;
  for (const auto& row : rep.output.rows) {
    if (row.comparison == Comparison::se_within) {
      found = true;
      EXPECT_NEAR(row.target, 0.42758, 5e-6);
    }
  }
  EXPECT_TRUE(found);
}

// Cheap configurations of the sampling experiments; outputs must not depend on threads.
TEST(Run, CsvOutputsIndependentOfThreadCount) {
  const std::vector<std::pair<std::string, json>> cases{
      {"subordinator-laplace", {{"draws", 3000}}},
      {"fk-charfn", {{"paths", 1500}}},
      {"fk-selfsim", {{"paths", 800}}},
      {"env-tail", {{"box_radius", 8}, {"hill_k", 100}}},
      {"ctrw-compare", {{"samples", 300}, {"N", 1e4}}},
      {"green-ball", {{"radii", {4.0, 6.0, 8.0}}}},
  };
  for (const auto& [name, params] : cases) {
    const auto a = run_experiment(name, params, 5, 1);
    const auto b = run_experiment(name, params, 5, 3);
    ASSERT_FALSE(a.output.csv.empty()) << name;
    EXPECT_EQ(a.output.csv, b.output.csv) << name;
    EXPECT_EQ(a.output.svg, b.output.svg) << name;
  }
}

TEST(Run, DifferentSeedsGiveDifferentSamples) {
  const json p{{"draws", 2000}};
  const auto a = run_experiment("subordinator-laplace", p, 1, 1);
  const auto b = run_experiment("subordinator-laplace", p, 2, 1);
  EXPECT_NE(a.output.csv, b.output.csv);
}

TEST(Run, WriteRunProducesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "trapfk_write_run_test";
  std::filesystem::remove_all(dir);
  const auto rep = run_experiment("green-free", json::object(), 1, 1);
  const auto files = write_run(rep, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  std::ifstream in(dir / "report.json");
  const auto j = json::parse(in);
  EXPECT_EQ(j["passed"], true);
  EXPECT_EQ(files.size(), rep.output.csv.size() + rep.output.svg.size() + 1);
  std::filesystem::remove_all(dir);
}

#ifdef TRAPFK_CLI_PATH
namespace {
int cli(const std::string& args) {
  const std::string cmd = std::string(TRAPFK_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}
}  // namespace

TEST(Cli, ExitCodes) {
  const auto out = std::filesystem::temp_directory_path() / "trapfk_cli_test_out";
  EXPECT_EQ(cli("list"), 0);
  EXPECT_EQ(cli("list --json"), 0);
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("run no-such-experiment"), 2);
  EXPECT_EQ(cli("run green-free --out " + out.string()), 0);
  EXPECT_TRUE(std::filesystem::exists(out / "report.json"));

  const auto bad_key = write_temp("trapfk_bad_key.json", R"({"params": {"nope": 1}})");
  EXPECT_EQ(cli("run green-free --config " + bad_key.string() + " --out " + out.string()), 2);
  const auto bad_top = write_temp("trapfk_bad_top.json", R"({"seed": 3})");
  EXPECT_EQ(cli("run green-free --config " + bad_top.string() + " --out " + out.string()), 2);
  const auto bad_json = write_temp("trapfk_bad_json.json", "{");
  EXPECT_EQ(cli("run green-free --config " + bad_json.string() + " --out " + out.string()), 2);
  const auto bad_alpha = write_temp("trapfk_bad_alpha.json", R"({"params": {"alpha": 2}})");
  EXPECT_EQ(cli("run fk-charfn --config " + bad_alpha.string() + " --out " + out.string()), 2);

  // A tolerance nobody can meet is a statistical failure, not a usage error.
  const auto strict = write_temp("trapfk_strict.json",
                                 R"({"master_seed": 3, "params": {"draws": 2000, "se_multiple": 1e-9}})");
  EXPECT_EQ(cli("run subordinator-laplace --config " + strict.string() + " --out " + out.string()), 1);
  std::filesystem::remove_all(out);
}
#endif
