// Acceptance suite: every criterion runs the experiment with its default
// (acceptance) configuration and prints one PASS/FAIL line. Criterion 14
// reruns every experiment with a different thread count and compares the
// CSV outputs byte for byte.
//
// Usage: acceptance [master_seed] [threads]

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "trapfk/experiments.hpp"

namespace {

using trapfk::RunReport;

struct Criterion {
  int id;
  std::string title;
  std::string experiment;
};

const std::vector<Criterion> kCriteria{
    {1, "stable subordinator Laplace transform within 4 SE", "subordinator-laplace"},
    {2, "FK fixed-time characteristic function within 4 SE of E_alpha", "fk-charfn"},
    {3, "FK self-similarity, two-sample KS <= 0.02", "fk-selfsim"},
    {4, "aging: quadrature vs incomplete beta <= 1e-8; trap-model estimate within 0.03", "aging"},
    {5, "G_3(0) bracket width <= 2e-4 containing 1.5163860", "green-free"},
    {6, "killed Green's function decay slope in [-1.3, -0.7]", "green-ball"},
    {7, "hitting-probability sandwich and ratio identity to 1e-12", "hitting-bounds"},
    {8, "F_d limit identity within 2% at eps = 1e-4, M = 1e4", "fd-limit"},
    {9, "rescaled nonzero-score probability median in [0.75, 1.25]", "coarse-lemma21"},
    {10, "displacement Laplace functional within 0.05 of -1/6", "displacement"},
    {11, "score-sum discrepancy exceedance fraction < 0.1", "coarse-lemma24"},
    {12, "clock marginal S_N(1) vs V(1), KS <= 0.08", "clock-marginal"},
    {13, "CTRW vs FK fixed-time law, KS <= 0.05", "ctrw-compare"},
};

void print_rows(const RunReport& rep) {
  for (const auto& row : rep.output.rows) {
    if (row.gating() || !row.note.empty()) std::printf("      %s\n", row.verdict_line().c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const unsigned threads = argc > 2 ? static_cast<unsigned>(std::atoi(argv[2])) : trapfk::default_threads();
  const unsigned other_threads = threads == 1 ? 3 : 1;

  std::map<std::string, RunReport> runs;
  int failures = 0;

  for (const auto& c : kCriteria) {
    bool pass = false;
    std::string detail;
    try {
      const auto& rep = runs.emplace(c.experiment, trapfk::run_experiment(c.experiment, nullptr, seed, threads))
                            .first->second;
      pass = rep.passed();
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s, %.1f s", c.experiment.c_str(), rep.wall_seconds);
      detail = buf;
      std::printf("criterion %2d: %s: %s (%s)\n", c.id, pass ? "PASS" : "FAIL", c.title.c_str(), detail.c_str());
      print_rows(rep);
    } catch (const std::exception& e) {
      std::printf("criterion %2d: FAIL: %s (error: %s)\n", c.id, c.title.c_str(), e.what());
    }
    failures += !pass;
    std::fflush(stdout);
  }

  // Criterion 14: same master seed, different thread count, identical CSVs.
  bool identical = true;
  std::string mismatched;
  for (const auto& [name, first] : runs) {
    try {
      const auto again = trapfk::run_experiment(name, nullptr, seed, other_threads);
      if (again.output.csv != first.output.csv) {
        identical = false;
        mismatched += " " + name;
      }
    } catch (const std::exception& e) {
      identical = false;
      mismatched += " " + name + "(error: " + e.what() + ")";
    }
  }
  std::printf("criterion 14: %s: bitwise-identical CSVs with %u and %u threads for %zu experiments%s%s\n",
              identical ? "PASS" : "FAIL", threads, other_threads, runs.size(),
              mismatched.empty() ? "" : "; mismatched:", mismatched.c_str());
  failures += !identical;

  std::printf("\n%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
