// trapfk: run the simulation experiments from the command line.
//
//   trapfk list [--json]
//   trapfk run <experiment> [--config file.json] [--seed S] [--threads T] [--out DIR]
//
// Exit status: 0 all tolerances met, 1 statistical failure, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trapfk/experiments.hpp"

namespace {

using nlohmann::json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw trapfk::UsageError("cannot open config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::parse_error& e) {
    throw trapfk::UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw trapfk::UsageError("config file must hold a JSON object");
  for (const auto& [k, _] : cfg.items()) {
    if (k != "experiment" && k != "master_seed" && k != "threads" && k != "params")
      throw trapfk::UsageError("unknown config key '" + k + "' (allowed: experiment, master_seed, threads, params)");
  }
  return cfg;
}

void print_list(bool as_json) {
  if (as_json) {
    json all = json::array();
    for (const auto& e : trapfk::experiment_catalog()) {
      json ps = json::array();
      for (const auto& p : e.params)
        ps.push_back({{"name", p.name}, {"default", p.default_value}, {"description", p.description}});
      all.push_back({{"experiment", e.name}, {"summary", e.summary}, {"params", ps}});
    }
    std::cout << all.dump(2) << "\n";
    return;
  }
  for (const auto& e : trapfk::experiment_catalog()) {
    std::cout << e.name << "\n    " << e.summary << "\n";
    for (const auto& p : e.params)
      std::cout << "      " << p.name << " = " << p.default_value.dump() << "    " << p.description << "\n";
    std::cout << "\n";
  }
}

std::string capacity_hint(const std::string& experiment) {
  if (experiment == "green-ball" || experiment == "hitting-bounds")
    return "use smaller radii; the exact ball solve stores the whole ball";
  return "reduce n, the radius, or the replica count";
}

int run(const std::string& name, const std::optional<std::string>& config_path, std::optional<std::uint64_t> seed,
        std::optional<unsigned> threads, const std::string& out_dir) {
  json cfg = config_path ? load_config(*config_path) : json::object();
  if (cfg.contains("experiment") && cfg["experiment"] != name)
    throw trapfk::UsageError("config is for experiment " + cfg["experiment"].dump() + ", not '" + name + "'");

  std::uint64_t master = 1;
  if (cfg.contains("master_seed")) {
    if (!cfg["master_seed"].is_number_unsigned()) throw trapfk::UsageError("master_seed must be a nonnegative integer");
    master = cfg["master_seed"].get<std::uint64_t>();
  }
  if (seed) master = *seed;

  unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
  if (cfg.contains("threads")) {
    if (!cfg["threads"].is_number_unsigned() || cfg["threads"].get<unsigned>() == 0)
      throw trapfk::UsageError("threads must be a positive integer");
    nthreads = cfg["threads"].get<unsigned>();
  }
  if (threads) nthreads = *threads;

  const json params = cfg.contains("params") ? cfg["params"] : json::object();

  trapfk::RunReport rep;
  try {
    rep = trapfk::run_experiment(name, params, master, nthreads);
  } catch (const trapfk::CapacityError& e) {
    std::cerr << "trapfk: " << e.what() << "\n  hint: " << capacity_hint(name) << "\n";
    return kUsage;
  }

  std::cout << name << " (master_seed " << master << ", " << rep.threads << " thread" << (rep.threads == 1 ? "" : "s")
            << ", " << rep.wall_seconds << " s)\n";
  for (const auto& row : rep.output.rows) std::cout << "  " << row.verdict_line() << "\n";
  const auto files = trapfk::write_run(rep, out_dir);
  std::cout << "wrote " << files.size() << " files to " << out_dir << "\n";
  std::cout << (rep.passed() ? "PASS" : "FAIL") << "\n";
  return rep.passed() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trap-model and fractional-kinetics simulation experiments"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List experiments and their parameters");
  bool list_json = false;
  list->add_flag("--json", list_json, "Print the parameter schemas as JSON");

  auto* runc = app.add_subcommand("run", "Run one experiment");
  std::string name;
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  runc->add_option("experiment", name, "Experiment name (see 'list')")->required();
  runc->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
  runc->add_option("--seed", seed, "Master seed (overrides the config)");
  runc->add_option("--threads", threads, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  runc->add_option("--out", out, "Output directory (default: out/<experiment>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*list) {
      print_list(list_json);
      return kPass;
    }
    if (out.empty()) out = "out/" + name;
    return run(name, config, seed, threads, out);
  } catch (const trapfk::UsageError& e) {
    std::cerr << "trapfk: usage error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    std::cerr << "trapfk: usage error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "trapfk: " << e.what() << "\n";
  }
  return kUsage;
}
