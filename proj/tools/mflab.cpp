// Command-line front end for the experiment runners.
//
//   mflab <subcommand> [--config PATH] [--out DIR] [--seeds a..b] [--workers N]
//
// Exit status: 0 when every verdict passes, 1 when any fails, 2 on usage or
// configuration errors.

#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "mflab/config.hpp"
#include "mflab/experiments.hpp"

namespace ex = mflab::experiments;

namespace {

struct Subcommand {
  const char* name;
  const char* kind;
  const char* help;
  std::function<ex::Report(const mflab::config::Config&)> run;
};

const Subcommand kSubcommands[] = {
    {"graph-stats", "graph_stats", "generate a graph, write it and its degree statistics",
     ex::run_graph_stats},
    {"simulate", "simulate", "integrate the particle system and write trajectories",
     ex::run_simulate},
    {"fokker-planck", "fp_rates",
     "density solver checks: linear rates, fixed points, stationary profile, linearized fluctuations",
     [](const auto& c) -> ex::Report { return ex::run_fp_rates(c); }},
    {"couple", "couple", "coupled particle and nonlinear-diffusion runs, u_t against the bound",
     ex::run_couple},
    {"escape", "escape", "escape from the flat state on the complete graph",
     [](const auto& c) -> ex::Report { return ex::run_escape(c); }},
    {"two-clique", "two_clique", "two disjoint cliques from a flat start",
     [](const auto& c) -> ex::Report { return ex::run_two_clique(c); }},
    {"proximity", "proximity_sweep", "u_t and d_bL estimates across system sizes",
     [](const auto& c) -> ex::Report { return ex::run_proximity_sweep(c); }},
    {"degree-tails", "degree_tails", "degree concentration of Erdos-Renyi graphs",
     [](const auto& c) -> ex::Report { return ex::run_degree_tails(c); }},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field interacting diffusions on graphs"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  int workers = -1;
  app.add_option("--config", config_path, "experiment config file (INI)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory for CSV files and report.json");
  app.add_option("--seeds", seeds, "seed range a..b");
  app.add_option("--workers", workers, "worker threads (0: all available)")->check(CLI::NonNegativeNumber);

  std::map<CLI::App*, const Subcommand*> table;
  for (const auto& sub : kSubcommands) {
    auto* cmd = app.add_subcommand(sub.name, sub.help);
    cmd->fallthrough();
    table[cmd] = &sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Subcommand* chosen = nullptr;
  for (const auto& [cmd, sub] : table) {
    if (cmd->parsed()) chosen = sub;
  }

  try {
    auto cfg = config_path.empty() ? mflab::config::Config{}
                                   : mflab::config::Config::load(config_path);
    const std::string kind = cfg.text("experiment", "kind", chosen->kind);
    if (kind != chosen->kind) {
      std::cerr << "error: config is for '" << kind << "', not '" << chosen->name << "'\n";
      return 2;
    }
    if (!out_dir.empty()) cfg.set("experiment", "out", out_dir);
    if (!seeds.empty()) {
      mflab::config::parse_seeds(seeds);
      cfg.set("experiment", "seeds", seeds);
    }
    if (workers >= 0) cfg.set("experiment", "workers", std::to_string(workers));

    const ex::Report report = chosen->run(cfg);
    std::cout << "experiment " << report.experiment << "  config " << report.config_hash << '\n';
    for (const auto& v : report.verdicts) {
      std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << "  " << v.detail << '\n';
    }
    return report.passed() ? 0 : 1;
  } catch (const mflab::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
