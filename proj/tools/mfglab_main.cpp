#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mfglab/errors.hpp"
#include "mfglab/runner.hpp"
#include "mfglab/scenario.hpp"

// Command-line front end. One subcommand per scenario kind plus `sweep`;
// each reads an INI-style config, runs it, and writes diagnostics.csv,
// final_state.json and manifest.json into the output directory.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 other error or a sweep with failed runs.

namespace {

struct Options {
  std::string config;
  std::string out;
  std::int64_t seed = 0;
  bool quiet = false;
};

int run_command(const std::string& command, const Options& opt,
                bool seed_given) {
  const bool is_sweep = command == "sweep";
  mfg::Scenario s =
      mfg::parse_config_file(opt.config, is_sweep ? "" : command);
  if (!opt.out.empty()) s.output_dir = opt.out;
  if (seed_given) {
    if (opt.seed < 0) throw mfg::ConfigError("--seed must be nonnegative");
    s.seed = static_cast<std::uint64_t>(opt.seed);
  }

  if (is_sweep) {
    if (!s.has_sweep) {
      throw mfg::ConfigError(
          "the sweep command needs a [sweep] section with axis and values");
    }
    const mfg::SweepResult result =
        mfg::sweep(s, s.sweep_axis, s.sweep_values);
    if (!opt.quiet) {
      for (const mfg::SweepRun& r : result.runs) {
        if (r.ok) {
          std::printf("%s = %s: ok (%s)\n", s.sweep_axis.c_str(),
                      mfg::format_double(r.value).c_str(),
                      r.directory.c_str());
        } else {
          std::printf("%s = %s: failed: %s\n", s.sweep_axis.c_str(),
                      mfg::format_double(r.value).c_str(), r.error.c_str());
        }
      }
      std::printf("aggregate: %s\n", result.aggregate_path.c_str());
    }
    return result.partial_failure ? 4 : 0;
  }

  const mfg::RunManifest man = mfg::run_scenario(s);
  if (!opt.quiet) {
    std::printf("scenario \"%s\" (%s): %zu files in %s, %.3f s\n",
                man.scenario_name.c_str(), man.kind.c_str(),
                man.files.size(), man.directory.c_str(), man.wall_seconds);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenario runner for the mean-field alignment laboratory"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"equilibrium", "solve the self-consistent equilibrium"},
      {"homogeneous", "run the space-homogeneous relaxation dynamics"},
      {"particles", "simulate the interacting agent ensemble"},
      {"kinetic", "run the space-inhomogeneous kinetic dynamics"},
      {"macro", "run the macroscopic transport system"},
      {"phase-sweep", "tabulate the alignment transition over noise levels"},
      {"closure-compare", "compare kinetic runs against the closure"},
      {"sweep", "run a scenario once per value of a swept parameter"},
  };

  Options opt;
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", opt.config, "scenario config file")
        ->required();
    sub->add_option("--out", opt.out, "output directory override");
    sub->add_option("--seed", opt.seed, "seed override");
    sub->add_flag("--quiet", opt.quiet, "suppress status output");
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  try {
    return run_command(sub->get_name(), opt,
                       sub->count("--seed") > 0);
  } catch (const mfg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const mfg::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
