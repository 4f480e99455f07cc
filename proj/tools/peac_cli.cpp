#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "peac/peac.h"

namespace {

struct Flags {
  std::string config;
  std::string data;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<int> threads;
  std::optional<int> bootstrap;
};

int run(int (*command)(const peac_run_options*), const Flags& f, const std::string& command_line) {
  peac_run_options opt;
  peac_run_options_init(&opt);
  opt.config_path = f.config.empty() ? nullptr : f.config.c_str();
  opt.data_path = f.data.empty() ? nullptr : f.data.c_str();
  opt.out_dir = f.out.c_str();
  if (f.seed) {
    opt.has_seed = 1;
    opt.seed = *f.seed;
  }
  opt.method = f.method ? f.method->c_str() : nullptr;
  opt.threads = f.threads.value_or(-1);
  opt.bootstrap = f.bootstrap.value_or(-1);
  opt.command_line = command_line.c_str();

  const int status = command(&opt);
  if (status != PEAC_OK) {
    std::fprintf(stderr, "peac: %s: %s\n", peac_status_string(status), peac_last_error());
    return status;
  }
  std::printf("wrote %s\n", f.out.c_str());
  return PEAC_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase estimation from amplitude collapse and ellipse fitting"};
  app.set_version_flag("--version", std::string(peac_version()));
  app.require_subcommand(1);

  std::string command_line;
  for (int i = 0; i < argc; ++i) command_line += (i ? " " : "") + std::string(argv[i]);

  Flags f;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output directory")->required();
  };

  auto* simulate = app.add_subcommand("simulate", "Generate synthetic interferometer datasets");
  common(simulate);
  simulate->add_option("--seed", f.seed, "Override the configured seed");

  auto* estimate = app.add_subcommand("estimate", "Reconstruct theta(T) and a_ext from a dataset");
  common(estimate);
  estimate->add_option("--data", f.data, "Dataset CSV (T_s,scan_index,repetition,channel,value)")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--method", f.method, "peac, ellipse or both")
      ->check(CLI::IsMember({"peac", "ellipse", "both"}));
  estimate->add_option("--seed", f.seed, "Bootstrap seed");
  estimate->add_option("--threads", f.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  estimate->add_option("--bootstrap", f.bootstrap, "Bootstrap resamples per T (0 disables)")
      ->check(CLI::NonNegativeNumber);

  auto* benchmark = app.add_subcommand("benchmark", "Bias and precision curves of both estimators");
  common(benchmark);
  benchmark->add_option("--seed", f.seed, "Override the configured seed");
  benchmark->add_option("--threads", f.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  auto* gamma = app.add_subcommand("gamma-fit", "Fit the finite-pulse coefficient gamma");
  common(gamma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : PEAC_ERR_CONFIG;
  }

  if (simulate->parsed()) return run(peac_run_simulate, f, command_line);
  if (estimate->parsed()) return run(peac_run_estimate, f, command_line);
  if (benchmark->parsed()) return run(peac_run_benchmark, f, command_line);
  return run(peac_run_gamma_fit, f, command_line);
}
