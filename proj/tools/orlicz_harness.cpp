#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "orlicz/cli/config.hpp"
#include "orlicz/cli/run.hpp"

int main(int argc, char** argv) {
  using namespace orlicz::cli;
  CLI::App app{"Orlicz-norm Markov/Bernstein inequality harness"};
  std::string config_path, out_path, format_text;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  app.add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "output path ('-' for stdout)");
  app.add_option("--format", format_text, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--seed", seed, "seed for random generators");
  app.add_flag("--verbose", verbose, "print the effective config and diagnostics to stderr");
  app.set_version_flag("--version", kToolVersion);
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path);
  std::stringstream text;
  text << in.rdbuf();

  Overrides ov;
  ov.seed = seed;
  if (!format_text.empty()) ov.format = parse_format(format_text);
  if (!out_path.empty()) ov.out_path = out_path;
  const auto base = std::filesystem::path(config_path).parent_path().string();
  const ParseResult parsed = parse_config(text.str(), base.empty() ? "." : base, ov);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors)
      std::cerr << config_path << (e.line ? ":" + std::to_string(e.line) : std::string()) << ": "
                << e.message << "\n";
    return kExitError;
  }
  const ExperimentConfig& cfg = *parsed.config;
  if (verbose)
    for (const auto& [k, v] : cfg.echo) std::cerr << k << " = " << v << "\n";

  const ReportEnvelope env = run(cfg);
  try {
    emit(env, cfg.format, cfg.out_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitError;
  }
  for (const auto& m : env.messages) std::cerr << m << "\n";
  if (verbose) std::cerr << "exit code " << env.exit_code << "\n";
  return env.exit_code;
}
