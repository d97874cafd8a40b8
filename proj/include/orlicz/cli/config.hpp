#pragma once

// Experiment configuration: sectioned key = value text (grammar in
// docs/config.md).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/convex_transform.hpp"
#include "orlicz/function_model.hpp"
#include "orlicz/harness.hpp"
#include "orlicz/orlicz_norms.hpp"

namespace orlicz::cli {

enum class Command { norm, transform, markov_sweep, equivalence, rational, tail, extremal };
enum class OutputFormat { csv, json, both };

std::string command_name(Command c);
std::optional<Command> parse_command(const std::string& s);
std::string format_name(OutputFormat f);
std::optional<OutputFormat> parse_format(const std::string& s);

struct ConfigError {
  int line = 0;  // 0 when the problem is not tied to one line
  std::string message;
};

enum class Generator { none, polynomial, trig, rational, gap };

struct ExperimentConfig {
  Command command = Command::norm;

  // [phi]
  std::optional<PhiSpec> phi;

  // [function]
  std::optional<FunctionRep> function;
  std::string function_text;
  Generator generator = Generator::none;
  int generator_degree = 5;

  // [norm]
  NormSpec norm = NormSpec::lp(2.0);

  // [sweep]
  SweepFamily sweep_family = SweepFamily::jacobi22;
  int n_min = 2, n_max = 40;
  double bound_scale = 1.0;

  // [rational]
  std::vector<double> rational_a{0.5, 1.0, 4.0};
  std::vector<int> rational_r{1, 2, 3};
  std::string rational_mode = "orlicz";  // orlicz | lp
  double rational_p = 4.0;

  // [tail]
  std::vector<double> tail_s{0.3, 0.5};
  std::vector<int> tail_r{1, 2};
  double tail_m = 1.0;
  double tail_u_max = 1e3;

  // [extremal]
  int extremal_n = 5;
  int extremal_restarts = 4;
  int extremal_sweeps = 2;

  // [equivalence]
  std::uint64_t corpus_seed = 20240601;

  // [tolerances]
  QuadratureConfig quadrature{};

  std::optional<std::uint64_t> seed;
  std::string out_path;
  OutputFormat format = OutputFormat::csv;

  // Every effective setting, defaults included, as section.key -> text.
  std::map<std::string, std::string> echo;
};

// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<OutputFormat> format;
  std::optional<std::string> out_path;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return config.has_value(); }
};

// Collects every error instead of stopping at the first one. Relative file
// paths are resolved against base_dir.
ParseResult parse_config(const std::string& text, const std::string& base_dir = ".",
                         const Overrides& overrides = {});

std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace orlicz::cli
