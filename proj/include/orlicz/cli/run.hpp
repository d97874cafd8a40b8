#pragma once

// Experiment dispatch and report emission.

#include <string>
#include <vector>

#include <json.hpp>

#include "orlicz/cli/config.hpp"

namespace orlicz::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode { kExitOk = 0, kExitError = 1, kExitViolation = 2 };

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ReportEnvelope {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::string timestamp;  // not part of the byte-stable payload
  nlohmann::json constants = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  CsvTable csv;
  int exit_code = kExitOk;
  std::vector<std::string> messages;
};

// CSV headers, fixed per command.
const std::vector<std::string>& csv_header(Command c);

ReportEnvelope run(const ExperimentConfig& cfg);

std::string render_csv(const CsvTable& table);
std::string render_json(const ReportEnvelope& env, bool include_timestamp = true);

// path empty or "-" writes to stdout. With OutputFormat::both the path's
// extension is replaced by .csv and .json. Throws std::runtime_error on I/O
// failure.
void emit(const ReportEnvelope& env, OutputFormat format, const std::string& path);

}  // namespace orlicz::cli
