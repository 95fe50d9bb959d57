#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace semiflow::lab {

struct Verdict {
    std::string name;
    bool pass;
    std::string detail;
};

struct Table {
    std::string name;  // file stem; written as <name>.csv
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct RunReport {
    std::string experiment;
    std::string subcommand;
    std::string config_digest;  // sha256 of the config file bytes
    std::uint64_t seed = 0;
    std::vector<Verdict> verdicts;
    std::vector<Table> tables;
    nlohmann::json summary = nlohmann::json::object();
    std::string error_kind;  // empty unless the run raised
    std::string error_message;
    double wall_clock = 0.0;

    bool passed() const;
};

const std::vector<std::string>& subcommands();

/// Runs one experiment and writes report.json, metadata.json and the CSV
/// tables into out_dir. Errors raised by the library are captured in the
/// report rather than propagated.
RunReport run(const std::string& subcommand, const std::filesystem::path& config,
              const std::filesystem::path& out_dir, std::uint64_t seed = 0);

/// Same, from an already parsed configuration (no files written).
RunReport run_config(const std::string& subcommand, const nlohmann::json& config, std::uint64_t seed = 0);

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);

/// Exit status for a report: 0 pass, 1 failed verdicts, 2 error.
int exit_code(const RunReport& report);

}  // namespace semiflow::lab
