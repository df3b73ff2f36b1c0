#pragma once

#include "schrodlab/fit.hpp"
#include "schrodlab/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace schrodlab {

enum ExitCode { kExitPass = 0, kExitRefused = 1, kExitFailed = 2 };

const std::vector<std::string>& experiment_kinds();

// Checks keys, types and ranges and fills defaults. Symbol paths are resolved
// against base_dir and replaced by the parsed symbol. Throws ConfigError.
json validate_config(const std::string& kind, const json& raw, const std::string& base_dir);

struct ExperimentOutput {
    std::string kind;
    bool pass = false;
    json summary; // deterministic given config and seed
    std::vector<std::pair<std::string, CsvTable>> tables;
    json plot;    // which CSV columns to draw
};

// cfg must come from validate_config.
ExperimentOutput run_experiment(const std::string& kind, const json& cfg);

// summary.json, metadata.json, plot.json and the CSV tables, each written atomically.
void write_outputs(const ExperimentOutput& out, const std::string& dir, const json& metadata);

struct RunOptions {
    std::string config_path; // empty: defaults (suite only)
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

// Full CLI flow; returns the process exit code.
int run_command(const std::string& kind, const RunOptions& opt, std::ostream& out, std::ostream& err);

json fit_to_json(const DecayFit& f);

} // namespace schrodlab
