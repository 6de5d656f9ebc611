#pragma once

// Named experiments: each turns a RunConfig into CSV tables and text files.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "purify/config.hpp"
#include "purify/csv.hpp"

namespace purify {

struct ExperimentOutput {
    struct Table {
        std::string filename;
        std::string units;
        CsvTable table;
    };
    std::vector<Table> tables;
    /// (filename, contents) of non-CSV outputs.
    std::vector<std::pair<std::string, std::string>> texts;

    const CsvTable& table(const std::string& filename) const;
};

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);

/// Computes an experiment without touching the file system.
ExperimentOutput build_experiment(const std::string& name, const RunConfig& config);

/// Writes the outputs of build_experiment into `out_dir` (created if needed)
/// and returns the written paths.
std::vector<std::filesystem::path> run_experiment(const std::string& name, const RunConfig& config,
                                                  const std::filesystem::path& out_dir);

/// `purify_run <experiment> --config <path> [--seed N] [--out DIR]`.
/// Returns 0 on success, 1 on configuration errors, 2 on runtime errors.
int run_cli(int argc, const char* const* argv);

}  // namespace purify
