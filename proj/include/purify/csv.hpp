#pragma once

// CSV output with a `#` provenance block.
//
// Numbers are written in scientific notation with 12 significant digits,
// integers and labels verbatim. Nothing time- or host-dependent is written,
// so identical inputs give byte-identical files.

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace purify {

struct RunConfig;

using CsvCell = std::variant<double, long long, std::string>;

std::string format_cell(const CsvCell& cell);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<CsvCell>>& rows() const { return rows_; }

    void add_row(std::vector<CsvCell> row);
    /// Extra `# key: value` line after the provenance block.
    void note(const std::string& key, const std::string& value);

    /// Header block, column line, rows.
    std::string render(const std::string& experiment, const RunConfig& config, const std::string& units) const;

    /// Writes render() to `path`; throws std::runtime_error on I/O failure.
    void write(const std::filesystem::path& path, const std::string& experiment, const RunConfig& config,
               const std::string& units) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<CsvCell>> rows_;
    std::vector<std::pair<std::string, std::string>> notes_;
};

inline constexpr int csv_format_version = 1;

/// Provenance lines shared by every output file (each ends in '\n').
std::string provenance_block(const std::string& experiment, const RunConfig& config, const std::string& units);

/// Writes `text` to `path`, replacing any existing file.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace purify
