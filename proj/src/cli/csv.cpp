#include "purify/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "purify/config.hpp"

namespace purify {

std::string format_cell(const CsvCell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) {
        if (std::isnan(*d)) return "nan";
        if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.11e", *d);
        return buf;
    }
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    return std::get<std::string>(cell);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("a CSV table needs at least one column");
}

void CsvTable::add_row(std::vector<CsvCell> row) {
    if (row.size() != columns_.size()) {
        throw std::invalid_argument("row has " + std::to_string(row.size()) + " cells, expected " +
                                    std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(row));
}

void CsvTable::note(const std::string& key, const std::string& value) { notes_.emplace_back(key, value); }

std::string provenance_block(const std::string& experiment, const RunConfig& config, const std::string& units) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config.hash()));
    std::string out;
    out += "# purify_run output\n";
    out += "# experiment: " + experiment + "\n";
    out += "# format_version: " + std::to_string(csv_format_version) + "\n";
    out += "# seed: " + std::to_string(config.seed) + "\n";
    out += "# config_hash: fnv1a64:" + std::string(hash) + "\n";
    out += "# entropy_log_base: e (nats)\n";
    out += "# units: " + units + "\n";
    for (const auto& [key, value] : config.entries()) out += "# config " + key + " = " + value + "\n";
    return out;
}

std::string CsvTable::render(const std::string& experiment, const RunConfig& config, const std::string& units) const {
    std::string out = provenance_block(experiment, config, units);
    for (const auto& [key, value] : notes_) out += "# " + key + ": " + value + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path, const std::string& experiment, const RunConfig& config,
                     const std::string& units) const {
    write_text_file(path, render(experiment, config, units));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace purify
