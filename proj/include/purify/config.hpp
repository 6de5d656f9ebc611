#pragma once

// Run configuration: flat `key = value` text grouped under [section] headers.
//
//   # comment
//   [fig4]
//   mu_U = 0.5
//   points = 50
//
// Unknown sections or keys, repeated keys and malformed values are rejected
// with the offending line number.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "purify/lattice.hpp"
#include "purify/pulse_errors.hpp"
#include "purify/thermo.hpp"

namespace purify {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, int line, const std::string& message);

    const std::string& source() const { return source_; }
    /// 0 when the problem is not tied to one line.
    int line() const { return line_; }
    /// The message without the source/line prefix.
    const std::string& detail() const { return detail_; }

private:
    std::string source_;
    int line_;
    std::string detail_;
};

struct RunConfig {
    std::uint64_t seed = 1;

    int n_cap = 10;
    TrapParams trap;
    int grid_radius_sites = 0;  ///< 0 picks the smallest grid covering the cloud
    double bin_width_um = 0.0;  ///< 0 means one lattice spacing

    int n_max = 10;
    Axis merge_axis = Axis::aux;
    IterationMode merge_mode = IterationMode::parallel;
    ErrorConfig errors;

    double fig4_mu_U = 0.5;
    double fig4_T_min = 0.02;
    double fig4_T_max = 0.5;
    int fig4_points = 50;

    double profile_mu_U = 0.5;
    double profile_T_U = 0.2;
    double profile_r_max_um = 15.0;

    double fig7_T_U = 0.2;
    double fig7_mu_low = 0.5;
    double fig7_mu_high = 2.0;
    int fig7_iterations = 3;
    double fig7_eps_floor = 1e-4;

    std::vector<double> mc_eps = {0.05, 0.1, 0.2};
    int mc_grid_radius_sites = 3;
    std::uint64_t mc_realizations = 100000;

    double tau_s = 1.0;
    std::vector<double> pulse_u00_hz = {1000.0, 20000.0};
    double w_loss = 0.1;
    double detuning_u00 = 0.125;
    TimeGrid pulse_grid;

    /// Cross-field checks; throws ConfigError.
    void validate() const;

    /// Every setting as ("section.key", value text) in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries() const;

    /// FNV-1a 64 over the canonical entries.
    std::uint64_t hash() const;
};

/// Parses configuration text; `source` names it in diagnostics.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");

RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& config);

}  // namespace purify
