#include "purify/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "purify/error.hpp"

namespace purify {

namespace {

struct Field {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw std::invalid_argument("expected a finite number");
    return v;
}

template <class Int>
Int parse_int(const std::string& s) {
    Int v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected an integer");
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_double(trim(item)));
    if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out;
}

Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "aux") return Axis::aux;
    throw std::invalid_argument("expected x, y or aux");
}

IterationMode parse_mode(const std::string& s) {
    if (s == "parallel") return IterationMode::parallel;
    if (s == "serial") return IterationMode::serial;
    throw std::invalid_argument("expected parallel or serial");
}

#define REAL(sec, name, member)                                                  \
    Field {                                                                      \
        sec, name, [](RunConfig& c, const std::string& v) { c.member = parse_double(v); }, \
            [](const RunConfig& c) { return format_double(c.member); }           \
    }
#define INT(sec, name, member, type)                                              \
    Field {                                                                       \
        sec, name, [](RunConfig& c, const std::string& v) { c.member = parse_int<type>(v); }, \
            [](const RunConfig& c) { return std::to_string(c.member); }           \
    }
#define LIST(sec, name, member)                                                 \
    Field {                                                                     \
        sec, name, [](RunConfig& c, const std::string& v) { c.member = parse_list(v); }, \
            [](const RunConfig& c) { return format_list(c.member); }            \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        INT("run", "seed", seed, std::uint64_t),
        INT("thermal", "n_cap", n_cap, int),
        REAL("trap", "omega_trap_hz", trap.omega_trap_hz),
        REAL("trap", "u_int_hz", trap.u_int_hz),
        REAL("trap", "mass_kg", trap.mass_kg),
        REAL("trap", "spacing_um", trap.spacing_um),
        INT("lattice", "grid_radius_sites", grid_radius_sites, int),
        REAL("lattice", "bin_width_um", bin_width_um),
        INT("schedule", "n_max", n_max, int),
        Field{"schedule", "merge_axis", [](RunConfig& c, const std::string& v) { c.merge_axis = parse_axis(v); },
              [](const RunConfig& c) { return std::string(to_string(c.merge_axis)); }},
        Field{"schedule", "merge_mode", [](RunConfig& c, const std::string& v) { c.merge_mode = parse_mode(v); },
              [](const RunConfig& c) { return std::string(to_string(c.merge_mode)); }},
        REAL("errors", "filter_pulse_error", errors.per_pulse_error),
        REAL("errors", "merge_pulse_error", errors.merge.pulse_error),
        REAL("errors", "merge_infidelity", errors.merge.merge_infidelity),
        REAL("errors", "eps_floor", errors.eps_floor),
        REAL("errors", "transport_infidelity_per_site", errors.transport_infidelity_per_site),
        REAL("fig4", "mu_U", fig4_mu_U),
        REAL("fig4", "T_min", fig4_T_min),
        REAL("fig4", "T_max", fig4_T_max),
        INT("fig4", "points", fig4_points, int),
        REAL("profile", "mu_U", profile_mu_U),
        REAL("profile", "T_U", profile_T_U),
        REAL("profile", "r_max_um", profile_r_max_um),
        REAL("fig7", "T_U", fig7_T_U),
        REAL("fig7", "mu_low", fig7_mu_low),
        REAL("fig7", "mu_high", fig7_mu_high),
        INT("fig7", "iterations", fig7_iterations, int),
        REAL("fig7", "eps_floor", fig7_eps_floor),
        LIST("mc", "eps_values", mc_eps),
        INT("mc", "grid_radius_sites", mc_grid_radius_sites, int),
        INT("mc", "n_realizations", mc_realizations, std::uint64_t),
        REAL("pulse", "tau_s", tau_s),
        LIST("pulse", "u00_hz", pulse_u00_hz),
        REAL("pulse", "w_loss", w_loss),
        REAL("pulse", "detuning_u00", detuning_u00),
        REAL("pulse", "t_min_s", pulse_grid.t_min_s),
        REAL("pulse", "t_max_s", pulse_grid.t_max_s),
        INT("pulse", "points", pulse_grid.points, int),
    };
    return table;
}

#undef REAL
#undef INT
#undef LIST

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError("", 0, message);
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : std::runtime_error((source.empty() ? std::string("config") : source) +
                         (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      source_(std::move(source)),
      line_(line),
      detail_(message) {}

void RunConfig::validate() const {
    try {
        ThermalParams{0.0, 1.0, n_cap}.validate();
        trap.validate();
        errors.validate();
        LossModel{tau_s, 1.0}.validate();
    } catch (const ContractError& e) {
        require(false, e.what());
    }
    require(grid_radius_sites >= 0, "lattice.grid_radius_sites must be >= 0");
    require(bin_width_um >= 0.0, "lattice.bin_width_um must be >= 0");
    require(n_max >= 2, "schedule.n_max must be >= 2");
    require(fig4_T_min > 0.0 && fig4_T_max >= fig4_T_min, "fig4 needs 0 < T_min <= T_max");
    require(fig4_points >= 1, "fig4.points must be >= 1");
    require(profile_T_U > 0.0, "profile.T_U must be > 0");
    require(profile_r_max_um > 0.0, "profile.r_max_um must be > 0");
    require(fig7_T_U > 0.0, "fig7.T_U must be > 0");
    require(fig7_iterations >= 1, "fig7.iterations must be >= 1");
    require(fig7_eps_floor >= 0.0 && fig7_eps_floor <= 1.0, "fig7.eps_floor must lie in [0,1]");
    for (double e : mc_eps) require(e >= 0.0 && e <= 1.0, "mc.eps_values must lie in [0,1]");
    require(mc_grid_radius_sites >= 0, "mc.grid_radius_sites must be >= 0");
    require(mc_realizations >= 1, "mc.n_realizations must be >= 1");
    for (double u : pulse_u00_hz) require(u > 0.0, "pulse.u00_hz values must be > 0");
    require(w_loss >= 0.0, "pulse.w_loss must be >= 0");
    require(pulse_grid.t_min_s > 0.0 && pulse_grid.t_max_s >= pulse_grid.t_min_s,
            "pulse needs 0 < t_min_s <= t_max_s");
    require(pulse_grid.points >= 1, "pulse.points must be >= 1");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : fields()) out.emplace_back(std::string(f.section) + "." + f.key, f.get(*this));
    return out;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& [key, value] : entries()) {
        for (char ch : key + "=" + value + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    std::map<std::string, const Field*> lookup;
    std::set<std::string> sections;
    for (const auto& f : fields()) {
        lookup[std::string(f.section) + "." + f.key] = &f;
        sections.insert(f.section);
    }

    RunConfig config;
    std::map<std::string, int> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash_pos = raw.find('#');
        const std::string line = trim(hash_pos == std::string::npos ? raw : raw.substr(0, hash_pos));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(source, line_no, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) throw ConfigError(source, line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(source, line_no, "key '" + key + "' appears before any [section]");
        const std::string full = section + "." + key;
        const auto it = lookup.find(full);
        if (it == lookup.end()) throw ConfigError(source, line_no, "unknown key '" + key + "' in [" + section + "]");
        if (const auto prev = seen.find(full); prev != seen.end()) {
            throw ConfigError(source, line_no,
                              "duplicate key '" + full + "' (first set on line " + std::to_string(prev->second) + ")");
        }
        seen[full] = line_no;
        if (value.empty()) throw ConfigError(source, line_no, "missing value for '" + full + "'");
        try {
            it->second->set(config, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(source, line_no, "bad value '" + value + "' for '" + full + "': " + e.what());
        }
    }
    try {
        config.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source, 0, e.detail());
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot read config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string to_config_text(const RunConfig& config) {
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            section = f.section;
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        out += std::string(f.key) + " = " + f.get(config) + "\n";
    }
    return out;
}

}  // namespace purify
