#include "purify/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "purify/error.hpp"
#include "purify/lattice.hpp"
#include "purify/monte_carlo.hpp"
#include "purify/oscillator.hpp"
#include "purify/protocol.hpp"
#include "purify/pulse_errors.hpp"
#include "purify/thermo.hpp"

namespace purify {

namespace {

constexpr double radius_tol_um = 1e-9;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

InteractionMatrix matrix_for(double u00_hz) { return HarmonicBasis().interaction_matrix(u00_hz); }

Schedule schedule_for(const RunConfig& c, int iterations, Axis axis) {
    Schedule s = Schedule::filter_then_merge(c.n_max, iterations, axis, c.merge_mode);
    s.errors = c.errors;
    return s;
}

int grid_radius_for(const RunConfig& c, std::initializer_list<ThermalParams> thermals, double r_um = 0.0) {
    int radius = c.grid_radius_sites;
    if (radius == 0) {
        for (const auto& t : thermals) radius = std::max(radius, minimal_grid_radius(t, c.trap));
    }
    return std::max(radius, static_cast<int>(std::ceil(r_um / c.trap.spacing_um - 1e-12)));
}

double bin_width(const RunConfig& c) { return c.bin_width_um > 0.0 ? c.bin_width_um : c.trap.spacing_um; }

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> v(static_cast<std::size_t>(points), lo);
    for (int i = 1; i < points; ++i) v[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (points - 1));
    return v;
}

std::string optional_radius(const std::optional<double>& r) { return r ? num(*r) : "none"; }

// --- fig4 --------------------------------------------------------------------

ExperimentOutput fig4(const RunConfig& c) {
    const auto matrix = matrix_for(c.trap.u_int_hz);
    // A homogeneous system: every merge partner carries the same statistics.
    const Schedule schedule = schedule_for(c, 2, Axis::aux);
    CsvTable table({"T_U", "defect_initial", "defect_filtered", "defect_iter1", "defect_iter2"});
    for (double T : log_grid(c.fig4_T_min, c.fig4_T_max, c.fig4_points)) {
        const auto dist = occupation_distribution({c.fig4_mu_U, T, c.n_cap});
        const auto stages = apply_schedule(LatticeField::homogeneous(dist, 0, c.trap.spacing_um), schedule, matrix);
        std::vector<CsvCell> row{T};
        for (const auto& s : stages) row.emplace_back(1.0 - s.p1(0));
        table.add_row(std::move(row));
    }
    table.note("mu_U", num(c.fig4_mu_U));
    table.note("schedule", "filter(n_max) then two merges");
    ExperimentOutput out;
    out.tables.push_back({"fig4.csv", "T_U in units of U_int; defects are probabilities", std::move(table)});
    return out;
}

// --- fig5 / fig6 ----------------------------------------------------------------

struct ProfileRun {
    ThermalParams thermal;
    Schedule schedule;
    std::vector<LatticeField> stages;
};

ProfileRun profile_run(const RunConfig& c) {
    ProfileRun run;
    run.thermal = {c.profile_mu_U, c.profile_T_U, c.n_cap};
    run.schedule = schedule_for(c, 2, c.merge_axis);
    const int radius = grid_radius_for(c, {run.thermal}, c.profile_r_max_um);
    run.stages =
        apply_schedule(build_thermal_lattice(run.thermal, c.trap, radius), run.schedule, matrix_for(c.trap.u_int_hz));
    return run;
}

CsvTable profile_table(const RunConfig& c, const ProfileRun& run, ProfileQuantity quantity, const std::string& prefix) {
    const std::array<const char*, 4> names{"initial", "filtered", "merge1", "merge2"};
    std::vector<std::string> columns{"r_um"};
    for (const char* n : names) columns.push_back(prefix + "_" + n);
    CsvTable table(columns);

    const double w = bin_width(c);
    std::map<long, std::vector<double>> rows;
    for (std::size_t s = 0; s < run.stages.size(); ++s) {
        for (const auto& p : radial_profile(run.stages[s], quantity, w)) {
            const long k = std::lround(p.r_um / w);
            auto& row = rows[k];
            row.resize(run.stages.size(), std::nan(""));
            row[s] = p.value;
        }
    }
    for (const auto& [k, values] : rows) {
        const double r = static_cast<double>(k) * w;
        if (r > c.profile_r_max_um + radius_tol_um) break;
        std::vector<CsvCell> row{r};
        for (double v : values) row.emplace_back(v);
        table.add_row(std::move(row));
    }
    table.note("mu_U", num(run.thermal.mu_U));
    table.note("T_U", num(run.thermal.T_U));
    table.note("bin_width_um", num(w));
    return table;
}

void add_plateau_notes(CsvTable& table, const ProfileRun& run) {
    for (double threshold : {1.0 - 1e-3, 0.99}) {
        for (std::size_t s : {std::size_t{2}, std::size_t{3}}) {
            table.note("plateau_r_um merge" + std::to_string(s - 1) + " P1>=" + short_num(threshold),
                       optional_radius(plateau_radius(run.stages[s], threshold)));
        }
    }
}

ExperimentOutput fig5(const RunConfig& c) {
    const auto run = profile_run(c);
    auto table = profile_table(c, run, ProfileQuantity::p1, "P1");
    add_plateau_notes(table, run);
    ExperimentOutput out;
    out.tables.push_back({"fig5.csv", "r_um in micrometres; P1 is the probability of unit occupation", std::move(table)});
    return out;
}

ExperimentOutput fig6(const RunConfig& c) {
    const auto run = profile_run(c);
    auto table = profile_table(c, run, ProfileQuantity::entropy, "entropy");
    add_plateau_notes(table, run);
    if (c.merge_axis == Axis::aux) {
        const MergeTable merge_table(matrix_for(c.trap.u_int_hz));
        const std::array<const char*, 4> names{"initial", "filtered", "merge1", "merge2"};
        for (std::size_t s = 0; s < names.size(); ++s) {
            try {
                const auto peak = entropy_peak(run.thermal, c.trap, run.schedule, s, merge_table);
                table.note(std::string("entropy_peak ") + names[s], "r_um=" + num(peak.r_um) + " S=" + num(peak.entropy));
            } catch (const NumericError& e) {
                table.note(std::string("entropy_peak ") + names[s], std::string("none (") + e.what() + ")");
            }
        }
    }
    ExperimentOutput out;
    out.tables.push_back(
        {"fig6.csv", "r_um in micrometres; entropy per site in nats over n in {0,1}", std::move(table)});
    return out;
}

// --- fig7 -----------------------------------------------------------------------

ExperimentOutput fig7(const RunConfig& c) {
    const auto matrix = matrix_for(c.trap.u_int_hz);
    const ThermalParams low{c.fig7_mu_low, c.fig7_T_U, c.n_cap};
    const ThermalParams high{c.fig7_mu_high, c.fig7_T_U, c.n_cap};
    const int radius = grid_radius_for(c, {low, high});
    const int k = c.fig7_iterations;

    Schedule ideal = schedule_for(c, k, c.merge_axis);
    Schedule floored = ideal;
    floored.errors.eps_floor = std::max(floored.errors.eps_floor, c.fig7_eps_floor);

    const auto low_field = build_thermal_lattice(low, c.trap, radius);
    const auto high_field = build_thermal_lattice(high, c.trap, radius);
    const auto low_stages = apply_schedule(low_field, ideal, matrix);
    const auto low_floor = apply_schedule(low_field, floored, matrix);
    const auto high_floor = apply_schedule(high_field, floored, matrix);

    const std::string lo = "mu" + short_num(c.fig7_mu_low);
    const std::string hi = "mu" + short_num(c.fig7_mu_high);
    std::vector<std::string> columns{"N_sites", "r_cut_um", lo + "_filter"};
    std::vector<const LatticeField*> curves{&low_stages[1]};
    for (int i = 1; i <= k; ++i) {
        columns.push_back(lo + "_iter" + std::to_string(i));
        curves.push_back(&low_stages[static_cast<std::size_t>(i) + 1]);
    }
    columns.push_back(lo + "_iter" + std::to_string(k) + "_floor");
    curves.push_back(&low_floor.back());
    columns.push_back(hi + "_filter");
    curves.push_back(&high_floor[1]);
    columns.push_back(hi + "_iter" + std::to_string(k) + "_floor");
    curves.push_back(&high_floor.back());
    columns.push_back("floor_bound");

    const auto r_cuts = site_radii(low_field);
    const auto disc = infidelity_curve(low_field, r_cuts);
    std::vector<std::vector<InfidelityPoint>> values;
    for (const auto* f : curves) values.push_back(infidelity_curve(*f, r_cuts));

    CsvTable table(columns);
    std::vector<long long> best(curves.size(), 0);
    for (std::size_t j = 0; j < r_cuts.size(); ++j) {
        const auto n = static_cast<long long>(disc[j].sites);
        std::vector<CsvCell> row{n, r_cuts[j]};
        for (std::size_t v = 0; v < values.size(); ++v) {
            row.emplace_back(values[v][j].infidelity);
            if (values[v][j].infidelity <= 1e-2) best[v] = n;
        }
        row.emplace_back(-std::expm1(static_cast<double>(n) * std::log1p(-c.fig7_eps_floor)));
        table.add_row(std::move(row));
    }
    table.note("T_U", num(c.fig7_T_U));
    table.note("eps_floor", num(c.fig7_eps_floor));
    table.note("grid_radius_sites", std::to_string(radius));
    for (std::size_t v = 0; v < curves.size(); ++v) {
        table.note("largest N_sites with infidelity<=1e-2 " + columns[v + 2], std::to_string(best[v]));
    }
    ExperimentOutput out;
    out.tables.push_back({"fig7.csv",
                          "N_sites counts lattice sites with r <= r_cut_um (micrometres); infidelity is 1 - overlap",
                          std::move(table)});
    return out;
}

// --- table1 ---------------------------------------------------------------------

ExperimentOutput table1(const RunConfig& c) {
    const auto matrix = matrix_for(c.trap.u_int_hz);
    const std::array<std::array<int, 3>, 8> inputs{{{1, 1, 1}, {1, 1, 0}, {0, 1, 1}, {1, 0, 1},
                                                    {0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {0, 0, 0}}};
    CsvTable table({"state", "n_l", "n_m", "n_r", "n_i_m", "n_or_m", "n_f_m"});
    std::string trace;
    for (const auto& in : inputs) {
        const auto outcome = merge_protocol({in[0], in[1], in[2]}, matrix);
        const std::string label =
            "|" + std::to_string(in[0]) + "," + std::to_string(in[1]) + "," + std::to_string(in[2]) + ">";
        table.add_row({label, in[0], in[1], in[2], in[1], (in[0] | in[1] | in[2]), outcome.ground_occupied ? 1 : 0});
        trace += "## " + label + "\n" + outcome.trace_text() + "\n";
    }
    ExperimentOutput out;
    out.tables.push_back({"table1.csv", "occupation numbers", std::move(table)});
    out.texts.emplace_back("table1_trace.txt", trace);
    return out;
}

// --- mc_validate ----------------------------------------------------------------

ExperimentOutput mc_validate(const RunConfig& c) {
    const auto matrix = matrix_for(c.trap.u_int_hz);
    const MergeTable merge_table(matrix);
    CsvTable table({"eps0", "mode", "iteration", "analytic", "closed_form", "empirical", "sigma", "z"});
    for (double eps : c.mc_eps) {
        const auto field =
            LatticeField::homogeneous(OccupationDistribution::binary(eps), c.mc_grid_radius_sites, c.trap.spacing_um);
        for (auto mode : {IterationMode::parallel, IterationMode::serial}) {
            const auto closed = vacancy_recursion(eps, 2, mode);
            for (int it = 1; it <= 2; ++it) {
                Schedule s;
                s.errors = c.errors;
                for (int m = 0; m < it; ++m) s.steps.push_back(MergeStep{Axis::aux, mode});
                const auto analytic = apply_schedule(field, s, matrix).back();
                const auto mc = monte_carlo_run(field, s, c.seed, c.mc_realizations, matrix);
                double vacancy = 0.0;
                std::size_t sites = 0;
                for (std::size_t i = 0; i < analytic.size(); ++i) {
                    if (!analytic.is_logical(i)) continue;
                    vacancy += 1.0 - analytic.p1(i);
                    ++sites;
                }
                vacancy /= static_cast<double>(sites);
                const double z = mc.pooled_sigma > 0.0 ? (mc.pooled_vacancy - vacancy) / mc.pooled_sigma
                                                       : (mc.pooled_vacancy == vacancy ? 0.0 : std::nan(""));
                table.add_row({eps, std::string(to_string(mode)), it, vacancy,
                               closed[static_cast<std::size_t>(it) - 1], mc.pooled_vacancy, mc.pooled_sigma, z});
            }
        }
    }
    table.note("sites", std::to_string((2 * c.mc_grid_radius_sites + 1) * (2 * c.mc_grid_radius_sites + 1)));
    table.note("realizations", std::to_string(c.mc_realizations));
    ExperimentOutput out;
    out.tables.push_back({"mc_validate.csv", "vacancy probabilities; z in units of the binomial sigma", std::move(table)});
    return out;
}

// --- pulse_opt ------------------------------------------------------------------

ExperimentOutput pulse_opt(const RunConfig& c) {
    const ObjectiveWeights weights{1.0, c.w_loss};
    CsvTable scan({"u00_hz", "t_s", "chi_rad_s", "spectator", "loss", "eps"});
    CsvTable summary({"u00_hz", "branch", "k", "t_s", "chi_rad_s", "spectator", "loss", "eps"});
    for (double u00 : c.pulse_u00_hz) {
        const auto opt = optimize_pulse(LossModel{c.tau_s, u00}, c.detuning_u00, weights, c.pulse_grid);
        for (const auto& p : opt.scan) scan.add_row({u00, p.t_s, p.chi_rad_s, p.spectator, p.loss, p.eps});
        const auto& g = opt.grid_best;
        summary.add_row({u00, std::string("grid"), 0LL, g.t_s, g.chi_rad_s, g.spectator, g.loss, g.eps});
        if (opt.commensurate_best) {
            const auto& b = *opt.commensurate_best;
            summary.add_row({u00, std::string("commensurate"), static_cast<long long>(opt.commensurate_k), b.t_s,
                             b.chi_rad_s, b.spectator, b.loss, b.eps});
        }
        if (opt.degenerate) summary.note("degenerate u00_hz=" + short_num(u00), "zero detuning, no discrimination");
    }

    const std::array<OperatingPoint, 2> reference{{{1000.0, 7e-3, 7e-4}, {20000.0, 1e-3, 1e-4}}};
    const auto fit = fit_loss_weight(reference, c.tau_s, c.detuning_u00);
    summary.note("fitted_w_loss", num(fit.best_weight));
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const auto& p = reference[i];
        summary.note("reference u00_hz=" + short_num(p.u00_hz) + " t_s=" + short_num(p.t_s) +
                         " eps=" + short_num(p.eps),
                     "w_alone=" + num(fit.per_point_weight[i]) + " relative_residual=" + num(fit.relative_residual[i]));
    }
    ExperimentOutput out;
    const std::string units = "u00_hz in Hz; t_s in seconds; chi_rad_s in rad/s; probabilities dimensionless";
    out.tables.push_back({"pulse_opt.csv", units, std::move(scan)});
    out.tables.push_back({"pulse_opt_summary.csv", units, std::move(summary)});
    return out;
}

using Builder = ExperimentOutput (*)(const RunConfig&);

const std::vector<std::pair<std::string, Builder>>& builders() {
    static const std::vector<std::pair<std::string, Builder>> table = {
        {"fig4", fig4},     {"fig5", fig5},     {"fig6", fig6},       {"fig7", fig7},
        {"table1", table1}, {"mc_validate", mc_validate}, {"pulse_opt", pulse_opt},
    };
    return table;
}

}  // namespace

const CsvTable& ExperimentOutput::table(const std::string& filename) const {
    for (const auto& t : tables) {
        if (t.filename == filename) return t.table;
    }
    throw std::out_of_range("no output table " + filename);
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : builders()) n.push_back(name);
        return n;
    }();
    return names;
}

bool is_experiment(const std::string& name) {
    const auto& n = experiment_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

ExperimentOutput build_experiment(const std::string& name, const RunConfig& config) {
    for (const auto& [n, fn] : builders()) {
        if (n == name) return fn(config);
    }
    throw ContractError("unknown experiment '" + name + "'");
}

std::vector<std::filesystem::path> run_experiment(const std::string& name, const RunConfig& config,
                                                  const std::filesystem::path& out_dir) {
    const auto output = build_experiment(name, config);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& t : output.tables) {
        written.push_back(out_dir / t.filename);
        t.table.write(written.back(), name, config, t.units);
    }
    for (const auto& [filename, text] : output.texts) {
        written.push_back(out_dir / filename);
        write_text_file(written.back(), provenance_block(name, config, "occupation numbers") + text);
    }
    return written;
}

}  // namespace purify
