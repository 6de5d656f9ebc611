#include "purify/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <type_traits>

#include "purify/error.hpp"

namespace purify {

namespace {

constexpr double binary_tol = 1e-10;
constexpr double radius_tol_um = 1e-9;

int mod3(int k) { return ((k % 3) + 3) % 3; }

std::size_t axis_slot(Axis axis) { return static_cast<std::size_t>(axis); }

double binary_entropy(const OccupationDistribution& d) { return site_entropy(d, EntropyMode::binary); }

void require_binary(const OccupationDistribution& d) {
    if (d.multiple_mass() > binary_tol) {
        throw ContractError("merge needs binary occupations; filter multiply occupied sites first");
    }
}

OccupationDistribution merged_site(double p_left, double p_mid, double p_right, const MergeTable& table,
                                   const ErrorConfig& errors, int distance_sites) {
    ErrorModel model = errors.merge;
    model.merge_infidelity =
        std::min(1.0, model.merge_infidelity + errors.transport_infidelity_per_site * distance_sites);
    double vacancy = 1.0 - table.success_probability(p_left, p_mid, p_right, model);
    vacancy = std::max(vacancy, errors.eps_floor);
    return OccupationDistribution::binary(std::clamp(vacancy, 0.0, 1.0));
}

double quantity_value(const OccupationDistribution& d, ProfileQuantity q) {
    switch (q) {
        case ProfileQuantity::p1: return d[1];
        case ProfileQuantity::entropy: return binary_entropy(d);
        case ProfileQuantity::defect: return defect_probability(d);
    }
    return 0.0;
}

}  // namespace

const char* to_string(Axis axis) {
    switch (axis) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::aux: return "aux";
    }
    return "?";
}

const char* to_string(IterationMode mode) { return mode == IterationMode::parallel ? "parallel" : "serial"; }

const char* to_string(ProfileQuantity quantity) {
    switch (quantity) {
        case ProfileQuantity::p1: return "P1";
        case ProfileQuantity::entropy: return "entropy";
        case ProfileQuantity::defect: return "defect";
    }
    return "?";
}

void ErrorConfig::validate() const {
    merge.validate();
    if (!(per_pulse_error >= 0.0 && per_pulse_error < 1.0)) throw ContractError("per-pulse error must lie in [0,1)");
    if (!(eps_floor >= 0.0 && eps_floor <= 1.0)) throw ContractError("eps floor must lie in [0,1]");
    if (!(transport_infidelity_per_site >= 0.0 && transport_infidelity_per_site <= 1.0)) {
        throw ContractError("transport infidelity must lie in [0,1]");
    }
}

void Schedule::validate() const {
    errors.validate();
    bool merged = false;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (const auto* f = std::get_if<FilterStep>(&steps[i])) {
            if (f->n_max < 2) throw ContractError("filter n_max must be at least 2");
        } else if (const auto* s = std::get_if<SkimStep>(&steps[i])) {
            if (i + 1 != steps.size()) throw ContractError("skim is only allowed as the final step");
            if (!(s->r_cut_um >= 0.0)) throw ContractError("skim radius must be non-negative");
        } else {
            merged = true;
        }
    }
    if (merged && errors.per_pulse_error > 0.0) {
        throw ContractError("filter pulse errors leave multiply occupied sites, which merges cannot take");
    }
}

Schedule Schedule::filter_then_merge(int n_max, int iterations, Axis axis, IterationMode mode) {
    Schedule s;
    s.steps.push_back(FilterStep{n_max});
    for (int i = 0; i < iterations; ++i) s.steps.push_back(MergeStep{axis, mode});
    return s;
}

void CompensatedSum::add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
        carry_ += (sum_ - t) + v;
    } else {
        carry_ += (v - t) + sum_;
    }
    sum_ = t;
}

LatticeField::LatticeField(int radius_sites, double spacing_um) : radius_(radius_sites), spacing_um_(spacing_um) {
    if (radius_sites < 0) throw ContractError("grid radius must be non-negative");
    if (!(spacing_um > 0.0)) throw ContractError("lattice spacing must be positive");
}

LatticeField LatticeField::homogeneous(const OccupationDistribution& dist, int radius_sites, double spacing_um) {
    LatticeField f(radius_sites, spacing_um);
    f.dists_.assign(f.size(), dist);
    return f;
}

std::optional<std::size_t> LatticeField::index(int x, int y) const {
    if (std::abs(x) > radius_ || std::abs(y) > radius_) return std::nullopt;
    return static_cast<std::size_t>((y + radius_) * side() + (x + radius_));
}

double LatticeField::radius_um(std::size_t i) const {
    const double x = ix(i);
    const double y = iy(i);
    return spacing_um_ * std::sqrt(x * x + y * y);
}

bool LatticeField::is_logical(std::size_t i) const {
    return ix(i) % stride_[0] == 0 && iy(i) % stride_[1] == 0;
}

int LatticeField::stride(Axis axis) const { return stride_[axis_slot(axis)]; }

void LatticeField::require_analytic(const char* op) const {
    if (mode_ != FieldMode::analytic) throw ContractError(std::string(op) + " requires an analytic-mode field");
}

const OccupationDistribution& LatticeField::dist(std::size_t i) const {
    require_analytic("dist");
    return dists_.at(i);
}

void LatticeField::set_dist(std::size_t i, OccupationDistribution d) {
    require_analytic("set_dist");
    dists_.at(i) = std::move(d);
}

int LatticeField::occupation(std::size_t i) const {
    if (mode_ != FieldMode::sampled) throw ContractError("occupation requires a sampled-mode field");
    return occupation_.at(i);
}

double LatticeField::p1(std::size_t i) const {
    return mode_ == FieldMode::analytic ? dists_.at(i)[1] : (occupation_.at(i) == 1 ? 1.0 : 0.0);
}

std::vector<double> LatticeField::p1_values() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = p1(i);
    return out;
}

double LatticeField::total_atoms() const {
    CompensatedSum sum;
    for (std::size_t i = 0; i < size(); ++i) {
        sum.add(mode_ == FieldMode::analytic ? dists_[i].mean() : static_cast<double>(occupation_[i]));
    }
    return sum.value();
}

int sample_occupation(const OccupationDistribution& dist, double u) {
    const auto p = dist.probabilities();
    double acc = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        acc += p[n];
        if (u < acc) return static_cast<int>(n);
    }
    // u landed in the rounding slack above the cumulative sum.
    for (std::size_t n = p.size(); n-- > 0;) {
        if (p[n] > 0.0) return static_cast<int>(n);
    }
    return 0;
}

int minimal_grid_radius(const ThermalParams& thermal, const TrapParams& trap) {
    thermal.validate();
    trap.validate();
    const double edge = -5.0 * thermal.T_U;
    if (thermal.mu_U <= edge) return 0;
    const double r = radius_at_chemical_potential(edge, thermal.mu_U, trap);
    return static_cast<int>(std::ceil(r / trap.spacing_um - 1e-12));
}

LatticeField build_thermal_lattice(const ThermalParams& thermal, const TrapParams& trap, int grid_radius_sites) {
    const int needed = minimal_grid_radius(thermal, trap);
    if (grid_radius_sites < needed) {
        throw ContractError("grid radius " + std::to_string(grid_radius_sites) +
                            " sites does not cover mu_loc > -5 T_U; use at least " + std::to_string(needed));
    }
    LatticeField f(grid_radius_sites, trap.spacing_um);
    f.dists_.reserve(f.size());
    std::map<int, OccupationDistribution> by_r2;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const int r2 = f.ix(i) * f.ix(i) + f.iy(i) * f.iy(i);
        auto it = by_r2.find(r2);
        if (it == by_r2.end()) {
            ThermalParams local = thermal;
            local.mu_U = local_chemical_potential(f.radius_um(i), thermal.mu_U, trap);
            it = by_r2.emplace(r2, occupation_distribution(local)).first;
        }
        f.dists_.push_back(it->second);
    }
    return f;
}

LatticeField propagate_filter(const LatticeField& field, int n_max, double per_pulse_error) {
    LatticeField out = field;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.set_dist(i, filter_sweep(field.dist(i), n_max, per_pulse_error));
    }
    return out;
}

LatticeField propagate_merge(const LatticeField& field, Axis axis, IterationMode mode, const ErrorConfig& errors,
                             const MergeTable& table) {
    field.require_analytic("propagate_merge");
    errors.validate();
    LatticeField out = field;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field.is_logical(i)) require_binary(field.dists_[i]);
    }
    if (out.reservoir_.empty()) out.reservoir_ = field.dists_;

    const std::size_t slot = axis_slot(axis);
    if (axis == Axis::aux) {
        const int distance = mode == IterationMode::parallel ? field.stride_[slot] : field.serial_steps_[slot] + 1;
        for (std::size_t i = 0; i < field.size(); ++i) {
            if (!field.is_logical(i)) continue;
            const double own = field.dists_[i][1];
            const double partner = mode == IterationMode::parallel ? own : out.reservoir_[i][1];
            out.dists_[i] = merged_site(partner, own, partner, table, errors, distance);
        }
    } else {
        const int s = field.stride_[slot];
        const int step = mode == IterationMode::parallel ? s : (field.serial_steps_[slot] + 1) * s;
        const auto& partners = mode == IterationMode::parallel ? field.dists_ : out.reservoir_;
        auto neighbour_p1 = [&](std::size_t i, int offset) {
            const int x = field.ix(i) + (axis == Axis::x ? offset : 0);
            const int y = field.iy(i) + (axis == Axis::y ? offset : 0);
            const auto j = field.index(x, y);
            return j ? partners[*j][1] : 0.0;
        };
        for (std::size_t i = 0; i < field.size(); ++i) {
            if (!field.is_logical(i)) continue;
            const int coord = axis == Axis::x ? field.ix(i) : field.iy(i);
            const bool target = mode == IterationMode::serial || mod3(coord / s) == 0;
            if (target) {
                out.dists_[i] = merged_site(neighbour_p1(i, -step), field.dists_[i][1], neighbour_p1(i, step), table,
                                            errors, step);
            } else {
                out.dists_[i] = OccupationDistribution::delta(0);
            }
        }
    }
    if (mode == IterationMode::parallel) {
        out.stride_[slot] *= 3;
    } else {
        ++out.serial_steps_[slot];
    }
    return out;
}

LatticeField skim(const LatticeField& field, double r_cut_um) {
    if (!(r_cut_um >= 0.0)) throw ContractError("skim radius must be non-negative");
    LatticeField out = field;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.radius_um(i) <= r_cut_um + radius_tol_um) continue;
        if (out.mode_ == FieldMode::analytic) {
            out.dists_[i] = OccupationDistribution::delta(0);
        } else {
            out.occupation_[i] = 0;
        }
    }
    return out;
}

std::vector<LatticeField> apply_schedule(const LatticeField& field, const Schedule& schedule,
                                         const InteractionMatrix& matrix) {
    schedule.validate();
    const MergeTable table(matrix);
    std::vector<LatticeField> stages{field};
    for (const auto& step : schedule.steps) {
        const LatticeField& cur = stages.back();
        LatticeField next = std::visit(
            [&](const auto& s) -> LatticeField {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, FilterStep>) {
                    return propagate_filter(cur, s.n_max, schedule.errors.per_pulse_error);
                } else if constexpr (std::is_same_v<T, MergeStep>) {
                    return propagate_merge(cur, s.axis, s.mode, schedule.errors, table);
                } else {
                    return skim(cur, s.r_cut_um);
                }
            },
            step);
        stages.push_back(std::move(next));
    }
    return stages;
}

std::vector<ProfilePoint> radial_profile(const LatticeField& field, ProfileQuantity quantity, double bin_width_um) {
    if (!(bin_width_um > 0.0)) throw ContractError("bin width must be positive");
    std::map<long, std::pair<CompensatedSum, std::size_t>> bins;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!field.is_logical(i)) continue;
        const long k = std::lround(field.radius_um(i) / bin_width_um);
        auto& bin = bins[k];
        bin.first.add(quantity_value(field.dist(i), quantity));
        ++bin.second;
    }
    std::vector<ProfilePoint> out;
    out.reserve(bins.size());
    for (const auto& [k, bin] : bins) {
        out.push_back({static_cast<double>(k) * bin_width_um, bin.first.value() / static_cast<double>(bin.second),
                       bin.second});
    }
    return out;
}

std::optional<double> plateau_radius(const LatticeField& field, double threshold) {
    std::vector<std::pair<double, double>> sites;  // (radius, P1)
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field.is_logical(i)) sites.emplace_back(field.radius_um(i), field.p1(i));
    }
    std::sort(sites.begin(), sites.end());
    std::optional<double> best;
    for (std::size_t i = 0; i < sites.size();) {
        std::size_t j = i;
        bool ok = true;
        while (j < sites.size() && sites[j].first <= sites[i].first + radius_tol_um) {
            ok = ok && sites[j].second >= threshold;
            ++j;
        }
        if (!ok) break;
        best = sites[j - 1].first;
        i = j;
    }
    return best;
}

std::vector<double> site_radii(const LatticeField& field) {
    std::vector<double> r;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field.is_logical(i)) r.push_back(field.radius_um(i));
    }
    std::sort(r.begin(), r.end());
    std::vector<double> unique;
    for (double v : r) {
        if (unique.empty() || v > unique.back() + radius_tol_um) unique.push_back(v);
    }
    return unique;
}

std::vector<InfidelityPoint> infidelity_curve(const LatticeField& field, const std::vector<double>& r_cuts_um) {
    std::vector<std::pair<double, double>> sites;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field.is_logical(i)) sites.emplace_back(field.radius_um(i), field.p1(i));
    }
    std::sort(sites.begin(), sites.end());
    std::vector<double> p1(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) p1[i] = sites[i].second;

    std::vector<InfidelityPoint> out;
    out.reserve(r_cuts_um.size());
    for (double r_cut : r_cuts_um) {
        const auto res = overlap_infidelity(p1, [&](std::size_t i) { return sites[i].first <= r_cut + radius_tol_um; });
        out.push_back({r_cut, res.count, res.infidelity});
    }
    return out;
}

std::vector<OccupationDistribution> radial_stage_distributions(const ThermalParams& thermal, const TrapParams& trap,
                                                               const Schedule& schedule, double r_um,
                                                               const MergeTable& table) {
    schedule.validate();
    ThermalParams local = thermal;
    local.mu_U = local_chemical_potential(r_um, thermal.mu_U, trap);
    std::vector<OccupationDistribution> stages{occupation_distribution(local)};
    std::optional<OccupationDistribution> reservoir;
    int aux_stride = 1;
    int serial_steps = 0;
    for (const auto& step : schedule.steps) {
        const OccupationDistribution& cur = stages.back();
        if (const auto* f = std::get_if<FilterStep>(&step)) {
            stages.push_back(filter_sweep(cur, f->n_max, schedule.errors.per_pulse_error));
        } else if (const auto* m = std::get_if<MergeStep>(&step)) {
            if (m->axis != Axis::aux) throw ContractError("in-plane merges break rotational symmetry");
            require_binary(cur);
            if (!reservoir) reservoir = cur;
            if (m->mode == IterationMode::parallel) {
                stages.push_back(merged_site(cur[1], cur[1], cur[1], table, schedule.errors, aux_stride));
                aux_stride *= 3;
            } else {
                ++serial_steps;
                const double res = (*reservoir)[1];
                stages.push_back(merged_site(res, cur[1], res, table, schedule.errors, serial_steps));
            }
        } else {
            const auto& s = std::get<SkimStep>(step);
            stages.push_back(r_um <= s.r_cut_um + radius_tol_um ? cur : OccupationDistribution::delta(0));
        }
    }
    return stages;
}

EntropyPeak entropy_peak(const ThermalParams& thermal, const TrapParams& trap, const Schedule& schedule,
                         std::size_t stage, const MergeTable& table) {
    auto gap = [&](double r) {
        const auto stages = radial_stage_distributions(thermal, trap, schedule, r, table);
        const auto& d = stages.at(stage);
        return d[0] - d[1];
    };
    double lo = 0.0;
    if (gap(lo) >= 0.0) throw NumericError("no P(0)=P(1) crossing: the centre is already mostly vacant");
    double hi = std::max(trap.spacing_um, radius_at_chemical_potential(std::min(thermal.mu_U, -5.0 * thermal.T_U),
                                                                       thermal.mu_U, trap));
    for (int i = 0; gap(hi) <= 0.0; ++i) {
        if (i > 60) throw NumericError("P(0)=P(1) crossing not bracketed");
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    const auto stages = radial_stage_distributions(thermal, trap, schedule, r, table);
    return {r, site_entropy(stages.at(stage), EntropyMode::binary)};
}

void write_snapshot(std::ostream& out, const LatticeField& field) {
    char buf[64];
    out << "# lattice snapshot v1\n";
    out << "mode " << (field.mode() == FieldMode::analytic ? "analytic" : "sampled") << '\n';
    out << "radius_sites " << field.radius_sites() << '\n';
    std::snprintf(buf, sizeof buf, "%.12e", field.spacing_um());
    out << "spacing_um " << buf << '\n';
    out << "stride " << field.stride(Axis::x) << ' ' << field.stride(Axis::y) << ' ' << field.stride(Axis::aux)
        << '\n';
    out << "sites " << field.size() << '\n';
    out << (field.mode() == FieldMode::analytic ? "# ix iy r_um logical n_cap p0..p_ncap\n"
                                                : "# ix iy r_um logical occupation\n");
    for (std::size_t i = 0; i < field.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12e", field.radius_um(i));
        out << field.ix(i) << ' ' << field.iy(i) << ' ' << buf << ' ' << (field.is_logical(i) ? 1 : 0);
        if (field.mode() == FieldMode::analytic) {
            const auto& d = field.dist(i);
            out << ' ' << d.n_cap();
            for (double p : d.probabilities()) {
                std::snprintf(buf, sizeof buf, "%.12e", p);
                out << ' ' << buf;
            }
        } else {
            out << ' ' << field.occupation(i);
        }
        out << '\n';
    }
}

}  // namespace purify
