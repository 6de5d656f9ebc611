#include "purify/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>

#include "purify/error.hpp"

namespace purify {

namespace {

constexpr Atom ground_alpha{Hyperfine::alpha, 0};

WellConfig ground_atoms(std::size_t n, std::size_t cap = WellConfig::default_cap) {
    return WellConfig(std::vector<Atom>(n, ground_alpha), std::max(cap, n));
}

void require_ground_only(const WellConfig& well, const char* which) {
    for (const Atom& a : well.atoms()) {
        if (a.nu != 0) {
            throw ContractError(std::string(which) + " well must hold only ground-state atoms, found " +
                                well.to_string());
        }
    }
}

std::size_t count_level(const WellConfig& well, int nu) {
    return static_cast<std::size_t>(std::count_if(well.atoms().begin(), well.atoms().end(),
                                                  [nu](const Atom& a) { return a.nu == nu; }));
}

void strip_beta(WellConfig& well) {
    std::vector<Atom> kept;
    for (const Atom& a : well.atoms()) {
        if (a.state == Hyperfine::alpha) kept.push_back(a);
    }
    well = WellConfig(std::move(kept), well.cap());
}

bool resonant(const WellConfig& well, const RamanPulse& pulse, const InteractionMatrix& matrix,
              double threshold) {
    if (well.count({Hyperfine::alpha, pulse.source_nu}) == 0) return false;
    const double shift = move_shift(well, pulse.source_nu, pulse.dest_nu, matrix);
    return std::abs(shift - pulse.resonance_u00) < 0.5 * threshold;
}

// Drives one pulse on a well. Returns the well after the transfer (or after
// the faulty behaviour, if the pulse failed).
WellConfig drive(const WellConfig& well, const RamanPulse& pulse, const InteractionMatrix& matrix,
                 double threshold, bool failed) {
    WellConfig out = well;
    if (resonant(well, pulse, matrix, threshold)) {
        if (!failed) {
            out.remove({Hyperfine::alpha, pulse.source_nu});
            out.add({Hyperfine::beta, pulse.dest_nu});
        }
        return out;
    }
    if (failed) {
        auto lowest = std::find_if(well.atoms().begin(), well.atoms().end(),
                                   [](const Atom& a) { return a.state == Hyperfine::alpha; });
        if (lowest != well.atoms().end()) {
            const Atom victim = *lowest;
            out.remove(victim);
            out.add({Hyperfine::beta, victim.nu + std::abs(pulse.sideband())});
        }
    }
    return out;
}

}  // namespace

std::string ThreeWellState::to_string() const {
    return "L=" + left.to_string() + " M=" + middle.to_string() + " R=" + right.to_string();
}

std::string MergeOutcome::trace_text() const {
    std::ostringstream out;
    for (const auto& step : trace) out << step.label << ": " << step.state.to_string() << '\n';
    out << "ground_occupied: " << (ground_occupied ? 1 : 0) << '\n';
    return out.str();
}

void ErrorModel::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(pulse_error) || !prob(merge_infidelity)) {
        throw ContractError("error probabilities must lie in [0,1]");
    }
}

double move_shift(const WellConfig& config, int source_nu, int dest_nu, const InteractionMatrix& matrix) {
    WellConfig moved = config;
    if (!moved.remove({Hyperfine::alpha, source_nu})) {
        throw ContractError("no (alpha," + std::to_string(source_nu) + ") atom in " + config.to_string());
    }
    moved.add({Hyperfine::beta, dest_nu});
    return transition_detuning(config, moved, matrix);
}

RamanPulse removal_pulse(const InteractionMatrix& matrix) {
    const WellConfig addressed{{Hyperfine::alpha, 0}, {Hyperfine::alpha, 1}};
    return {"remove_excited", 1, 2, move_shift(addressed, 1, 2, matrix), true};
}

RamanPulse ancilla_pulse(const InteractionMatrix& matrix) {
    const WellConfig addressed{{Hyperfine::alpha, 1}, {Hyperfine::alpha, 2}};
    return {"ancilla_transfer", 2, 0, move_shift(addressed, 2, 0, matrix), true};
}

RamanPulse filter_pulse(int n, const InteractionMatrix& matrix) {
    if (n < 2) throw ContractError("filter pulses address n >= 2");
    const auto addressed = ground_atoms(static_cast<std::size_t>(n));
    return {"filter_n" + std::to_string(n), 0, 2, move_shift(addressed, 0, 2, matrix), true};
}

OccupationDistribution filter_sweep(const OccupationDistribution& dist, int n_max, double per_pulse_error) {
    if (n_max < 2) throw ContractError("filter sweep needs n_max >= 2");
    if (!(per_pulse_error >= 0.0 && per_pulse_error < 1.0)) {
        throw ContractError("per-pulse error must lie in [0,1)");
    }
    const int cap = std::max(dist.n_cap(), 1);
    std::vector<double> out(static_cast<std::size_t>(cap + 1), 0.0);
    out[0] = dist[0];
    const double ok = 1.0 - per_pulse_error;
    for (int n = 1; n <= cap; ++n) {
        const double p = dist[n];
        if (p == 0.0) continue;
        if (n == 1 || n > n_max) {
            out[static_cast<std::size_t>(n)] += p;
            continue;
        }
        // Transfers n -> n-1 -> ... -> 1; the first failure strands the site.
        double survive = 1.0;
        for (int k = n; k >= 2; --k) {
            out[static_cast<std::size_t>(k)] += p * survive * per_pulse_error;
            survive *= ok;
        }
        out[1] += p * survive;
    }
    return OccupationDistribution(std::move(out));
}

ThreeWellState merge_right(const ThreeWellState& state, bool incoming_lost) {
    require_ground_only(state.right, "right");
    ThreeWellState out = state;
    if (!incoming_lost) {
        for (const Atom& a : state.right.atoms()) out.middle.add({a.state, 1});
    }
    out.right = WellConfig{};
    if (count_level(out.middle, 1) > 1) {
        throw ContractError("merge would place more than one atom in nu=1: " + out.middle.to_string());
    }
    return out;
}

ThreeWellState conditional_remove_excited(const ThreeWellState& state, const InteractionMatrix& matrix,
                                          double discrimination_threshold, bool pulse_failed) {
    ThreeWellState out = state;
    out.middle = drive(state.middle, removal_pulse(matrix), matrix, discrimination_threshold, pulse_failed);
    strip_beta(out.middle);
    return out;
}

ThreeWellState merge_left(const ThreeWellState& state, bool incoming_lost) {
    require_ground_only(state.left, "left");
    ThreeWellState out = state;
    if (!incoming_lost) {
        for (const Atom& a : state.left.atoms()) out.middle.add({a.state, 2});
    }
    out.left = WellConfig{};
    return out;
}

ThreeWellState ancilla_assisted_transfer(const ThreeWellState& state, const InteractionMatrix& matrix,
                                         double discrimination_threshold, bool pulse_failed) {
    ThreeWellState out = state;
    out.middle = drive(state.middle, ancilla_pulse(matrix), matrix, discrimination_threshold, pulse_failed);
    return out;
}

MergeOutcome sweep_remove_excited(const ThreeWellState& state) {
    std::vector<Atom> kept;
    for (const Atom& a : state.middle.atoms()) {
        if (a.nu == 0) kept.push_back(ground_alpha);  // final carrier pulse maps (beta,0) -> (alpha,0)
    }
    MergeOutcome outcome;
    outcome.middle_final = WellConfig(std::move(kept), state.middle.cap());
    outcome.ground_occupied = outcome.middle_final.size() == 1;
    outcome.trace.push_back({"sweep_remove_excited", {state.left, outcome.middle_final, state.right}});
    return outcome;
}

MergeOutcome merge_protocol(const Occupancy3& occupancy, const InteractionMatrix& matrix,
                            const PulseFailures& failures, double discrimination_threshold) {
    for (int n : {occupancy.left, occupancy.middle, occupancy.right}) {
        if (n != 0 && n != 1) throw ContractError("merge protocol expects binary occupations");
    }
    std::vector<StepSnapshot> trace;
    ThreeWellState s{ground_atoms(static_cast<std::size_t>(occupancy.left)),
                     ground_atoms(static_cast<std::size_t>(occupancy.middle)),
                     ground_atoms(static_cast<std::size_t>(occupancy.right))};
    trace.push_back({"initial", s});
    s = merge_right(s, failures.merge_right);
    trace.push_back({"merge_right", s});
    s = conditional_remove_excited(s, matrix, discrimination_threshold, failures.remove_excited);
    trace.push_back({"remove_excited", s});
    s = merge_left(s, failures.merge_left);
    trace.push_back({"merge_left", s});
    s = ancilla_assisted_transfer(s, matrix, discrimination_threshold, failures.ancilla_transfer);
    trace.push_back({"ancilla_transfer", s});
    MergeOutcome outcome = sweep_remove_excited(s);
    trace.insert(trace.end(), outcome.trace.begin(), outcome.trace.end());
    outcome.trace = std::move(trace);
    return outcome;
}

namespace {

int input_index(const Occupancy3& o) { return (o.left << 2) | (o.middle << 1) | o.right; }

int failure_index(const PulseFailures& f) {
    return (f.merge_right ? 1 : 0) | (f.remove_excited ? 2 : 0) | (f.merge_left ? 4 : 0) |
           (f.ancilla_transfer ? 8 : 0);
}

}  // namespace

MergeTable::MergeTable(const InteractionMatrix& matrix, double discrimination_threshold) {
    for (int cfg = 0; cfg < 8; ++cfg) {
        const Occupancy3 occ{(cfg >> 2) & 1, (cfg >> 1) & 1, cfg & 1};
        for (int b = 0; b < 16; ++b) {
            const PulseFailures f{(b & 1) != 0, (b & 2) != 0, (b & 4) != 0, (b & 8) != 0};
            occupied_[static_cast<std::size_t>(cfg)][static_cast<std::size_t>(b)] =
                merge_protocol(occ, matrix, f, discrimination_threshold).ground_occupied;
        }
    }
}

bool MergeTable::ground_occupied(const Occupancy3& occupancy, const PulseFailures& failures) const {
    for (int n : {occupancy.left, occupancy.middle, occupancy.right}) {
        if (n != 0 && n != 1) throw ContractError("merge protocol expects binary occupations");
    }
    return occupied_[static_cast<std::size_t>(input_index(occupancy))]
                    [static_cast<std::size_t>(failure_index(failures))];
}

double MergeTable::success_probability(double p1_left, double p1_middle, double p1_right,
                                       const ErrorModel& errors) const {
    errors.validate();
    for (double p : {p1_left, p1_middle, p1_right}) {
        if (!(p >= 0.0 && p <= 1.0)) throw ContractError("P(1) outside [0,1]");
    }
    auto weight = [](int bit, double p) { return bit ? p : 1.0 - p; };
    const double pm = errors.merge_infidelity;
    const double pp = errors.pulse_error;
    const int branches = errors.ideal() ? 1 : 16;

    double success = 0.0;
    for (int cfg = 0; cfg < 8; ++cfg) {
        const double p_cfg = weight((cfg >> 2) & 1, p1_left) * weight((cfg >> 1) & 1, p1_middle) *
                             weight(cfg & 1, p1_right);
        if (p_cfg == 0.0) continue;
        for (int b = 0; b < branches; ++b) {
            if (!occupied_[static_cast<std::size_t>(cfg)][static_cast<std::size_t>(b)]) continue;
            const double p_branch = errors.ideal() ? 1.0
                                                   : weight(b & 1, pm) * weight((b >> 1) & 1, pp) *
                                                         weight((b >> 2) & 1, pm) * weight((b >> 3) & 1, pp);
            success += p_cfg * p_branch;
        }
    }
    return std::min(success, 1.0);
}

double merge_success_probability(double p1_left, double p1_middle, double p1_right,
                                 const InteractionMatrix& matrix, const ErrorModel& errors) {
    return MergeTable(matrix).success_probability(p1_left, p1_middle, p1_right, errors);
}

double vacancy_after_merge(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ContractError("vacancy outside [0,1]");
    return 2.0 * eps * eps - eps * eps * eps;
}

std::vector<double> vacancy_recursion(double eps0, int steps, IterationMode mode) {
    if (steps < 1) throw ContractError("recursion needs at least one step");
    if (!(eps0 >= 0.0 && eps0 <= 1.0)) throw ContractError("vacancy outside [0,1]");
    std::vector<double> eps;
    eps.reserve(static_cast<std::size_t>(steps));
    double prev = eps0;
    for (int i = 1; i <= steps; ++i) {
        const double next = (mode == IterationMode::parallel || i == 1)
                                 ? 2.0 * prev * prev - prev * prev * prev
                                 : 2.0 * prev * eps0 - prev * eps0 * eps0;
        eps.push_back(next);
        prev = next;
    }
    return eps;
}

std::vector<PulseAudit> audit_pulse_discrimination(const InteractionMatrix& matrix, int filter_n_max) {
    if (filter_n_max < 2) throw ContractError("filter_n_max must be at least 2");

    auto separation = [&](const RamanPulse& pulse, const WellConfig& spectator) {
        double best = std::numeric_limits<double>::infinity();
        std::set<int> levels;
        for (const Atom& a : spectator.atoms()) {
            if (a.state == Hyperfine::alpha) levels.insert(a.nu);
        }
        for (int nu : levels) {
            const int dest = nu + pulse.sideband();
            if (dest < 0 || dest > matrix.nu_max()) continue;
            best = std::min(best, std::abs(move_shift(spectator, nu, dest, matrix) - pulse.resonance_u00));
        }
        return best;
    };
    auto finish = [&](PulseAudit audit) {
        audit.min_separation_u00 = std::numeric_limits<double>::infinity();
        for (const auto& s : audit.spectators) {
            audit.min_separation_u00 = std::min(audit.min_separation_u00, separation(audit.pulse, s));
        }
        return audit;
    };

    std::vector<PulseAudit> audits;

    // Middle-well configurations met by each merge pulse, over all eight inputs.
    std::vector<WellConfig> before_removal, before_ancilla;
    auto remember = [](std::vector<WellConfig>& bucket, const WellConfig& cfg) {
        if (std::find(bucket.begin(), bucket.end(), cfg) == bucket.end()) bucket.push_back(cfg);
    };
    for (int cfg = 0; cfg < 8; ++cfg) {
        const auto outcome = merge_protocol({(cfg >> 2) & 1, (cfg >> 1) & 1, cfg & 1}, matrix);
        for (const auto& step : outcome.trace) {
            if (step.label == "merge_right") remember(before_removal, step.state.middle);
            if (step.label == "merge_left") remember(before_ancilla, step.state.middle);
        }
    }
    const std::pair<RamanPulse, WellConfig> merge_pulses[] = {
        {removal_pulse(matrix), WellConfig{{Hyperfine::alpha, 0}, {Hyperfine::alpha, 1}}},
        {ancilla_pulse(matrix), WellConfig{{Hyperfine::alpha, 1}, {Hyperfine::alpha, 2}}},
    };
    const std::vector<WellConfig>* seen[] = {&before_removal, &before_ancilla};
    for (int i = 0; i < 2; ++i) {
        PulseAudit audit{merge_pulses[i].first, merge_pulses[i].second, {}, 0.0};
        for (const auto& cfg : *seen[i]) {
            if (!cfg.empty() && !(cfg == audit.addressed)) audit.spectators.push_back(cfg);
        }
        audits.push_back(finish(std::move(audit)));
    }

    const auto cap = static_cast<std::size_t>(filter_n_max);
    for (int n = filter_n_max; n >= 2; --n) {
        PulseAudit audit{filter_pulse(n, matrix), ground_atoms(static_cast<std::size_t>(n), cap), {}, 0.0};
        for (int other = 1; other <= filter_n_max; ++other) {
            if (other != n) audit.spectators.push_back(ground_atoms(static_cast<std::size_t>(other), cap));
        }
        audits.push_back(finish(std::move(audit)));
    }
    return audits;
}

}  // namespace purify
