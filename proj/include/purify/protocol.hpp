#pragma once

// Number filtering and the three-well vacancy-filling merge.
//
// The merge is a state machine over three wells (left, middle = target,
// right). Density-dependent Raman pulses act on a well only when the
// interaction shift of their transition lies inside the resonance window,
// so the same code path decides both the addressed configurations and the
// spectators that a pulse must leave untouched.

#include <array>
#include <random>
#include <string>
#include <vector>

#include "purify/oscillator.hpp"
#include "purify/thermo.hpp"

namespace purify {

struct ThreeWellState {
    WellConfig left;
    WellConfig middle;
    WellConfig right;

    bool operator==(const ThreeWellState&) const = default;
    std::size_t atom_count() const { return left.size() + middle.size() + right.size(); }
    std::string to_string() const;
};

struct StepSnapshot {
    std::string label;
    ThreeWellState state;
};

struct MergeOutcome {
    WellConfig middle_final;
    bool ground_occupied = false;
    std::vector<StepSnapshot> trace;

    /// One line per step: `<label>: L=<cfg> M=<cfg> R=<cfg>`.
    std::string trace_text() const;
};

enum class IterationMode { parallel, serial };

/// Binary initial occupations of the three wells.
struct Occupancy3 {
    int left = 0;
    int middle = 0;
    int right = 0;
};

/// Which stages of one merge went wrong. Merge failures lose the incoming
/// atom; pulse failures suppress the addressed transfer, or excite the lowest
/// alpha atom of a spectator well out of the ground manifold.
struct PulseFailures {
    bool merge_right = false;
    bool remove_excited = false;
    bool merge_left = false;
    bool ancilla_transfer = false;
};

/// Per-stage failure probabilities.
struct ErrorModel {
    double pulse_error = 0.0;       ///< each conditional Raman pulse
    double merge_infidelity = 0.0;  ///< each unitary well merge

    void validate() const;
    bool ideal() const { return pulse_error == 0.0 && merge_infidelity == 0.0; }
};

/// Minimum |shift difference| (U00 units) separating addressed and spectator
/// transitions; pulses resonate within half of it.
inline constexpr double default_discrimination_u00 = 0.125;

/// Occupation-resolved Raman transfer (alpha, source_nu) -> (beta, dest_nu).
struct RamanPulse {
    std::string label;
    int source_nu = 0;
    int dest_nu = 0;
    double resonance_u00 = 0.0;
    bool density_dependent = true;

    int sideband() const { return dest_nu - source_nu; }
};

/// Pulse of the right merge: (alpha,1) -> (beta,2) tuned to {(a,0),(a,1)}.
RamanPulse removal_pulse(const InteractionMatrix& matrix);
/// Pulse of the left merge: (alpha,2) -> (beta,0) tuned to {(a,1),(a,2)}.
RamanPulse ancilla_pulse(const InteractionMatrix& matrix);
/// Filtering pulse addressing wells holding exactly n ground-state atoms.
RamanPulse filter_pulse(int n, const InteractionMatrix& matrix);

/// Shift of moving one (alpha, source) atom of `config` to (beta, dest).
double move_shift(const WellConfig& config, int source_nu, int dest_nu, const InteractionMatrix& matrix);

// --- filtering -------------------------------------------------------------

/// Sweeps pulses for n = n_max .. 2, each followed by removal of beta atoms.
OccupationDistribution filter_sweep(const OccupationDistribution& dist, int n_max, double per_pulse_error);

/// One stochastic realisation of the sweep on a site holding `n` atoms.
template <class Rng>
int filter_sweep_sample(int n, int n_max, double per_pulse_error, Rng& rng) {
    if (n < 2 || n > n_max) return n;
    std::bernoulli_distribution fail(per_pulse_error);
    while (n >= 2) {
        if (per_pulse_error > 0.0 && fail(rng)) return n;
        --n;
    }
    return n;
}

// --- three-well merge ------------------------------------------------------

ThreeWellState merge_right(const ThreeWellState& state, bool incoming_lost = false);

ThreeWellState conditional_remove_excited(const ThreeWellState& state, const InteractionMatrix& matrix,
                                          double discrimination_threshold = default_discrimination_u00,
                                          bool pulse_failed = false);

ThreeWellState merge_left(const ThreeWellState& state, bool incoming_lost = false);

ThreeWellState ancilla_assisted_transfer(const ThreeWellState& state, const InteractionMatrix& matrix,
                                         double discrimination_threshold = default_discrimination_u00,
                                         bool pulse_failed = false);

/// Removes every excited middle-well atom, then relabels (beta,0) as (alpha,0).
MergeOutcome sweep_remove_excited(const ThreeWellState& state);

/// Full merge of binary initial occupations.
MergeOutcome merge_protocol(const Occupancy3& occupancy, const InteractionMatrix& matrix,
                            const PulseFailures& failures = {},
                            double discrimination_threshold = default_discrimination_u00);

template <class Rng>
PulseFailures draw_failures(const ErrorModel& errors, Rng& rng) {
    PulseFailures f;
    if (errors.ideal()) return f;
    std::bernoulli_distribution merge(errors.merge_infidelity);
    std::bernoulli_distribution pulse(errors.pulse_error);
    f.merge_right = merge(rng);
    f.remove_excited = pulse(rng);
    f.merge_left = merge(rng);
    f.ancilla_transfer = pulse(rng);
    return f;
}

/// Outcomes of merge_protocol for all 8 inputs x 16 failure patterns.
class MergeTable {
public:
    explicit MergeTable(const InteractionMatrix& matrix,
                        double discrimination_threshold = default_discrimination_u00);

    bool ground_occupied(const Occupancy3& occupancy, const PulseFailures& failures = {}) const;

    /// P(target ground state occupied) after one merge of independent wells
    /// with the given P(1), by enumerating inputs and failure branches.
    double success_probability(double p1_left, double p1_middle, double p1_right,
                               const ErrorModel& errors = {}) const;

private:
    std::array<std::array<bool, 16>, 8> occupied_{};
};

double merge_success_probability(double p1_left, double p1_middle, double p1_right,
                                 const InteractionMatrix& matrix, const ErrorModel& errors = {});

/// 2 eps^2 - eps^3.
double vacancy_after_merge(double eps);

/// eps_1 .. eps_steps of repeated merging.
std::vector<double> vacancy_recursion(double eps0, int steps, IterationMode mode);

// --- spectral discrimination audit ------------------------------------------

struct PulseAudit {
    RamanPulse pulse;
    WellConfig addressed;
    std::vector<WellConfig> spectators;
    /// Smallest |shift(spectator move) - resonance| over all spectator moves.
    double min_separation_u00 = 0.0;
};

/// Enumerates the configurations each density-dependent pulse meets in the
/// ideal protocol (all eight merge inputs plus filter occupations 1..n_max).
std::vector<PulseAudit> audit_pulse_discrimination(const InteractionMatrix& matrix, int filter_n_max);

}  // namespace purify
