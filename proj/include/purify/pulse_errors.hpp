#pragma once

// Square-pulse two-level dynamics and the pulse-duration trade-off between
// off-resonant spectator excitation and finite trap lifetime.

#include <optional>
#include <span>
#include <vector>

namespace purify {

struct PulseSpec {
    double chi_rad_s = 0.0;    ///< Rabi frequency
    double delta_rad_s = 0.0;  ///< detuning from the driven transition
    double t_s = 0.0;          ///< duration

    void validate() const;
    double generalized_rabi() const;
};

struct LossModel {
    double tau_s = 1.0;  ///< 1/e lifetime; +inf disables loss
    double u00_hz = 1000.0;

    void validate() const;
    double loss_probability(double t_s) const;
};

/// eps(t) = w_spectator * max_spectator P_e + w_loss * (1 - exp(-t/tau)).
struct ObjectiveWeights {
    double w_spectator = 1.0;
    double w_loss = 0.1;
};

/// Log-spaced durations.
struct TimeGrid {
    double t_min_s = 10e-6;
    double t_max_s = 100e-3;
    int points = 2000;

    std::vector<double> durations() const;
};

/// P_e = (chi/Omega)^2 (1 - cos(Omega t)) / 2, Omega = sqrt(chi^2 + Delta^2).
double excited_population(const PulseSpec& pulse);

/// Excited population of a spectator whose transition is detuned by
/// `detuning_u00` (in U00 units, U00/h = u00_hz).
double spectator_error(double chi_rad_s, double detuning_u00, double u00_hz, double t_s);

struct PulseCandidate {
    double t_s = 0.0;
    double chi_rad_s = 0.0;
    double spectator = 0.0;  ///< max over spectators
    double loss = 0.0;       ///< 1 - exp(-t/tau)
    double eps = 0.0;        ///< weighted objective
};

struct PulseOptimum {
    std::vector<PulseCandidate> scan;
    PulseCandidate grid_best;
    /// Best duration among those where every spectator completes whole
    /// generalized Rabi cycles for the smallest detuning (Omega t = 2 pi k).
    std::optional<PulseCandidate> commensurate_best;
    int commensurate_k = 0;
    /// No detuning separates spectators from the target.
    bool degenerate = false;
};

/// Pi-pulse (chi = pi/t) duration scan.
PulseOptimum optimize_pulse(const LossModel& loss, std::span<const double> detunings_u00,
                            const ObjectiveWeights& weights = {}, const TimeGrid& grid = {});
PulseOptimum optimize_pulse(const LossModel& loss, double detuning_u00, const ObjectiveWeights& weights = {},
                            const TimeGrid& grid = {});

/// Durations t_k = pi sqrt(4k^2 - 1) / Delta at which a pi-pulse returns a
/// spectator detuned by Delta to its initial state.
double commensurate_duration(int k, double detuning_u00, double u00_hz);

/// A reported operating point: error `eps` at U00/h and duration t.
struct OperatingPoint {
    double u00_hz = 0.0;
    double t_s = 0.0;
    double eps = 0.0;
};

struct LossWeightFit {
    std::vector<double> per_point_weight;  ///< weight reproducing each point alone
    double best_weight = 0.0;              ///< least-squares in relative error, w >= 0
    std::vector<double> relative_residual;
};

/// Fits w_loss so the objective at each point's (U00, t) matches its eps.
LossWeightFit fit_loss_weight(std::span<const OperatingPoint> points, double tau_s, double detuning_u00);

}  // namespace purify
