#include "purify/pulse_errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "purify/error.hpp"

namespace purify {

namespace {

constexpr double pi = std::numbers::pi;

double detuning_rad_s(double detuning_u00, double u00_hz) { return 2.0 * pi * detuning_u00 * u00_hz; }

PulseCandidate evaluate(double t, std::span<const double> detunings_u00, const LossModel& loss,
                        const ObjectiveWeights& weights) {
    PulseCandidate c;
    c.t_s = t;
    c.chi_rad_s = pi / t;
    for (double d : detunings_u00) {
        c.spectator = std::max(c.spectator, spectator_error(c.chi_rad_s, d, loss.u00_hz, t));
    }
    c.loss = loss.loss_probability(t);
    c.eps = weights.w_spectator * c.spectator + weights.w_loss * c.loss;
    return c;
}

}  // namespace

void PulseSpec::validate() const {
    if (!(chi_rad_s > 0.0)) throw ContractError("Rabi frequency must be positive");
    if (!(t_s > 0.0)) throw ContractError("pulse duration must be positive");
    if (!std::isfinite(delta_rad_s)) throw ContractError("detuning must be finite");
}

double PulseSpec::generalized_rabi() const { return std::hypot(chi_rad_s, delta_rad_s); }

void LossModel::validate() const {
    if (!(tau_s > 0.0)) throw ContractError("lifetime must be positive");
    if (!(u00_hz > 0.0)) throw ContractError("U00/h must be positive");
}

double LossModel::loss_probability(double t_s) const {
    if (std::isinf(tau_s)) return 0.0;
    return -std::expm1(-t_s / tau_s);
}

std::vector<double> TimeGrid::durations() const {
    if (!(t_min_s > 0.0 && t_max_s >= t_min_s) || points < 1) {
        throw ContractError("empty duration grid");
    }
    std::vector<double> t(static_cast<std::size_t>(points));
    if (points == 1) {
        t[0] = t_min_s;
        return t;
    }
    const double span = std::log(t_max_s / t_min_s);
    for (int i = 0; i < points; ++i) {
        t[static_cast<std::size_t>(i)] = t_min_s * std::exp(span * i / (points - 1));
    }
    return t;
}

double excited_population(const PulseSpec& pulse) {
    pulse.validate();
    const double omega = pulse.generalized_rabi();
    const double ratio = pulse.chi_rad_s / omega;
    // 1 - cos(x) = 2 sin^2(x/2) keeps revivals at exact zero.
    const double s = std::sin(0.5 * omega * pulse.t_s);
    return ratio * ratio * s * s;
}

double spectator_error(double chi_rad_s, double detuning_u00, double u00_hz, double t_s) {
    if (std::isinf(detuning_u00)) return 0.0;
    return excited_population({chi_rad_s, detuning_rad_s(detuning_u00, u00_hz), t_s});
}

double commensurate_duration(int k, double detuning_u00, double u00_hz) {
    if (k < 1) throw ContractError("commensurate index starts at 1");
    if (!(detuning_u00 > 0.0)) throw ContractError("commensurate durations need a nonzero detuning");
    return pi * std::sqrt(4.0 * k * k - 1.0) / detuning_rad_s(detuning_u00, u00_hz);
}

PulseOptimum optimize_pulse(const LossModel& loss, std::span<const double> detunings_u00,
                            const ObjectiveWeights& weights, const TimeGrid& grid) {
    loss.validate();
    if (detunings_u00.empty()) throw ContractError("at least one spectator detuning is required");
    if (weights.w_spectator < 0.0 || weights.w_loss < 0.0) throw ContractError("weights must be non-negative");
    const auto durations = grid.durations();

    PulseOptimum out;
    out.scan.reserve(durations.size());
    for (double t : durations) out.scan.push_back(evaluate(t, detunings_u00, loss, weights));
    out.grid_best = *std::min_element(out.scan.begin(), out.scan.end(),
                                      [](const PulseCandidate& a, const PulseCandidate& b) { return a.eps < b.eps; });

    double smallest = std::numeric_limits<double>::infinity();
    for (double d : detunings_u00) smallest = std::min(smallest, std::abs(d));
    out.degenerate = smallest == 0.0;
    if (out.degenerate) return out;

    for (int k = 1;; ++k) {
        const double t = commensurate_duration(k, smallest, loss.u00_hz);
        if (t > grid.t_max_s) break;
        if (t < grid.t_min_s) continue;
        const auto c = evaluate(t, detunings_u00, loss, weights);
        if (!out.commensurate_best || c.eps < out.commensurate_best->eps) {
            out.commensurate_best = c;
            out.commensurate_k = k;
        }
    }
    return out;
}

PulseOptimum optimize_pulse(const LossModel& loss, double detuning_u00, const ObjectiveWeights& weights,
                            const TimeGrid& grid) {
    return optimize_pulse(loss, std::span<const double>(&detuning_u00, 1), weights, grid);
}

LossWeightFit fit_loss_weight(std::span<const OperatingPoint> points, double tau_s, double detuning_u00) {
    if (points.empty()) throw ContractError("no operating points to fit");
    LossWeightFit fit;
    double num = 0.0;
    double den = 0.0;
    std::vector<double> spectator, lossp;
    for (const auto& p : points) {
        const LossModel loss{tau_s, p.u00_hz};
        loss.validate();
        const double a = spectator_error(pi / p.t_s, detuning_u00, p.u00_hz, p.t_s);
        const double b = loss.loss_probability(p.t_s);
        spectator.push_back(a);
        lossp.push_back(b);
        fit.per_point_weight.push_back(b > 0.0 ? (p.eps - a) / b : std::numeric_limits<double>::quiet_NaN());
        // Residual (a + w b - eps)/eps is linear in w.
        num += (b / p.eps) * ((p.eps - a) / p.eps);
        den += (b / p.eps) * (b / p.eps);
    }
    fit.best_weight = den > 0.0 ? std::max(0.0, num / den) : 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        fit.relative_residual.push_back((spectator[i] + fit.best_weight * lossp[i] - points[i].eps) / points[i].eps);
    }
    return fit;
}

}  // namespace purify
