#pragma once

// 2D inhomogeneous lattice engine.
//
// A LatticeField is a (2R+1) x (2R+1) grid centred on the trap. Each site
// carries an occupation distribution (analytic mode) or one sampled
// occupation (sampled mode). Merges along an in-plane axis partition lattice
// lines into disjoint triples anchored on the centre site; the consumed
// neighbours become vacant and the logical lattice contracts by 3 along that
// axis. Merges along Axis::aux draw partners from an unconfined auxiliary
// direction (stacked planes), whose wells share the site's own statistics,
// so every site keeps its place and rotational symmetry survives.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "purify/oscillator.hpp"
#include "purify/protocol.hpp"
#include "purify/thermo.hpp"

namespace purify {

enum class Axis { x, y, aux };
enum class FieldMode { analytic, sampled };
enum class ProfileQuantity { p1, entropy, defect };

const char* to_string(Axis axis);
const char* to_string(IterationMode mode);
const char* to_string(ProfileQuantity quantity);

struct FilterStep {
    int n_max = 10;
};

struct MergeStep {
    Axis axis = Axis::aux;
    IterationMode mode = IterationMode::parallel;
};

struct SkimStep {
    double r_cut_um = 0.0;
};

using ScheduleStep = std::variant<FilterStep, MergeStep, SkimStep>;

struct ErrorConfig {
    double per_pulse_error = 0.0;  ///< filter pulses
    ErrorModel merge;              ///< conditional pulses and well merges
    double eps_floor = 0.0;        ///< vacancy floor applied after each merge
    double transport_infidelity_per_site = 0.0;

    void validate() const;
};

struct Schedule {
    std::vector<ScheduleStep> steps;
    ErrorConfig errors;

    /// At most one skim, only as the final step; filter errors cannot feed a
    /// merge (merges need binary occupations).
    void validate() const;

    /// Filter(n_max) followed by `iterations` merges.
    static Schedule filter_then_merge(int n_max, int iterations, Axis axis = Axis::aux,
                                      IterationMode mode = IterationMode::parallel);
};

/// Kahan-Babuska (Neumaier) summation.
class CompensatedSum {
public:
    void add(double v);
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

class LatticeField {
public:
    /// Every site carries `dist`.
    static LatticeField homogeneous(const OccupationDistribution& dist, int radius_sites, double spacing_um);

    FieldMode mode() const { return mode_; }
    int radius_sites() const { return radius_; }
    int side() const { return 2 * radius_ + 1; }
    std::size_t size() const { return static_cast<std::size_t>(side() * side()); }
    double spacing_um() const { return spacing_um_; }

    int ix(std::size_t i) const { return static_cast<int>(i % static_cast<std::size_t>(side())) - radius_; }
    int iy(std::size_t i) const { return static_cast<int>(i / static_cast<std::size_t>(side())) - radius_; }
    std::optional<std::size_t> index(int ix, int iy) const;
    double radius_um(std::size_t i) const;

    /// Site belongs to the current logical lattice (not consumed by merges).
    bool is_logical(std::size_t i) const;
    int stride(Axis axis) const;

    const OccupationDistribution& dist(std::size_t i) const;
    void set_dist(std::size_t i, OccupationDistribution d);
    int occupation(std::size_t i) const;

    double p1(std::size_t i) const;
    std::vector<double> p1_values() const;
    /// Expected (analytic) or actual (sampled) atom number.
    double total_atoms() const;

    /// One realisation drawn site by site.
    template <class Rng>
    LatticeField sample(Rng& rng) const;

private:
    friend LatticeField propagate_merge(const LatticeField&, Axis, IterationMode, const ErrorConfig&,
                                        const MergeTable&);
    friend LatticeField build_thermal_lattice(const ThermalParams&, const TrapParams&, int);
    friend LatticeField skim(const LatticeField&, double);
    friend class MonteCarloEngine;

    LatticeField(int radius_sites, double spacing_um);
    void require_analytic(const char* op) const;

    FieldMode mode_ = FieldMode::analytic;
    int radius_ = 0;
    double spacing_um_ = 0.5;
    std::vector<OccupationDistribution> dists_;
    std::vector<int> occupation_;
    std::array<int, 3> stride_{1, 1, 1};
    std::array<int, 3> serial_steps_{0, 0, 0};
    /// Unpurified (post-filter) distributions, captured at the first merge.
    std::vector<OccupationDistribution> reservoir_;
};

/// Smallest grid radius (sites) covering mu_loc > -5 T_U.
int minimal_grid_radius(const ThermalParams& thermal, const TrapParams& trap);

/// Local-density thermal state; throws ContractError (with the minimal radius)
/// if the grid does not cover mu_loc > -5 T_U.
LatticeField build_thermal_lattice(const ThermalParams& thermal, const TrapParams& trap, int grid_radius_sites);

LatticeField propagate_filter(const LatticeField& field, int n_max, double per_pulse_error = 0.0);

LatticeField propagate_merge(const LatticeField& field, Axis axis, IterationMode mode, const ErrorConfig& errors,
                             const MergeTable& table);

/// Sites with r > r_cut become vacant; a site exactly at r_cut is kept.
LatticeField skim(const LatticeField& field, double r_cut_um);

/// Fields after each step (element 0 is the input).
std::vector<LatticeField> apply_schedule(const LatticeField& field, const Schedule& schedule,
                                         const InteractionMatrix& matrix);

struct ProfilePoint {
    double r_um = 0.0;
    double value = 0.0;
    std::size_t sites = 0;
};

/// Averages `quantity` over logical sites in radial bins centred on k * bin_width.
std::vector<ProfilePoint> radial_profile(const LatticeField& field, ProfileQuantity quantity, double bin_width_um);

/// Largest radius r such that every logical site within r has P(1) >= threshold.
std::optional<double> plateau_radius(const LatticeField& field, double threshold);

struct InfidelityPoint {
    double r_cut_um = 0.0;
    std::size_t sites = 0;
    double infidelity = 0.0;
};

std::vector<InfidelityPoint> infidelity_curve(const LatticeField& field, const std::vector<double>& r_cuts_um);

/// Distinct logical-site radii, ascending.
std::vector<double> site_radii(const LatticeField& field);

/// Per-stage distributions of a single site at radius r (element 0 is the
/// thermal state). Requires a rotationally symmetric schedule (no in-plane merges).
std::vector<OccupationDistribution> radial_stage_distributions(const ThermalParams& thermal, const TrapParams& trap,
                                                               const Schedule& schedule, double r_um,
                                                               const MergeTable& table);

struct EntropyPeak {
    double r_um = 0.0;
    double entropy = 0.0;
};

/// Root of P(0) = P(1) along the radius for the given stage.
EntropyPeak entropy_peak(const ThermalParams& thermal, const TrapParams& trap, const Schedule& schedule,
                         std::size_t stage, const MergeTable& table);

/// Structured-text grid dump: header lines then one line per site.
void write_snapshot(std::ostream& out, const LatticeField& field);

// --- template implementation --------------------------------------------------

int sample_occupation(const OccupationDistribution& dist, double u);

template <class Rng>
LatticeField LatticeField::sample(Rng& rng) const {
    require_analytic("sample");
    LatticeField out = *this;
    out.mode_ = FieldMode::sampled;
    out.occupation_.resize(size());
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (std::size_t i = 0; i < size(); ++i) out.occupation_[i] = sample_occupation(dists_[i], uniform(rng));
    return out;
}

}  // namespace purify
