#pragma once

// Zero-tunnelling grand-canonical statistics of lattice-site occupation.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace purify {

namespace constants {
inline constexpr double planck_j_s = 6.62607015e-34;
inline constexpr double atomic_mass_kg = 1.66053906660e-27;
inline constexpr double rb87_mass_kg = 87.0 * atomic_mass_kg;
}  // namespace constants

/// Chemical potential and temperature in units of the on-site interaction.
struct ThermalParams {
    double mu_U = 0.5;
    double T_U = 0.1;
    int n_cap = 10;

    /// Throws ContractError unless T_U > 0 and n_cap >= 2.
    void validate() const;
};

/// Probability mass over occupation n = 0..n_cap.
class OccupationDistribution {
public:
    OccupationDistribution() : p_{1.0} {}
    /// Checks bounds and normalisation (1e-12).
    explicit OccupationDistribution(std::vector<double> p);

    static OccupationDistribution delta(int n);
    /// P(0) = vacancy, P(1) = 1 - vacancy.
    static OccupationDistribution binary(double vacancy);

    int n_cap() const { return static_cast<int>(p_.size()) - 1; }
    double operator[](int n) const;
    std::span<const double> probabilities() const { return p_; }

    double mean() const;
    /// Mass on n >= 2.
    double multiple_mass() const;

    bool operator==(const OccupationDistribution&) const = default;

private:
    std::vector<double> p_;
};

/// Harmonic confinement and lattice geometry.
struct TrapParams {
    double omega_trap_hz = 80.0;  ///< omega/2pi
    double u_int_hz = 1000.0;     ///< U_int/h
    double mass_kg = constants::rb87_mass_kg;
    double spacing_um = 0.5;

    void validate() const;
    /// V_harm(r)/U_int per um^2.
    double curvature_per_um2() const;
};

enum class EntropyMode { binary, full };

/// Grand-canonical occupation statistics; n_cap grows until P(n_cap) < 1e-12.
OccupationDistribution occupation_distribution(const ThermalParams& params);

/// 1 - P(1).
double defect_probability(const OccupationDistribution& dist);

/// -sum p ln p over n in {0,1} (binary) or all n (full), in nats.
double site_entropy(const OccupationDistribution& dist, EntropyMode mode = EntropyMode::binary);

/// mu_loc(r)/U_int = mu0 - V_harm(r)/U_int.
double local_chemical_potential(double r_um, double mu0_U, const TrapParams& trap);

/// Radius (um) at which mu_loc reaches `mu_loc_U`; requires mu_loc_U <= mu0_U.
double radius_at_chemical_potential(double mu_loc_U, double mu0_U, const TrapParams& trap);

struct OverlapResult {
    std::size_t count = 0;
    double infidelity = 0.0;  ///< 1 - prod P_i(1)
};

/// Overlap with the unit-filled state over the selected sites, in log space.
OverlapResult overlap_infidelity(std::span<const double> p1_by_site,
                                 const std::function<bool(std::size_t)>& selector = {});

}  // namespace purify
