#pragma once

// Harmonic-oscillator overlaps and interaction energies of atoms in one well.
//
// Energies are expressed in units of U00, the interaction of two atoms in the
// vibrational ground state. Only one spatial direction is excited, so the
// transverse overlap factors cancel in every ratio computed here.

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace purify {

enum class Hyperfine { alpha, beta };

/// One atom: internal state and 1D vibrational quantum number.
struct Atom {
    Hyperfine state = Hyperfine::alpha;
    int nu = 0;

    auto operator<=>(const Atom&) const = default;
};

/// Multiset of atoms sharing one well, kept sorted.
class WellConfig {
public:
    static constexpr std::size_t default_cap = 8;

    WellConfig() = default;
    WellConfig(std::initializer_list<Atom> atoms, std::size_t cap = default_cap);
    explicit WellConfig(std::vector<Atom> atoms, std::size_t cap = default_cap);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    std::size_t count(Atom a) const;
    std::size_t cap() const { return cap_; }

    void add(Atom a);
    /// Removes one copy of `a`; returns false if absent.
    bool remove(Atom a);

    /// No two atoms share (hyperfine, nu); the fermionic occupation rule.
    bool satisfies_pauli() const;

    std::string to_string() const;

    bool operator==(const WellConfig& other) const { return atoms_ == other.atoms_; }

private:
    std::vector<Atom> atoms_;
    std::size_t cap_ = default_cap;
};

/// Symmetric table of U_{nu,mu}/U00 plus the physical scale U00/h.
class InteractionMatrix {
public:
    InteractionMatrix(int nu_max, std::vector<double> entries, double u00_hz,
                      double alpha_beta_scale = 1.0);

    int nu_max() const { return nu_max_; }
    double u00_hz() const { return u00_hz_; }
    double alpha_beta_scale() const { return alpha_beta_scale_; }

    double operator()(int nu, int mu) const;
    /// Pair interaction including the hyperfine multiplier for alpha-beta pairs.
    double pair(const Atom& a, const Atom& b) const;

private:
    int nu_max_;
    std::vector<double> entries_;
    double u00_hz_;
    double alpha_beta_scale_;
};

/// 1D harmonic-oscillator basis in natural units (unit oscillator length).
class HarmonicBasis {
public:
    static constexpr int default_nu_max = 4;
    static constexpr double grid_half_width = 12.0;
    static constexpr int default_grid_points = 4001;

    explicit HarmonicBasis(int nu_max = default_nu_max,
                           int grid_points = default_grid_points);

    int nu_max() const { return nu_max_; }

    /// psi_nu(x), normalised Hermite function.
    double wavefunction(int nu, double x) const;
    /// |psi_nu(x)|^2.
    double density(int nu, double x) const;

    /// Integral of |psi_nu|^2 |psi_mu|^2 on the quadrature grid.
    double density_overlap(int nu, int mu) const;

    /// (2 - delta_{nu,mu}) * overlap(nu,mu) / overlap(0,0).
    double relative_interaction(int nu, int mu) const;

    InteractionMatrix interaction_matrix(double u00_hz, double alpha_beta_scale = 1.0) const;

private:
    void check_level(int nu) const;
    double overlap_on_grid(int nu, int mu, int points) const;

    int nu_max_;
    int grid_points_;
};

/// Sum over unordered atom pairs of the pair interaction, in U00 units.
double config_energy(const WellConfig& config, const InteractionMatrix& matrix);

/// config_energy(final) - config_energy(initial); atom counts must match.
double transition_detuning(const WellConfig& initial, const WellConfig& final_config,
                           const InteractionMatrix& matrix);

}  // namespace purify
