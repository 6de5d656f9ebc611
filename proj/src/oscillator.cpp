#include "purify/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "purify/error.hpp"

namespace purify {

WellConfig::WellConfig(std::initializer_list<Atom> atoms, std::size_t cap)
    : WellConfig(std::vector<Atom>(atoms), cap) {}

WellConfig::WellConfig(std::vector<Atom> atoms, std::size_t cap) : atoms_(std::move(atoms)), cap_(cap) {
    if (atoms_.size() > cap_) {
        throw ContractError("well holds " + std::to_string(atoms_.size()) +
                            " atoms, cap is " + std::to_string(cap_));
    }
    for (const Atom& a : atoms_) {
        if (a.nu < 0) throw ContractError("negative vibrational level");
    }
    std::sort(atoms_.begin(), atoms_.end());
}

std::size_t WellConfig::count(Atom a) const {
    return static_cast<std::size_t>(std::count(atoms_.begin(), atoms_.end(), a));
}

void WellConfig::add(Atom a) {
    if (atoms_.size() >= cap_) throw ContractError("well atom cap exceeded");
    if (a.nu < 0) throw ContractError("negative vibrational level");
    atoms_.insert(std::upper_bound(atoms_.begin(), atoms_.end(), a), a);
}

bool WellConfig::remove(Atom a) {
    auto it = std::find(atoms_.begin(), atoms_.end(), a);
    if (it == atoms_.end()) return false;
    atoms_.erase(it);
    return true;
}

bool WellConfig::satisfies_pauli() const {
    return std::adjacent_find(atoms_.begin(), atoms_.end()) == atoms_.end();
}

std::string WellConfig::to_string() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) out << ',';
        out << '(' << (atoms_[i].state == Hyperfine::alpha ? 'a' : 'b') << ',' << atoms_[i].nu << ')';
    }
    out << '}';
    return out.str();
}

InteractionMatrix::InteractionMatrix(int nu_max, std::vector<double> entries, double u00_hz,
                                     double alpha_beta_scale)
    : nu_max_(nu_max), entries_(std::move(entries)), u00_hz_(u00_hz), alpha_beta_scale_(alpha_beta_scale) {
    const auto dim = static_cast<std::size_t>(nu_max_ + 1);
    if (nu_max_ < 0 || entries_.size() != dim * dim) {
        throw ContractError("interaction matrix size does not match nu_max");
    }
    if (!(u00_hz_ > 0.0)) throw ContractError("U00/h must be positive");
    if (!(alpha_beta_scale_ > 0.0)) throw ContractError("alpha-beta scale must be positive");
}

double InteractionMatrix::operator()(int nu, int mu) const {
    if (nu < 0 || mu < 0 || nu > nu_max_ || mu > nu_max_) {
        throw CapabilityError("vibrational level outside interaction matrix (nu_max=" +
                              std::to_string(nu_max_) + ")");
    }
    return entries_[static_cast<std::size_t>(nu * (nu_max_ + 1) + mu)];
}

double InteractionMatrix::pair(const Atom& a, const Atom& b) const {
    const double u = (*this)(a.nu, b.nu);
    return a.state == b.state ? u : u * alpha_beta_scale_;
}

HarmonicBasis::HarmonicBasis(int nu_max, int grid_points) : nu_max_(nu_max), grid_points_(grid_points) {
    if (nu_max_ < 0) throw ContractError("nu_max must be non-negative");
    if (grid_points_ < 2001 || grid_points_ % 2 == 0) {
        throw ContractError("quadrature grid needs an odd point count of at least 2001");
    }
}

void HarmonicBasis::check_level(int nu) const {
    if (nu < 0 || nu > nu_max_) {
        throw CapabilityError("vibrational level " + std::to_string(nu) + " exceeds nu_max=" +
                              std::to_string(nu_max_));
    }
}

double HarmonicBasis::wavefunction(int nu, double x) const {
    check_level(nu);
    // Upward recurrence on normalised Hermite functions.
    double prev = 0.0;
    double cur = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
    for (int n = 0; n < nu; ++n) {
        const double next = std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(static_cast<double>(n) / (n + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double HarmonicBasis::density(int nu, double x) const {
    const double psi = wavefunction(nu, x);
    return psi * psi;
}

double HarmonicBasis::overlap_on_grid(int nu, int mu, int points) const {
    const double h = 2.0 * grid_half_width / (points - 1);
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = -grid_half_width + h * i;
        const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        sum += w * density(nu, x) * density(mu, x);
    }
    return sum * h;
}

double HarmonicBasis::density_overlap(int nu, int mu) const {
    check_level(nu);
    check_level(mu);
    const double fine = overlap_on_grid(nu, mu, grid_points_);
    const double coarse = overlap_on_grid(nu, mu, (grid_points_ + 1) / 2);
    if (std::abs(fine - coarse) > 1e-12 * std::abs(fine)) {
        throw NumericError("overlap quadrature not converged for levels " + std::to_string(nu) + "," +
                           std::to_string(mu));
    }
    return fine;
}

double HarmonicBasis::relative_interaction(int nu, int mu) const {
    const double exchange = nu == mu ? 1.0 : 2.0;
    return exchange * density_overlap(nu, mu) / density_overlap(0, 0);
}

InteractionMatrix HarmonicBasis::interaction_matrix(double u00_hz, double alpha_beta_scale) const {
    const int dim = nu_max_ + 1;
    const double norm = density_overlap(0, 0);
    std::vector<double> entries(static_cast<std::size_t>(dim * dim));
    for (int nu = 0; nu < dim; ++nu) {
        for (int mu = nu; mu < dim; ++mu) {
            const double exchange = nu == mu ? 1.0 : 2.0;
            const double u = exchange * density_overlap(nu, mu) / norm;
            entries[static_cast<std::size_t>(nu * dim + mu)] = u;
            entries[static_cast<std::size_t>(mu * dim + nu)] = u;
        }
    }
    // Ratio of identical quadratures; pin it so U00 is exactly the unit.
    entries[0] = 1.0;
    return InteractionMatrix(nu_max_, std::move(entries), u00_hz, alpha_beta_scale);
}

double config_energy(const WellConfig& config, const InteractionMatrix& matrix) {
    const auto& atoms = config.atoms();
    double energy = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (std::size_t j = i + 1; j < atoms.size(); ++j) {
            energy += matrix.pair(atoms[i], atoms[j]);
        }
    }
    return energy;
}

double transition_detuning(const WellConfig& initial, const WellConfig& final_config,
                           const InteractionMatrix& matrix) {
    if (initial.size() != final_config.size()) {
        throw ContractError("transition must conserve atom number (" + std::to_string(initial.size()) +
                            " -> " + std::to_string(final_config.size()) + ")");
    }
    return config_energy(final_config, matrix) - config_energy(initial, matrix);
}

}  // namespace purify
