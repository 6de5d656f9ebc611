#include "purify/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "purify/error.hpp"

namespace purify {

namespace {

constexpr double normalisation_tol = 1e-12;
constexpr double tail_tol = 1e-12;
constexpr int hard_cap = 4096;

std::vector<double> grand_canonical(double mu_U, double T_U, int n_cap) {
    std::vector<double> logw(static_cast<std::size_t>(n_cap + 1));
    for (int n = 0; n <= n_cap; ++n) {
        logw[static_cast<std::size_t>(n)] = (mu_U * n - 0.5 * n * (n - 1)) / T_U;
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double& lw : logw) {
        lw = std::exp(lw - top);
        z += lw;
    }
    for (double& w : logw) w /= z;
    return logw;
}

}  // namespace

void ThermalParams::validate() const {
    if (!(T_U > 0.0) || !std::isfinite(T_U)) throw ContractError("T_U must be positive and finite");
    if (!std::isfinite(mu_U)) throw ContractError("mu_U must be finite");
    if (n_cap < 2) throw ContractError("n_cap must be at least 2");
}

OccupationDistribution::OccupationDistribution(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw ContractError("empty occupation distribution");
    double total = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0 && v <= 1.0)) throw ContractError("occupation probability outside [0,1]");
        total += v;
    }
    if (std::abs(total - 1.0) > normalisation_tol) {
        throw ContractError("occupation distribution not normalised (sum=" + std::to_string(total) + ")");
    }
}

OccupationDistribution OccupationDistribution::delta(int n) {
    if (n < 0) throw ContractError("negative occupation");
    std::vector<double> p(static_cast<std::size_t>(std::max(n, 1) + 1), 0.0);
    p[static_cast<std::size_t>(n)] = 1.0;
    return OccupationDistribution(std::move(p));
}

OccupationDistribution OccupationDistribution::binary(double vacancy) {
    if (!(vacancy >= 0.0 && vacancy <= 1.0)) throw ContractError("vacancy outside [0,1]");
    return OccupationDistribution({vacancy, 1.0 - vacancy});
}

double OccupationDistribution::operator[](int n) const {
    if (n < 0) throw ContractError("negative occupation");
    return n < static_cast<int>(p_.size()) ? p_[static_cast<std::size_t>(n)] : 0.0;
}

double OccupationDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 1; n < p_.size(); ++n) m += static_cast<double>(n) * p_[n];
    return m;
}

double OccupationDistribution::multiple_mass() const {
    double m = 0.0;
    for (std::size_t n = 2; n < p_.size(); ++n) m += p_[n];
    return m;
}

void TrapParams::validate() const {
    if (!(omega_trap_hz > 0.0 && u_int_hz > 0.0 && mass_kg > 0.0 && spacing_um > 0.0)) {
        throw ContractError("trap parameters must be strictly positive");
    }
}

double TrapParams::curvature_per_um2() const {
    const double omega = 2.0 * std::numbers::pi * omega_trap_hz;
    const double joule_per_m2 = 0.5 * mass_kg * omega * omega;
    return joule_per_m2 * 1e-12 / (constants::planck_j_s * u_int_hz);
}

OccupationDistribution occupation_distribution(const ThermalParams& params) {
    params.validate();
    int cap = params.n_cap;
    while (true) {
        auto p = grand_canonical(params.mu_U, params.T_U, cap);
        if (p.back() < tail_tol) return OccupationDistribution(std::move(p));
        if (cap >= hard_cap) throw NumericError("occupation tail does not decay below 1e-12");
        cap *= 2;
    }
}

double defect_probability(const OccupationDistribution& dist) { return 1.0 - dist[1]; }

double site_entropy(const OccupationDistribution& dist, EntropyMode mode) {
    const int last = mode == EntropyMode::binary ? 1 : dist.n_cap();
    double h = 0.0;
    for (int n = 0; n <= last; ++n) {
        const double p = dist[n];
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double local_chemical_potential(double r_um, double mu0_U, const TrapParams& trap) {
    if (!(r_um >= 0.0)) throw ContractError("radius must be non-negative");
    trap.validate();
    return mu0_U - trap.curvature_per_um2() * r_um * r_um;
}

double radius_at_chemical_potential(double mu_loc_U, double mu0_U, const TrapParams& trap) {
    trap.validate();
    if (mu_loc_U > mu0_U) throw ContractError("local chemical potential above the central value");
    return std::sqrt((mu0_U - mu_loc_U) / trap.curvature_per_um2());
}

OverlapResult overlap_infidelity(std::span<const double> p1_by_site,
                                 const std::function<bool(std::size_t)>& selector) {
    OverlapResult result;
    double log_ol = 0.0;
    bool zero = false;
    for (std::size_t i = 0; i < p1_by_site.size(); ++i) {
        if (selector && !selector(i)) continue;
        const double p = p1_by_site[i];
        if (!(p >= 0.0 && p <= 1.0)) throw ContractError("P(1) outside [0,1]");
        ++result.count;
        if (p == 0.0) {
            zero = true;
        } else {
            log_ol += std::log(p);
        }
    }
    result.infidelity = zero ? 1.0 : -std::expm1(log_ol);
    return result;
}

}  // namespace purify
