#include <cmath>
#include <vector>

#include "doctest.h"
#include "purify/error.hpp"
#include "purify/thermo.hpp"

using namespace purify;

namespace {

// Direct Boltzmann weights exp(-(n(n-1)/2 - mu n)/T), normalised in long double.
std::vector<double> boltzmann(double mu, double T, int cap) {
    std::vector<long double> w(static_cast<std::size_t>(cap) + 1);
    long double z = 0;
    for (int n = 0; n <= cap; ++n) {
        w[static_cast<std::size_t>(n)] = std::exp(-(0.5L * n * (n - 1) - static_cast<long double>(mu) * n) / T);
        z += w[static_cast<std::size_t>(n)];
    }
    std::vector<double> p;
    for (auto v : w) p.push_back(static_cast<double>(v / z));
    return p;
}

}  // namespace

TEST_CASE("thermal distribution matches direct Boltzmann weights") {
    for (double mu : {-0.3, 0.5, 1.2, 2.0}) {
        for (double T : {0.02, 0.1, 0.2, 0.5}) {
            const auto d = occupation_distribution({mu, T, 10});
            const auto ref = boltzmann(mu, T, d.n_cap());
            for (int n = 0; n <= d.n_cap(); ++n) CHECK(std::abs(d[n] - ref[static_cast<std::size_t>(n)]) < 1e-14);
        }
    }
}

TEST_CASE("headline thermal values") {
    const auto d = occupation_distribution({0.5, 0.1, 10});
    // Pinned from an arbitrary-precision evaluation.
    CHECK(defect_probability(d) == doctest::Approx(0.013296710964436924).epsilon(1e-12));
    CHECK(d[0] == doctest::Approx(0.006648354465344932).epsilon(1e-12));
    // mu = U/2 sits halfway between the 0 and 2 atom energies.
    CHECK(d[0] == doctest::Approx(d[2]).epsilon(1e-12));
    const auto hot = occupation_distribution({0.5, 0.2, 10});
    CHECK(defect_probability(hot) == doctest::Approx(0.1410524184107144).epsilon(1e-12));
}

TEST_CASE("distribution is normalised and tail is negligible") {
    const auto d = occupation_distribution({5.0, 0.5, 4});
    CHECK(d.n_cap() > 4);
    CHECK(d[d.n_cap()] < 1e-12);
    double sum = 0.0;
    for (double p : d.probabilities()) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d[d.n_cap() + 5] == 0.0);
}

TEST_CASE("defect grows with temperature") {
    double last = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double T = 0.02 * std::pow(25.0, i / 49.0);
        const double defect = defect_probability(occupation_distribution({0.5, T, 10}));
        CHECK(defect > last);
        last = defect;
    }
}

TEST_CASE("entropy") {
    CHECK(site_entropy(OccupationDistribution::binary(0.5)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(site_entropy(OccupationDistribution::delta(1)) == 0.0);
    const OccupationDistribution flat({0.25, 0.25, 0.25, 0.25});
    CHECK(site_entropy(flat, EntropyMode::full) == doctest::Approx(std::log(4.0)));
    CHECK(site_entropy(flat, EntropyMode::binary) == doctest::Approx(0.5 * std::log(4.0)));
}

TEST_CASE("distribution construction contracts") {
    CHECK_THROWS_AS(OccupationDistribution({0.5, 0.6}), ContractError);
    CHECK_THROWS_AS(OccupationDistribution({-0.1, 1.1}), ContractError);
    CHECK_THROWS_AS(OccupationDistribution::binary(1.5), ContractError);
    CHECK_THROWS_AS(occupation_distribution({0.5, 0.0, 10}), ContractError);
    CHECK_THROWS_AS(occupation_distribution({0.5, 0.1, 1}), ContractError);
    const auto d = OccupationDistribution::delta(3);
    CHECK(d[3] == 1.0);
    CHECK(d.mean() == 3.0);
    CHECK(d.multiple_mass() == 1.0);
}

TEST_CASE("trap geometry") {
    const TrapParams trap;
    CHECK(trap.curvature_per_um2() == doctest::Approx(0.0275436845381608).epsilon(1e-12));
    CHECK(local_chemical_potential(0.0, 0.5, trap) == 0.5);
    CHECK(radius_at_chemical_potential(0.0, 0.5, trap) == doctest::Approx(4.260631602262189).epsilon(1e-12));
    const double r = radius_at_chemical_potential(-1.0, 0.5, trap);
    CHECK(local_chemical_potential(r, 0.5, trap) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(radius_at_chemical_potential(1.0, 0.5, trap), ContractError);
    CHECK_THROWS_AS(local_chemical_potential(-1.0, 0.5, trap), ContractError);
    TrapParams bad;
    bad.spacing_um = 0.0;
    CHECK_THROWS_AS(bad.validate(), ContractError);
}

TEST_CASE("overlap infidelity") {
    const std::vector<double> p(100, 1.0 - 1e-4);
    const auto r = overlap_infidelity(p);
    CHECK(r.count == 100);
    CHECK(r.infidelity == doctest::Approx(1.0 - std::pow(1.0 - 1e-4, 100)).epsilon(1e-12));
    CHECK(r.infidelity == doctest::Approx(9.95e-3).epsilon(1e-3));
    CHECK(overlap_infidelity({}).infidelity == 0.0);
    const auto half = overlap_infidelity(p, [](std::size_t i) { return i < 50; });
    CHECK(half.count == 50);
    const std::vector<double> with_zero{1.0, 0.0};
    CHECK(overlap_infidelity(with_zero).infidelity == 1.0);
    // Tiny infidelities keep full relative precision.
    const std::vector<double> tiny(10, 1.0 - 1e-15);
    CHECK(overlap_infidelity(tiny).infidelity == doctest::Approx(1e-14).epsilon(1e-3));
}
