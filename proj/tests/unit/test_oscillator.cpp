#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "purify/error.hpp"
#include "purify/oscillator.hpp"

using namespace purify;

namespace {
const Atom a0{Hyperfine::alpha, 0}, a1{Hyperfine::alpha, 1}, a2{Hyperfine::alpha, 2};
const Atom b0{Hyperfine::beta, 0};
}  // namespace

TEST_CASE("closed-form overlap oracle reproduces known fractions") {
    CHECK(oracle::relative_interaction(2, 2) == doctest::Approx(41.0 / 64.0).epsilon(1e-14));
    CHECK(oracle::relative_interaction(0, 2) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(oracle::relative_interaction(1, 1) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(oracle::overlap(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("quadrature matches the closed-form oracle for every pair up to nu=4") {
    const HarmonicBasis basis;
    for (int nu = 0; nu <= 4; ++nu) {
        for (int mu = 0; mu <= 4; ++mu) {
            CAPTURE(nu);
            CAPTURE(mu);
            CHECK(std::abs(basis.relative_interaction(nu, mu) - oracle::relative_interaction(nu, mu)) < 1e-9);
        }
    }
}

TEST_CASE("interaction matrix entries") {
    const auto m = HarmonicBasis().interaction_matrix(1000.0);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m(0, 2) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m(1, 1) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m(1, 2) == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(m(2, 2) == doctest::Approx(0.640625).epsilon(1e-12));
    // Higher levels, pinned from the oracle.
    CHECK(m(3, 4) == doctest::Approx(0.7412109375).epsilon(1e-12));
    CHECK(m(4, 4) == doctest::Approx(0.52789306640625).epsilon(1e-12));
    for (int nu = 0; nu <= 4; ++nu) {
        for (int mu = 0; mu <= 4; ++mu) CHECK(m(nu, mu) == m(mu, nu));
    }
    CHECK(m.u00_hz() == 1000.0);
}

TEST_CASE("wavefunctions are normalised") {
    const HarmonicBasis basis;
    for (int nu = 0; nu <= 4; ++nu) {
        double sum = 0.0;
        const double h = 24.0 / 4000.0;
        for (int i = 0; i <= 4000; ++i) {
            const double x = -12.0 + i * h;
            sum += (i == 0 || i == 4000 ? 0.5 : 1.0) * basis.density(nu, x);
        }
        CHECK(sum * h == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("levels beyond nu_max are a capability error") {
    const HarmonicBasis basis(4);
    CHECK_THROWS_AS(basis.density_overlap(5, 0), CapabilityError);
    const auto m = basis.interaction_matrix(1000.0);
    CHECK_THROWS_AS(m(0, 5), CapabilityError);
    CHECK_THROWS_AS(HarmonicBasis(-1), ContractError);
    CHECK_THROWS_AS(HarmonicBasis(4, 100), ContractError);
}

TEST_CASE("well configurations") {
    WellConfig w{a1, a0};
    CHECK(w.atoms().front() == a0);
    CHECK(w.size() == 2);
    CHECK(w.satisfies_pauli());
    w.add(a0);
    CHECK_FALSE(w.satisfies_pauli());
    CHECK(w.count(a0) == 2);
    CHECK(w.remove(a0));
    CHECK_FALSE(w.remove(a2));
    CHECK(w.to_string() == "{(a,0),(a,1)}");
    CHECK(WellConfig{}.to_string() == "{}");

    WellConfig full({}, 1);
    full.add(a0);
    CHECK_THROWS_AS(full.add(a1), ContractError);
    CHECK_THROWS_AS(WellConfig({Atom{Hyperfine::alpha, -1}}), ContractError);
}

TEST_CASE("configuration energies and detunings") {
    const auto m = HarmonicBasis().interaction_matrix(1000.0);
    CHECK(config_energy(WellConfig{a0}, m) == 0.0);
    CHECK(config_energy(WellConfig{a0, a1}, m) == doctest::Approx(1.0));
    CHECK(config_energy(WellConfig{a0, a1, a2}, m) == doctest::Approx(1.0 + 0.75 + 0.875));
    // Removal pulse shift U02 - U01.
    CHECK(transition_detuning(WellConfig{a0, a1}, WellConfig{a0, Atom{Hyperfine::beta, 2}}, m) ==
          doctest::Approx(-0.25).epsilon(1e-12));
    // Ancilla pulse shift U01 - U12.
    CHECK(transition_detuning(WellConfig{a1, a2}, WellConfig{a1, b0}, m) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK_THROWS_AS(transition_detuning(WellConfig{a0}, WellConfig{a0, a1}, m), ContractError);
}

TEST_CASE("alpha-beta scale multiplies mixed pairs only") {
    const auto m = HarmonicBasis().interaction_matrix(1000.0, 0.5);
    CHECK(m.pair(a0, a1) == doctest::Approx(1.0));
    CHECK(m.pair(a1, b0) == doctest::Approx(0.5));
}
