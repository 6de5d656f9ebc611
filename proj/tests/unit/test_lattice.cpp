#include <cmath>
#include <sstream>

#include "doctest.h"
#include "purify/error.hpp"
#include "purify/lattice.hpp"

using namespace purify;

namespace {

const InteractionMatrix& matrix() {
    static const auto m = HarmonicBasis().interaction_matrix(1000.0);
    return m;
}

const MergeTable& table() {
    static const MergeTable t(matrix());
    return t;
}

std::size_t at(const LatticeField& f, int x, int y) { return *f.index(x, y); }

}  // namespace

TEST_CASE("thermal lattice follows the local chemical potential") {
    const ThermalParams thermal{0.5, 0.2, 10};
    const TrapParams trap;
    const auto f = build_thermal_lattice(thermal, trap, minimal_grid_radius(thermal, trap));
    CHECK(f.dist(at(f, 0, 0)) == occupation_distribution(thermal));
    const auto i = at(f, 3, 4);
    ThermalParams local = thermal;
    local.mu_U = local_chemical_potential(2.5, thermal.mu_U, trap);
    CHECK(f.dist(i) == occupation_distribution(local));
    // Equal radii carry identical distributions.
    CHECK(f.dist(at(f, 5, 0)) == f.dist(i));
    CHECK(f.dist(at(f, -4, 3)) == f.dist(i));
    CHECK(f.dist(at(f, 0, -5)) == f.dist(i));
}

TEST_CASE("half filling point of the local potential") {
    // Scale the trap so a site sits exactly where mu_loc = 0.5.
    TrapParams trap;
    const ThermalParams thermal{1.5, 0.2, 10};
    trap.omega_trap_hz *= std::sqrt(1.0 / (trap.curvature_per_um2() * 4.0 * trap.spacing_um * trap.spacing_um));
    const auto f = build_thermal_lattice(thermal, trap, minimal_grid_radius(thermal, trap));
    const auto& d = f.dist(at(f, 2, 0));
    CHECK(d[0] == doctest::Approx(d[2]).epsilon(1e-10));
}

TEST_CASE("grid coverage") {
    const ThermalParams thermal{2.0, 0.2, 10};
    const TrapParams trap;
    const int r = minimal_grid_radius(thermal, trap);
    CHECK(local_chemical_potential(r * trap.spacing_um, 2.0, trap) <= -1.0);
    CHECK(local_chemical_potential((r - 1) * trap.spacing_um, 2.0, trap) > -1.0);
    CHECK_THROWS_AS(build_thermal_lattice(thermal, trap, r - 1), ContractError);
    try {
        build_thermal_lattice(thermal, trap, 3);
    } catch (const ContractError& e) {
        CHECK(std::string(e.what()).find(std::to_string(r)) != std::string::npos);
    }
}

TEST_CASE("total atom number is pinned") {
    const auto f = build_thermal_lattice({2.0, 0.2, 10}, TrapParams{}, 25);
    // Direct summation with compensated sums, recorded once.
    CHECK(f.total_atoms() == doctest::Approx(1432.5627699345237).epsilon(1e-12));
}

TEST_CASE("filter propagation") {
    const auto empty = LatticeField::homogeneous(OccupationDistribution::delta(0), 2, 0.5);
    const auto e2 = propagate_filter(empty, 10);
    for (std::size_t i = 0; i < e2.size(); ++i) CHECK(e2.dist(i) == OccupationDistribution::delta(0));
    const auto doubles = propagate_filter(LatticeField::homogeneous(OccupationDistribution::delta(2), 2, 0.5), 10);
    for (std::size_t i = 0; i < doubles.size(); ++i) CHECK(doubles.dist(i)[1] == 1.0);
    const ThermalParams thermal{0.5, 0.2, 10};
    const auto f = build_thermal_lattice(thermal, TrapParams{}, 20);
    const auto filtered = propagate_filter(f, 10);
    const auto c = at(f, 0, 0);
    CHECK(1.0 - filtered.dist(c)[1] == doctest::Approx(f.dist(c)[0]).epsilon(1e-12));
    CHECK(filtered.dist(c)[0] == doctest::Approx(0.0705067110527577).epsilon(1e-12));
}

TEST_CASE("aux merges reproduce the homogeneous recursions") {
    const auto f = LatticeField::homogeneous(OccupationDistribution::binary(0.1), 1, 0.5);
    const auto par = apply_schedule(f, Schedule{{MergeStep{}, MergeStep{}}, {}}, matrix());
    CHECK(1.0 - par[1].p1(0) == doctest::Approx(0.019).epsilon(1e-12));
    CHECK(1.0 - par[2].p1(4) == doctest::Approx(vacancy_recursion(0.1, 2, IterationMode::parallel)[1]).epsilon(1e-12));
    const MergeStep serial{Axis::aux, IterationMode::serial};
    const auto ser = apply_schedule(f, Schedule{{serial, serial, serial}, {}}, matrix());
    const auto expect = vacancy_recursion(0.1, 3, IterationMode::serial);
    for (int k = 1; k <= 3; ++k) {
        CHECK(1.0 - ser[static_cast<std::size_t>(k)].p1(4) ==
              doctest::Approx(expect[static_cast<std::size_t>(k) - 1]).epsilon(1e-12));
    }
    CHECK(par[2].stride(Axis::aux) == 9);
    for (std::size_t i = 0; i < par[2].size(); ++i) CHECK(par[2].is_logical(i));
}

TEST_CASE("in-plane parallel merge partitions lines into triples") {
    auto f = LatticeField::homogeneous(OccupationDistribution::binary(0.0), 4, 0.5);
    f.set_dist(at(f, 0, 0), OccupationDistribution::delta(0));
    const auto m = propagate_merge(f, Axis::x, IterationMode::parallel, {}, table());
    // |1,0,1> fills the centre.
    CHECK(m.p1(at(m, 0, 0)) == 1.0);
    // Consumed neighbours become vacant and leave the logical lattice.
    CHECK(m.p1(at(m, 1, 0)) == 0.0);
    CHECK(m.p1(at(m, -1, 2)) == 0.0);
    CHECK_FALSE(m.is_logical(at(m, 1, 0)));
    CHECK(m.is_logical(at(m, 3, 0)));
    CHECK(m.is_logical(at(m, -3, 1)));
    CHECK(m.stride(Axis::x) == 3);
    // The triple at x = 3 has only one neighbour on the grid (x = 4).
    CHECK(m.p1(at(m, 3, 0)) == 1.0);

    // Vacant neighbours leave the target unchanged.
    auto lone = LatticeField::homogeneous(OccupationDistribution::delta(0), 1, 0.5);
    lone.set_dist(at(lone, 0, 0), OccupationDistribution::binary(0.3));
    const auto m2 = propagate_merge(lone, Axis::y, IterationMode::parallel, {}, table());
    CHECK(m2.p1(at(m2, 0, 0)) == doctest::Approx(0.7).epsilon(1e-14));

    // A second iteration along the same axis reaches stride 3.
    auto g = LatticeField::homogeneous(OccupationDistribution::binary(0.1), 13, 0.5);
    const auto s = apply_schedule(g, Schedule{{MergeStep{Axis::x, IterationMode::parallel},
                                                 MergeStep{Axis::x, IterationMode::parallel}}, {}},
                                  matrix());
    CHECK(1.0 - s[2].p1(at(g, 0, 0)) == doctest::Approx(vacancy_recursion(0.1, 2, IterationMode::parallel)[1]));
    CHECK(s[2].is_logical(at(g, 9, 5)));
    CHECK_FALSE(s[2].is_logical(at(g, 3, 0)));
}

TEST_CASE("in-plane serial merge draws from the unpurified reservoir") {
    const auto f = LatticeField::homogeneous(OccupationDistribution::binary(0.1), 6, 0.5);
    const MergeStep serial{Axis::x, IterationMode::serial};
    const auto s = apply_schedule(f, Schedule{{serial, serial}, {}}, matrix());
    const auto expect = vacancy_recursion(0.1, 2, IterationMode::serial);
    CHECK(1.0 - s[2].p1(at(f, 0, 3)) == doctest::Approx(expect[1]).epsilon(1e-12));
    // At the edge the second partner lies off the grid.
    CHECK(1.0 - s[2].p1(at(f, 5, 0)) > expect[1]);
}

TEST_CASE("error floor") {
    const auto f = LatticeField::homogeneous(OccupationDistribution::binary(0.01), 2, 0.5);
    ErrorConfig errors;
    errors.eps_floor = 1e-3;
    const auto m = propagate_merge(f, Axis::aux, IterationMode::parallel, errors, table());
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(1.0 - m.p1(i) >= 1e-3);
    CHECK(1.0 - m.p1(0) == doctest::Approx(1e-3));
}

TEST_CASE("transport infidelity grows with distance") {
    const auto f = LatticeField::homogeneous(OccupationDistribution::binary(0.1), 1, 0.5);
    Schedule s{{MergeStep{}, MergeStep{}}, {}};
    s.errors.transport_infidelity_per_site = 1e-3;
    const auto out = apply_schedule(f, s, matrix());
    const ErrorModel one{0.0, 1e-3}, three{0.0, 3e-3};
    const double e1 = 1.0 - table().success_probability(0.9, 0.9, 0.9, one);
    CHECK(1.0 - out[1].p1(0) == doctest::Approx(e1).epsilon(1e-12));
    const double q = 1.0 - e1;
    CHECK(1.0 - out[2].p1(0) == doctest::Approx(1.0 - table().success_probability(q, q, q, three)).epsilon(1e-12));
}

TEST_CASE("merges require filtered sites") {
    const auto f = LatticeField::homogeneous(OccupationDistribution({0.1, 0.8, 0.1}), 1, 0.5);
    CHECK_THROWS_AS(propagate_merge(f, Axis::aux, IterationMode::parallel, {}, table()), ContractError);
}

TEST_CASE("skim") {
    const auto f = build_thermal_lattice({0.5, 0.2, 10}, TrapParams{}, 16);
    const auto zero = skim(f, 0.0);
    for (std::size_t i = 0; i < zero.size(); ++i) {
        if (i == at(f, 0, 0)) {
            CHECK(zero.dist(i) == f.dist(i));
        } else {
            CHECK(zero.dist(i) == OccupationDistribution::delta(0));
        }
    }
    // A site exactly on the cut is kept.
    const auto edge = skim(f, 2.5);
    CHECK(edge.dist(at(f, 3, 4)) == f.dist(at(f, 3, 4)));
    CHECK(edge.dist(at(f, 5, 1)) == OccupationDistribution::delta(0));
    const auto twice = skim(edge, 2.5);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(twice.dist(i) == edge.dist(i));
    const auto all = skim(f, 1e9);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(all.dist(i) == f.dist(i));
    CHECK_THROWS_AS(skim(f, -1.0), ContractError);
}

TEST_CASE("expected atom number never increases") {
    const auto f = build_thermal_lattice({1.0, 0.2, 10}, TrapParams{}, 24);
    for (Axis axis : {Axis::x, Axis::y}) {
        Schedule s{{FilterStep{10}, MergeStep{axis, IterationMode::parallel}, MergeStep{Axis::y, IterationMode::parallel},
                    SkimStep{6.0}},
                   {}};
        const auto stages = apply_schedule(f, s, matrix());
        for (std::size_t k = 1; k < stages.size(); ++k) {
            CHECK(stages[k].total_atoms() <= stages[k - 1].total_atoms() + 1e-9);
        }
    }
    // Serial merges and aux merges borrow atoms from unpurified wells outside
    // the logical lattice; counting that supply the total still cannot grow.
    const auto filtered = propagate_filter(f, 10);
    const auto aux = propagate_merge(filtered, Axis::aux, IterationMode::parallel, {}, table());
    CHECK(aux.total_atoms() <= 3.0 * filtered.total_atoms());
    auto serial = filtered;
    for (int k = 0; k < 3; ++k) {
        const auto next = propagate_merge(serial, Axis::x, IterationMode::serial, {}, table());
        CHECK(next.total_atoms() <= serial.total_atoms() + 2.0 * filtered.total_atoms());
        CHECK(next.total_atoms() >= serial.total_atoms() - 1e-9);
        serial = next;
    }
}

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS((Schedule{{SkimStep{1.0}, FilterStep{10}}, {}}.validate()), ContractError);
    CHECK_THROWS_AS((Schedule{{FilterStep{1}}, {}}.validate()), ContractError);
    Schedule noisy{{FilterStep{10}, MergeStep{}}, {}};
    noisy.errors.per_pulse_error = 0.01;
    CHECK_THROWS_AS(noisy.validate(), ContractError);
    noisy.steps.pop_back();
    CHECK_NOTHROW(noisy.validate());
    const auto s = Schedule::filter_then_merge(10, 3, Axis::x, IterationMode::serial);
    CHECK(s.steps.size() == 4);
}

TEST_CASE("radial profiles") {
    const ThermalParams cold{0.5, 0.005, 10};
    const TrapParams trap;
    const auto f = build_thermal_lattice(cold, trap, 12);
    const double edge = radius_at_chemical_potential(0.0, 0.5, trap);
    for (const auto& p : radial_profile(f, ProfileQuantity::p1, 0.5)) {
        if (std::abs(p.r_um - edge) < 0.6) continue;
        CHECK(p.value == doctest::Approx(p.r_um < edge ? 1.0 : 0.0).epsilon(1e-6));
    }
    const auto hot = build_thermal_lattice({0.5, 0.2, 10}, trap, 16);
    const auto prof = radial_profile(hot, ProfileQuantity::p1, 0.5);
    CHECK(prof.front().r_um == 0.0);
    CHECK(prof.front().sites == 1);
    CHECK(prof.front().value == doctest::Approx(occupation_distribution({0.5, 0.2, 10})[1]).epsilon(1e-14));
    for (const auto& p : radial_profile(hot, ProfileQuantity::entropy, 0.5)) CHECK(p.value <= std::log(2.0) + 1e-12);
    CHECK_THROWS_AS(radial_profile(hot, ProfileQuantity::p1, 0.0), ContractError);
}

TEST_CASE("entropy peak sits at P(0) = P(1) with value ln 2") {
    const ThermalParams thermal{0.5, 0.2, 10};
    const TrapParams trap;
    const auto s = Schedule::filter_then_merge(10, 2);
    for (std::size_t stage = 1; stage <= 3; ++stage) {
        const auto peak = entropy_peak(thermal, trap, s, stage, table());
        CHECK(std::abs(peak.entropy - std::log(2.0)) < 1e-6);
        const auto d = radial_stage_distributions(thermal, trap, s, peak.r_um, table()).at(stage);
        CHECK(d[0] == doctest::Approx(d[1]).epsilon(1e-6));
    }
    CHECK_THROWS_AS(radial_stage_distributions(thermal, trap, Schedule::filter_then_merge(10, 1, Axis::x), 1.0,
                                               table()),
                    ContractError);
}

TEST_CASE("radial stage distributions agree with the lattice engine") {
    const ThermalParams thermal{0.5, 0.2, 10};
    const TrapParams trap;
    const auto s = Schedule::filter_then_merge(10, 2, Axis::aux, IterationMode::serial);
    const auto stages = apply_schedule(build_thermal_lattice(thermal, trap, 16), s, matrix());
    const auto f = stages[0];
    const auto i = at(f, 2, 3);
    const auto radial = radial_stage_distributions(thermal, trap, s, f.radius_um(i), table());
    for (std::size_t k = 0; k < stages.size(); ++k) CHECK(radial[k][1] == doctest::Approx(stages[k].p1(i)).epsilon(1e-14));
}

TEST_CASE("plateau and infidelity curves") {
    auto f = LatticeField::homogeneous(OccupationDistribution::binary(1e-4), 10, 1.0);
    CHECK(plateau_radius(f, 0.999).value() == doctest::Approx(10.0 * std::sqrt(2.0)));
    f.set_dist(at(f, 0, 3), OccupationDistribution::binary(0.5));
    CHECK(plateau_radius(f, 0.999).value() == doctest::Approx(std::sqrt(8.0)));
    f.set_dist(at(f, 0, 0), OccupationDistribution::binary(0.5));
    CHECK_FALSE(plateau_radius(f, 0.999).has_value());

    const auto g = LatticeField::homogeneous(OccupationDistribution::binary(1e-4), 10, 1.0);
    const auto curve = infidelity_curve(g, {-1.0, 0.0, 1.0, 5.0});
    CHECK(curve[0].sites == 0);
    CHECK(curve[0].infidelity == 0.0);
    CHECK(curve[1].sites == 1);
    CHECK(curve[2].sites == 5);
    CHECK(curve[3].infidelity == doctest::Approx(-std::expm1(curve[3].sites * std::log1p(-1e-4))).epsilon(1e-12));
    const auto radii = site_radii(g);
    CHECK(radii[0] == 0.0);
    CHECK(radii[1] == 1.0);
    CHECK(radii[2] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("snapshot") {
    const auto f = LatticeField::homogeneous(OccupationDistribution::binary(0.25), 1, 0.5);
    std::ostringstream a, b;
    write_snapshot(a, f);
    write_snapshot(b, f);
    CHECK(a.str() == b.str());
    const std::string text = a.str();
    CHECK(text.rfind("# lattice snapshot v1\nmode analytic\nradius_sites 1\n", 0) == 0);
    CHECK(text.find("\n0 0 0.000000000000e+00 1 1 2.500000000000e-01 7.500000000000e-01\n") != std::string::npos);

    std::mt19937_64 rng(3);
    const auto sampled = f.sample(rng);
    CHECK(sampled.mode() == FieldMode::sampled);
    std::ostringstream c;
    write_snapshot(c, sampled);
    CHECK(c.str().find("mode sampled") != std::string::npos);
    CHECK_THROWS_AS(sampled.dist(0), ContractError);
    CHECK_THROWS_AS(propagate_filter(sampled, 10), ContractError);
}

TEST_CASE("compensated summation") {
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-9));
}
