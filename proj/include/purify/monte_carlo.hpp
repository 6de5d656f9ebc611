#pragma once

// Seeded Monte Carlo realisation of a schedule, run with the exact
// three-well state machine on sampled occupations.
//
// Every site owns its own random stream, seeded from (seed, site index), so
// results do not depend on the order in which sites are visited.

#include <cstdint>
#include <vector>

#include "purify/lattice.hpp"

namespace purify {

struct MonteCarloResult {
    std::uint64_t realizations = 0;
    std::vector<std::uint64_t> occupied;  ///< per site, final occupation == 1
    std::vector<double> p1;
    std::vector<double> sigma;            ///< binomial standard error of p1
    std::vector<bool> logical;

    /// Pooled over logical sites.
    std::uint64_t pooled_trials = 0;
    std::uint64_t pooled_vacant = 0;
    double pooled_vacancy = 0.0;
    double pooled_sigma = 0.0;
};

/// Samples the analytic field, applies `schedule` per realisation with
/// Bernoulli error injection, and aggregates per-site frequencies. The
/// vacancy floor is a distribution-level rule and is rejected here.
MonteCarloResult monte_carlo_run(const LatticeField& field, const Schedule& schedule, std::uint64_t seed,
                                 std::uint64_t n_realizations, const InteractionMatrix& matrix);

}  // namespace purify
