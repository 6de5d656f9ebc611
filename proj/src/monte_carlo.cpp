#include "purify/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <variant>

#include "purify/error.hpp"

namespace purify {

class MonteCarloEngine {
public:
    MonteCarloEngine(const LatticeField& field, const Schedule& schedule, std::uint64_t seed,
                     const InteractionMatrix& matrix)
        : field_(field), schedule_(schedule), matrix_(matrix) {
        schedule_.validate();
        field_.require_analytic("monte_carlo_run");
        if (schedule_.errors.eps_floor > 0.0) {
            throw ContractError("the vacancy floor is a distribution-level rule; Monte Carlo takes explicit error channels");
        }
        copies_ = 1;
        bool merged = false;
        for (const auto& step : schedule_.steps) {
            if (const auto* m = std::get_if<MergeStep>(&step)) {
                merged = true;
                if (m->axis == Axis::aux && m->mode == IterationMode::parallel) copies_ *= 3;
            } else if (!merged && std::holds_alternative<FilterStep>(step)) {
                reservoir_filters_.push_back(std::get<FilterStep>(step));
            }
        }
        const std::size_t n = field_.size();
        rngs_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32), 0x5eedu};
            rngs_.emplace_back(seq);
        }
        occ_.assign(n * copies_, 0);
        for (int input = 0; input < 8; ++input) {
            for (int b = 0; b < 16; ++b) {
                const PulseFailures f{(b & 1) != 0, (b & 2) != 0, (b & 4) != 0, (b & 8) != 0};
                const auto outcome = merge_protocol({input & 1, (input >> 1) & 1, (input >> 2) & 1}, matrix_, f);
                outcomes_[static_cast<std::size_t>(input)][static_cast<std::size_t>(b)] =
                    outcome.ground_occupied ? 1 : 0;
            }
        }
    }

    MonteCarloResult run(std::uint64_t n_realizations) {
        if (n_realizations < 1) throw ContractError("need at least one realisation");
        const std::size_t n = field_.size();
        MonteCarloResult result;
        result.realizations = n_realizations;
        result.occupied.assign(n, 0);
        for (std::uint64_t r = 0; r < n_realizations; ++r) {
            realise();
            for (std::size_t i = 0; i < n; ++i) {
                if (occ_[i * copies_] == 1) ++result.occupied[i];
            }
        }
        const double trials = static_cast<double>(n_realizations);
        result.p1.resize(n);
        result.sigma.resize(n);
        result.logical.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = static_cast<double>(result.occupied[i]) / trials;
            result.p1[i] = p;
            result.sigma[i] = std::sqrt(p * (1.0 - p) / trials);
            result.logical[i] = logical(i);
            if (result.logical[i]) {
                result.pooled_trials += n_realizations;
                result.pooled_vacant += n_realizations - result.occupied[i];
            }
        }
        if (result.pooled_trials > 0) {
            const double t = static_cast<double>(result.pooled_trials);
            result.pooled_vacancy = static_cast<double>(result.pooled_vacant) / t;
            result.pooled_sigma = std::sqrt(result.pooled_vacancy * (1.0 - result.pooled_vacancy) / t);
        }
        return result;
    }

private:
    bool logical(std::size_t i) const {
        return field_.ix(i) % final_stride_[0] == 0 && field_.iy(i) % final_stride_[1] == 0;
    }

    int& at(std::size_t site, std::size_t copy) { return occ_[site * copies_ + copy]; }

    double uniform(std::size_t site) { return std::uniform_real_distribution<double>(0.0, 1.0)(rngs_[site]); }

    // A fresh unpurified well drawn from the statistics of `source`, using the
    // random stream of `site`.
    int fresh(std::size_t source, std::size_t site) {
        if (!field_.reservoir_.empty()) return sample_occupation(field_.reservoir_[source], uniform(site));
        int n = sample_occupation(field_.dists_[source], uniform(site));
        for (const auto& f : reservoir_filters_) {
            n = filter_sweep_sample(n, f.n_max, schedule_.errors.per_pulse_error, rngs_[site]);
        }
        return n;
    }

    int merge(int left, int middle, int right, std::size_t site, int distance) {
        if (left > 1 || middle > 1 || right > 1) {
            throw ContractError("merge needs binary occupations; filter multiply occupied sites first");
        }
        ErrorModel model = schedule_.errors.merge;
        model.merge_infidelity =
            std::min(1.0, model.merge_infidelity + schedule_.errors.transport_infidelity_per_site * distance);
        const auto f = draw_failures(model, rngs_[site]);
        const int b = (f.merge_right ? 1 : 0) | (f.remove_excited ? 2 : 0) | (f.merge_left ? 4 : 0) |
                      (f.ancilla_transfer ? 8 : 0);
        return outcomes_[static_cast<std::size_t>(left | (middle << 1) | (right << 2))][static_cast<std::size_t>(b)];
    }

    void realise() {
        const std::size_t n = field_.size();
        std::size_t live = copies_;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < copies_; ++c) at(i, c) = sample_occupation(field_.dists_[i], uniform(i));
        }
        std::array<int, 3> stride = field_.stride_;
        std::array<int, 3> serial = field_.serial_steps_;
        auto is_logical = [&](std::size_t i) { return field_.ix(i) % stride[0] == 0 && field_.iy(i) % stride[1] == 0; };

        for (const auto& step : schedule_.steps) {
            if (const auto* f = std::get_if<FilterStep>(&step)) {
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t c = 0; c < live; ++c) {
                        at(i, c) = filter_sweep_sample(at(i, c), f->n_max, schedule_.errors.per_pulse_error, rngs_[i]);
                    }
                }
            } else if (const auto* m = std::get_if<MergeStep>(&step)) {
                const auto slot = static_cast<std::size_t>(m->axis);
                if (m->axis == Axis::aux) {
                    if (m->mode == IterationMode::parallel) {
                        for (std::size_t i = 0; i < n; ++i) {
                            if (!is_logical(i)) continue;
                            for (std::size_t g = 0; g < live / 3; ++g) {
                                at(i, g) = merge(at(i, 3 * g), at(i, 3 * g + 1), at(i, 3 * g + 2), i, stride[slot]);
                            }
                        }
                        live /= 3;
                        stride[slot] *= 3;
                    } else {
                        const int distance = ++serial[slot];
                        for (std::size_t i = 0; i < n; ++i) {
                            if (!is_logical(i)) continue;
                            for (std::size_t c = 0; c < live; ++c) {
                                const int left = fresh(i, i);
                                const int right = fresh(i, i);
                                at(i, c) = merge(left, at(i, c), right, i, distance);
                            }
                        }
                    }
                } else {
                    in_plane_merge(*m, stride, serial, live, is_logical);
                }
            } else {
                const double r_cut = std::get<SkimStep>(step).r_cut_um;
                for (std::size_t i = 0; i < n; ++i) {
                    if (field_.radius_um(i) <= r_cut + 1e-9) continue;
                    for (std::size_t c = 0; c < live; ++c) at(i, c) = 0;
                }
            }
        }
        final_stride_ = stride;
    }

    template <class Pred>
    void in_plane_merge(const MergeStep& m, std::array<int, 3>& stride, std::array<int, 3>& serial, std::size_t live,
                        const Pred& is_logical) {
        const std::size_t n = field_.size();
        const auto slot = static_cast<std::size_t>(m.axis);
        const int s = stride[slot];
        auto neighbour = [&](std::size_t i, int offset) {
            return field_.index(field_.ix(i) + (m.axis == Axis::x ? offset : 0),
                                field_.iy(i) + (m.axis == Axis::y ? offset : 0));
        };
        if (m.mode == IterationMode::parallel) {
            const std::vector<int> before = occ_;
            auto old = [&](std::size_t site, std::size_t c) { return before[site * copies_ + c]; };
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_logical(i)) continue;
                const int coord = m.axis == Axis::x ? field_.ix(i) : field_.iy(i);
                const bool target = (((coord / s) % 3) + 3) % 3 == 0;
                for (std::size_t c = 0; c < live; ++c) {
                    if (!target) {
                        at(i, c) = 0;
                        continue;
                    }
                    const auto l = neighbour(i, -s);
                    const auto r = neighbour(i, s);
                    at(i, c) = merge(l ? old(*l, c) : 0, old(i, c), r ? old(*r, c) : 0, i, s);
                }
            }
            stride[slot] *= 3;
        } else {
            const int step = ++serial[slot] * s;
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_logical(i)) continue;
                const auto l = neighbour(i, -step);
                const auto r = neighbour(i, step);
                for (std::size_t c = 0; c < live; ++c) {
                    const int left = l ? fresh(*l, i) : 0;
                    const int right = r ? fresh(*r, i) : 0;
                    at(i, c) = merge(left, at(i, c), right, i, step);
                }
            }
        }
    }

    const LatticeField& field_;
    const Schedule& schedule_;
    const InteractionMatrix& matrix_;
    std::size_t copies_ = 1;
    std::vector<FilterStep> reservoir_filters_;
    std::vector<std::mt19937_64> rngs_;
    std::vector<int> occ_;
    /// merge_protocol result per input and failure pattern; a target left with
    /// anything but one ground atom counts as vacant, as in the analytic engine.
    std::array<std::array<int, 16>, 8> outcomes_{};
    std::array<int, 3> final_stride_{1, 1, 1};
};

MonteCarloResult monte_carlo_run(const LatticeField& field, const Schedule& schedule, std::uint64_t seed,
                                 std::uint64_t n_realizations, const InteractionMatrix& matrix) {
    MonteCarloEngine engine(field, schedule, seed, matrix);
    return engine.run(n_realizations);
}

}  // namespace purify
