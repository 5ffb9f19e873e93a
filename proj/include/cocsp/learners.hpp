#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cocsp/csp.hpp"
#include "cocsp/propagate.hpp"
#include "cocsp/rng.hpp"
#include "cocsp/search.hpp"

namespace cocsp {

// RNDI: R-1 randomized, node-capped MAC probes that accumulate wipeout
// weights into one shared vector; the final informed restart is launched by
// the caller with these weights.
struct RndiParams {
    int restarts = 5;                               // R
    int node_cap_factor = 10;                       // C = node_cap_factor * n
    Heuristic final_heuristic = Heuristic::wdeg;
    std::uint64_t seed = 1;

    void validate() const {
        if (restarts < 1 || node_cap_factor < 1)
            throw std::invalid_argument("rndi params: restarts and node_cap_factor must be >= 1");
    }
};

struct RndiResult {
    ConstraintWeights weights;
    std::vector<SearchStats> probes;
    bool decided = false; // a probe proved sat/unsat, so probing stopped
};

inline RndiResult rndi_learn(const CspInstance& inst, const RndiParams& params) {
    params.validate();
    RndiResult result;
    result.weights = unit_weights(inst);
    SearchLimits limits;
    limits.node_cap = static_cast<std::uint64_t>(params.node_cap_factor) *
                      static_cast<std::uint64_t>(inst.num_vars());
    for (int probe = 0; probe < params.restarts - 1; ++probe) {
        SearchStats stats = mac_search(inst, Heuristic::random, result.weights, limits,
                                       derive_seed(params.seed, static_cast<std::uint64_t>(probe)));
        const Outcome outcome = stats.outcome;
        result.probes.push_back(std::move(stats));
        if (outcome == Outcome::sat || outcome == Outcome::unsat) {
            result.decided = true; // the probe already solved the instance
            break;
        }
    }
    return result;
}

// Hill climbing with restarts: random conflicted variable, best-value move
// under the weighted violation objective. A climb ends at a local minimum or
// after `cutoff` moves; the weights of the constraints violated at that point
// are incremented by one before the next restart. Every loop iteration,
// including the one that detects a local minimum, consumes one unit of the
// aggregate step budget.
struct HcParams {
    std::uint64_t iterations_total = 50;
    int cutoff = 50;
    std::uint64_t seed = 1;

    void validate() const {
        if (iterations_total < 1 || cutoff < 1)
            throw std::invalid_argument("hc params: iterations_total and cutoff must be >= 1");
    }
};

struct HcResult {
    ConstraintWeights weights;
    std::uint64_t steps = 0;
    bool solved = false;
    // One entry per completed climb: the constraints whose weight was
    // incremented when the climb ended.
    std::vector<std::vector<ConstraintId>> increments;
};

namespace hc_detail {

struct HcState {
    const CspInstance& inst;
    const ConstraintWeights& weights;
    std::vector<int> assignment; // domain index per variable
    std::vector<std::uint8_t> violated;

    explicit HcState(const CspInstance& inst_, const ConstraintWeights& weights_)
        : inst(inst_), weights(weights_),
          assignment(static_cast<std::size_t>(inst_.num_vars()), 0),
          violated(static_cast<std::size_t>(inst_.num_constraints()), 0) {}

    bool constraint_ok(const Constraint& c, VarId moved = -1, int moved_idx = -1) const {
        const int xi = c.x == moved ? moved_idx : assignment[static_cast<std::size_t>(c.x)];
        const int yi = c.y == moved ? moved_idx : assignment[static_cast<std::size_t>(c.y)];
        return c.allows_idx(xi, yi);
    }

    void randomize(Rng& rng) {
        for (VarId v = 0; v < inst.num_vars(); ++v)
            assignment[static_cast<std::size_t>(v)] =
                static_cast<int>(rng.below(inst.domain(v).size()));
        refresh();
    }

    void refresh() {
        for (const Constraint& c : inst.constraints())
            violated[static_cast<std::size_t>(c.id)] = constraint_ok(c) ? 0 : 1;
    }

    std::int64_t total_violation() const {
        std::int64_t total = 0;
        for (const Constraint& c : inst.constraints())
            if (violated[static_cast<std::size_t>(c.id)])
                total += weights.w[static_cast<std::size_t>(c.id)];
        return total;
    }

    // Change in the weighted violation if v moved to idx.
    std::int64_t move_delta(VarId v, int idx) const {
        std::int64_t delta = 0;
        for (const AdjEntry& e : inst.adjacency(v)) {
            const Constraint& c = inst.constraint(e.constraint);
            const bool ok_now = !violated[static_cast<std::size_t>(c.id)];
            const bool ok_then = constraint_ok(c, v, idx);
            if (ok_now != ok_then)
                delta += ok_then ? -weights.w[static_cast<std::size_t>(c.id)]
                                 : weights.w[static_cast<std::size_t>(c.id)];
        }
        return delta;
    }

    void apply_move(VarId v, int idx) {
        assignment[static_cast<std::size_t>(v)] = idx;
        for (const AdjEntry& e : inst.adjacency(v)) {
            const Constraint& c = inst.constraint(e.constraint);
            violated[static_cast<std::size_t>(c.id)] = constraint_ok(c) ? 0 : 1;
        }
    }

    std::vector<VarId> conflicted_vars() const {
        std::vector<std::uint8_t> mark(static_cast<std::size_t>(inst.num_vars()), 0);
        for (const Constraint& c : inst.constraints()) {
            if (violated[static_cast<std::size_t>(c.id)]) {
                mark[static_cast<std::size_t>(c.x)] = 1;
                mark[static_cast<std::size_t>(c.y)] = 1;
            }
        }
        std::vector<VarId> out;
        for (VarId v = 0; v < inst.num_vars(); ++v)
            if (mark[static_cast<std::size_t>(v)])
                out.push_back(v);
        return out;
    }

    bool has_violation() const {
        return std::any_of(violated.begin(), violated.end(), [](std::uint8_t b) { return b != 0; });
    }

    // No single-variable move strictly decreases the weighted violation.
    // Moving a variable outside every violated constraint can only add
    // violations, so scanning conflicted variables is enough.
    bool is_local_minimum(const std::vector<VarId>& conflicted) const {
        for (VarId v : conflicted) {
            const int d = static_cast<int>(inst.domain(v).size());
            for (int idx = 0; idx < d; ++idx)
                if (idx != assignment[static_cast<std::size_t>(v)] && move_delta(v, idx) < 0)
                    return false;
        }
        return true;
    }
};

} // namespace hc_detail

inline HcResult hc_learn(const CspInstance& inst, const HcParams& params) {
    params.validate();
    HcResult result;
    result.weights = unit_weights(inst);
    Rng rng(params.seed);
    hc_detail::HcState state(inst, result.weights);

    auto restart_increment = [&]() {
        std::vector<ConstraintId> bumped;
        for (const Constraint& c : inst.constraints()) {
            if (state.violated[static_cast<std::size_t>(c.id)]) {
                result.weights.w[static_cast<std::size_t>(c.id)] += 1;
                bumped.push_back(c.id);
            }
        }
        result.increments.push_back(std::move(bumped));
    };

    bool fresh_climb = true;
    int climb_steps = 0;
    while (result.steps < params.iterations_total) {
        if (fresh_climb) {
            state.randomize(rng);
            climb_steps = 0;
            fresh_climb = false;
        }
        if (!state.has_violation()) {
            result.solved = true;
            return result;
        }
        const std::vector<VarId> conflicted = state.conflicted_vars();
        if (state.is_local_minimum(conflicted)) {
            ++result.steps;
            restart_increment();
            fresh_climb = true;
            continue;
        }
        const VarId v = conflicted[static_cast<std::size_t>(rng.below(conflicted.size()))];
        int best_idx = 0;
        std::int64_t best_delta = std::numeric_limits<std::int64_t>::max();
        const int d = static_cast<int>(inst.domain(v).size());
        for (int idx = 0; idx < d; ++idx) {
            const std::int64_t delta =
                idx == state.assignment[static_cast<std::size_t>(v)] ? 0 : state.move_delta(v, idx);
            if (delta < best_delta) { // ties keep the smallest value
                best_delta = delta;
                best_idx = idx;
            }
        }
        state.apply_move(v, best_idx);
        ++result.steps;
        ++climb_steps;
        if (climb_steps >= params.cutoff) {
            restart_increment();
            fresh_climb = true;
        }
    }
    return result;
}

} // namespace cocsp
