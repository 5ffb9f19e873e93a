#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cocsp/csp.hpp"
#include "cocsp/domain_store.hpp"

namespace cocsp {

// One weight per constraint. Weights start at 1 and never decrease: the
// search increments the culprit's weight on every domain wipeout, and the
// learners layer their learned values on top of the same floor.
struct ConstraintWeights {
    std::vector<std::int64_t> w;
};

inline ConstraintWeights unit_weights(const CspInstance& inst) {
    return {std::vector<std::int64_t>(static_cast<std::size_t>(inst.num_constraints()), 1)};
}

// Directed arc: revise the domain of `x` against `y` through constraint `c`.
struct Arc {
    VarId x;
    ConstraintId c;
    VarId y;
};

inline std::vector<Arc> all_arcs(const CspInstance& inst) {
    std::vector<Arc> arcs;
    arcs.reserve(static_cast<std::size_t>(inst.num_constraints()) * 2);
    for (const Constraint& c : inst.constraints()) {
        arcs.push_back({c.x, c.id, c.y});
        arcs.push_back({c.y, c.id, c.x});
    }
    return arcs;
}

// Arcs that revise the neighbors of v against v, as seeded after assigning v.
inline std::vector<Arc> arcs_toward(const CspInstance& inst, VarId v) {
    std::vector<Arc> arcs;
    arcs.reserve(inst.adjacency(v).size());
    for (const AdjEntry& e : inst.adjacency(v))
        arcs.push_back({e.other, e.constraint, v});
    return arcs;
}

struct ReviseResult {
    bool revised = false;
    bool wipeout = false;
};

namespace detail {

inline bool intersects(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] & b[i])
            return true;
    return false;
}

} // namespace detail

// Remove from current(x) every value with no support in current(y).
// Removed values are trailed at the store's current level; `removed_out`,
// when non-null, collects them as domain values.
inline ReviseResult revise(const CspInstance& inst, DomainStore& store, const Arc& arc,
                           std::vector<Value>* removed_out = nullptr) {
    const Constraint& c = inst.constraint(arc.c);
    const bool x_is_first = arc.x == c.x;
    if ((x_is_first && arc.y != c.y) || (!x_is_first && (arc.x != c.y || arc.y != c.x)))
        throw std::invalid_argument("revise: arc endpoints do not match the constraint scope");

    ReviseResult res;
    const auto y_words = store.words(arc.y);
    for (int xi : store.current_indices(arc.x)) {
        const auto row = x_is_first ? c.fwd_row(xi) : c.rev_row(xi);
        if (!detail::intersects(row, y_words)) {
            store.remove(arc.x, xi);
            res.revised = true;
            if (removed_out)
                removed_out->push_back(inst.domain(arc.x)[static_cast<std::size_t>(xi)]);
        }
    }
    res.wipeout = store.count(arc.x) == 0;
    return res;
}

struct Ac3Result {
    bool consistent = true;
    std::optional<ConstraintId> culprit;
};

// Queue-based AC-3 over the seeded arcs. Stops at the first domain wipeout,
// increments the culprit constraint's weight by one, and reports it; when it
// returns consistent, every seeded (and re-queued) arc is arc consistent.
inline Ac3Result ac3(const CspInstance& inst, DomainStore& store, ConstraintWeights& weights,
                     const std::vector<Arc>& seed_arcs) {
    // Directed arc id: 2*c, revising scope.x; 2*c+1, revising scope.y.
    const auto arc_id = [&](const Arc& a) {
        return 2 * a.c + (a.x == inst.constraint(a.c).x ? 0 : 1);
    };
    std::vector<std::uint8_t> in_queue(static_cast<std::size_t>(inst.num_constraints()) * 2, 0);
    std::vector<Arc> queue;
    queue.reserve(seed_arcs.size());
    for (const Arc& a : seed_arcs) {
        if (!in_queue[static_cast<std::size_t>(arc_id(a))]) {
            in_queue[static_cast<std::size_t>(arc_id(a))] = 1;
            queue.push_back(a);
        }
    }
    std::size_t head = 0;
    while (head < queue.size()) {
        const Arc a = queue[head++];
        in_queue[static_cast<std::size_t>(arc_id(a))] = 0;
        const ReviseResult r = revise(inst, store, a);
        if (r.wipeout) {
            weights.w[static_cast<std::size_t>(a.c)] += 1;
            return {false, a.c};
        }
        if (r.revised) {
            for (const AdjEntry& e : inst.adjacency(a.x)) {
                if (e.other == a.y)
                    continue;
                const Arc back{e.other, e.constraint, a.x};
                if (!in_queue[static_cast<std::size_t>(arc_id(back))]) {
                    in_queue[static_cast<std::size_t>(arc_id(back))] = 1;
                    queue.push_back(back);
                }
            }
        }
    }
    return {true, std::nullopt};
}

} // namespace cocsp
