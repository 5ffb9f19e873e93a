#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cocsp/csp.hpp"
#include "cocsp/domain_store.hpp"
#include "cocsp/propagate.hpp"
#include "cocsp/rng.hpp"

namespace cocsp {

enum class Heuristic { lex, random, dom, deg, ddeg, dom_ddeg, wdeg, dom_wdeg };

inline const char* to_string(Heuristic h) {
    switch (h) {
    case Heuristic::lex: return "lex";
    case Heuristic::random: return "random";
    case Heuristic::dom: return "dom";
    case Heuristic::deg: return "deg";
    case Heuristic::ddeg: return "ddeg";
    case Heuristic::dom_ddeg: return "dom_ddeg";
    case Heuristic::wdeg: return "wdeg";
    case Heuristic::dom_wdeg: return "dom_wdeg";
    }
    return "?";
}

inline Heuristic parse_heuristic(const std::string& s) {
    for (Heuristic h : {Heuristic::lex, Heuristic::random, Heuristic::dom, Heuristic::deg,
                        Heuristic::ddeg, Heuristic::dom_ddeg, Heuristic::wdeg,
                        Heuristic::dom_wdeg})
        if (s == to_string(h))
            return h;
    throw std::invalid_argument("unknown heuristic '" + s + "'");
}

constexpr Heuristic all_heuristics[] = {Heuristic::lex,      Heuristic::random, Heuristic::dom,
                                        Heuristic::deg,      Heuristic::ddeg,   Heuristic::dom_ddeg,
                                        Heuristic::wdeg,     Heuristic::dom_wdeg};

struct SearchLimits {
    std::optional<std::uint64_t> node_cap;
    std::optional<double> timeout_secs;
};

enum class Outcome { sat, unsat, timeout, node_limit };

inline const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::sat: return "sat";
    case Outcome::unsat: return "unsat";
    case Outcome::timeout: return "timeout";
    case Outcome::node_limit: return "node_limit";
    }
    return "?";
}

struct SearchStats {
    std::uint64_t nodes = 0;
    std::uint64_t wipeouts = 0;
    double elapsed = 0.0;
    Outcome outcome = Outcome::unsat;
    std::optional<Assignment> solution;
};

namespace detail {

// Weighted degree of v: sum of the weights of incident constraints with the
// other endpoint unassigned (the dynamic convention). ddeg is the same with
// unit weights.
inline std::int64_t dynamic_wdeg(const CspInstance& inst, const ConstraintWeights& weights,
                                 const std::vector<std::uint8_t>& assigned, VarId v) {
    std::int64_t sum = 0;
    for (const AdjEntry& e : inst.adjacency(v))
        if (!assigned[static_cast<std::size_t>(e.other)])
            sum += weights.w[static_cast<std::size_t>(e.constraint)];
    return sum;
}

inline std::int64_t dynamic_ddeg(const CspInstance& inst, const std::vector<std::uint8_t>& assigned,
                                 VarId v) {
    std::int64_t count = 0;
    for (const AdjEntry& e : inst.adjacency(v))
        if (!assigned[static_cast<std::size_t>(e.other)])
            ++count;
    return count;
}

} // namespace detail

// Pick an unassigned variable per the heuristic; ties go to the smallest
// index. Ratio heuristics (dom/ddeg, dom/wdeg) compare by cross
// multiplication so scaling all weights never perturbs a tie.
inline VarId select_variable(const CspInstance& inst, const DomainStore& store,
                             const ConstraintWeights& weights,
                             const std::vector<std::uint8_t>& assigned, Heuristic heuristic,
                             Rng& rng) {
    const int n = inst.num_vars();
    std::vector<VarId> candidates;
    candidates.reserve(static_cast<std::size_t>(n));
    for (VarId v = 0; v < n; ++v)
        if (!assigned[static_cast<std::size_t>(v)])
            candidates.push_back(v);
    if (candidates.empty())
        throw std::logic_error("select_variable: all variables assigned");

    switch (heuristic) {
    case Heuristic::lex:
        return candidates.front();
    case Heuristic::random:
        return candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
    default:
        break;
    }

    // For min-ratio heuristics `better` is dom_a * key_b < dom_b * key_a;
    // a zero key means an infinite ratio and always loses.
    VarId best = candidates.front();
    auto key_of = [&](VarId v) -> std::pair<std::int64_t, std::int64_t> {
        switch (heuristic) {
        case Heuristic::dom:
            return {store.count(v), 0};
        case Heuristic::deg:
            return {inst.degree(v), 0};
        case Heuristic::ddeg:
            return {detail::dynamic_ddeg(inst, assigned, v), 0};
        case Heuristic::wdeg:
            return {detail::dynamic_wdeg(inst, weights, assigned, v), 0};
        case Heuristic::dom_ddeg:
            return {store.count(v), detail::dynamic_ddeg(inst, assigned, v)};
        case Heuristic::dom_wdeg:
            return {store.count(v), detail::dynamic_wdeg(inst, weights, assigned, v)};
        default:
            throw std::logic_error("unreachable heuristic kind");
        }
    };
    auto better = [&](std::pair<std::int64_t, std::int64_t> a,
                      std::pair<std::int64_t, std::int64_t> b) {
        switch (heuristic) {
        case Heuristic::dom:
            return a.first < b.first;
        case Heuristic::deg:
        case Heuristic::ddeg:
        case Heuristic::wdeg:
            return a.first > b.first;
        default: // dom_ddeg, dom_wdeg: minimize dom/key
            return a.first * b.second < b.first * a.second;
        }
    };
    auto best_key = key_of(best);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const auto key = key_of(candidates[i]);
        if (better(key, best_key)) {
            best = candidates[i];
            best_key = key;
        }
    }
    return best;
}

// Pre-search static ordering: descending sum of the weights of *all*
// incident constraints, ties by smallest index.
inline std::vector<VarId> static_order_by_wdeg(const CspInstance& inst,
                                               const ConstraintWeights& weights) {
    std::vector<std::int64_t> sums(static_cast<std::size_t>(inst.num_vars()), 0);
    for (VarId v = 0; v < inst.num_vars(); ++v)
        for (const AdjEntry& e : inst.adjacency(v))
            sums[static_cast<std::size_t>(v)] += weights.w[static_cast<std::size_t>(e.constraint)];
    std::vector<VarId> order(static_cast<std::size_t>(inst.num_vars()));
    for (VarId v = 0; v < inst.num_vars(); ++v)
        order[static_cast<std::size_t>(v)] = v;
    std::stable_sort(order.begin(), order.end(), [&](VarId a, VarId b) {
        return sums[static_cast<std::size_t>(a)] > sums[static_cast<std::size_t>(b)];
    });
    return order;
}

namespace detail {

struct MacContext {
    const CspInstance& inst;
    DomainStore& store;
    ConstraintWeights& weights;
    SearchStats& stats;
    Rng& rng;
    Heuristic heuristic;
    SearchLimits limits;
    std::chrono::steady_clock::time_point started;
    std::vector<std::uint8_t> assigned;
    int assigned_count = 0;

    bool out_of_time() const {
        if (!limits.timeout_secs)
            return false;
        const auto now = std::chrono::steady_clock::now();
        return std::chrono::duration<double>(now - started).count() >= *limits.timeout_secs;
    }
};

enum class DfsResult { found, exhausted, stopped };

inline DfsResult mac_dfs(MacContext& ctx) {
    const VarId v =
        select_variable(ctx.inst, ctx.store, ctx.weights, ctx.assigned, ctx.heuristic, ctx.rng);
    const std::vector<int> values = ctx.store.current_indices(v);
    for (int idx : values) {
        if (ctx.limits.node_cap && ctx.stats.nodes >= *ctx.limits.node_cap) {
            ctx.stats.outcome = Outcome::node_limit;
            return DfsResult::stopped;
        }
        if (ctx.out_of_time()) {
            ctx.stats.outcome = Outcome::timeout;
            return DfsResult::stopped;
        }
        ctx.store.push_level();
        ctx.store.assign(v, idx);
        ctx.assigned[static_cast<std::size_t>(v)] = 1;
        ++ctx.assigned_count;
        ++ctx.stats.nodes;
        const Ac3Result res = ac3(ctx.inst, ctx.store, ctx.weights, arcs_toward(ctx.inst, v));
        if (res.consistent) {
            if (ctx.assigned_count == ctx.inst.num_vars()) {
                Assignment sol(ctx.inst.num_vars());
                for (VarId u = 0; u < ctx.inst.num_vars(); ++u)
                    sol.bind(u, ctx.inst.domain(u)[static_cast<std::size_t>(
                                    ctx.store.first_index(u))]);
                ctx.stats.solution = std::move(sol);
                ctx.stats.outcome = Outcome::sat;
                return DfsResult::found;
            }
            const DfsResult sub = mac_dfs(ctx);
            if (sub != DfsResult::exhausted)
                return sub;
        } else {
            ++ctx.stats.wipeouts;
        }
        ctx.store.pop_level();
        ctx.assigned[static_cast<std::size_t>(v)] = 0;
        --ctx.assigned_count;
    }
    return DfsResult::exhausted;
}

} // namespace detail

// MAC backtracking: d-way branching, values tried in ascending order, full
// arc consistency re-established after every assignment. A node is one value
// assignment; the culprit constraint's weight is bumped on every wipeout
// (inside ac3). Weights accumulate across calls when the caller reuses them.
inline SearchStats mac_search(const CspInstance& inst, Heuristic heuristic,
                              ConstraintWeights& weights, const SearchLimits& limits,
                              std::uint64_t rng_seed) {
    if (weights.w.size() != static_cast<std::size_t>(inst.num_constraints()))
        throw std::invalid_argument("mac_search: weights not initialized for this instance");
    for (std::int64_t w : weights.w)
        if (w < 1)
            throw std::invalid_argument("mac_search: constraint weights must be >= 1");

    SearchStats stats;
    DomainStore store(inst);
    Rng rng(rng_seed);
    detail::MacContext ctx{inst,   store,  weights,
                           stats,  rng,    heuristic,
                           limits, std::chrono::steady_clock::now(),
                           std::vector<std::uint8_t>(static_cast<std::size_t>(inst.num_vars()), 0)};

    const Ac3Result root = ac3(inst, store, weights, all_arcs(inst));
    if (!root.consistent) {
        ++stats.wipeouts;
        stats.outcome = Outcome::unsat;
    } else {
        const detail::DfsResult r = detail::mac_dfs(ctx);
        if (r == detail::DfsResult::exhausted)
            stats.outcome = Outcome::unsat;
        // found/stopped already set the outcome.
    }
    stats.elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started).count();
    return stats;
}

} // namespace cocsp
