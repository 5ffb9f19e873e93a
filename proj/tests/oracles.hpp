#pragma once

// Test-only oracles, deliberately independent of the library's search and
// propagation paths: plain enumeration over assignments and a queue-free
// arc-consistency closure.

#include <optional>
#include <vector>

#include "cocsp/csp.hpp"

namespace oracles {

// Exhaustive satisfiability check over all d^n assignments.
inline bool brute_force_satisfiable(const cocsp::CspInstance& inst) {
    const int n = inst.num_vars();
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        bool ok = true;
        for (const cocsp::Constraint& c : inst.constraints()) {
            const cocsp::Value xv = inst.domain(c.x)[idx[static_cast<std::size_t>(c.x)]];
            const cocsp::Value yv = inst.domain(c.y)[idx[static_cast<std::size_t>(c.y)]];
            if (!inst.check(c, xv, yv)) {
                ok = false;
                break;
            }
        }
        if (ok)
            return true;
        int v = n - 1;
        while (v >= 0) {
            if (++idx[static_cast<std::size_t>(v)] < inst.domain(v).size())
                break;
            idx[static_cast<std::size_t>(v)] = 0;
            --v;
        }
        if (v < 0)
            return false;
    }
}

// Arc-consistency closure by repeated full sweeps: delete any value without
// a support on some constraint until nothing changes. Returns the closed
// domains (possibly with empty entries).
inline std::vector<std::vector<cocsp::Value>>
ac_closure(const cocsp::CspInstance& inst,
           std::optional<std::vector<std::vector<cocsp::Value>>> start = std::nullopt) {
    std::vector<std::vector<cocsp::Value>> dom;
    if (start) {
        dom = *start;
    } else {
        for (cocsp::VarId v = 0; v < inst.num_vars(); ++v)
            dom.push_back(inst.domain(v));
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const cocsp::Constraint& c : inst.constraints()) {
            for (int dir = 0; dir < 2; ++dir) {
                const cocsp::VarId x = dir == 0 ? c.x : c.y;
                const cocsp::VarId y = dir == 0 ? c.y : c.x;
                std::vector<cocsp::Value> kept;
                for (cocsp::Value xv : dom[static_cast<std::size_t>(x)]) {
                    bool supported = false;
                    for (cocsp::Value yv : dom[static_cast<std::size_t>(y)]) {
                        const bool allowed =
                            dir == 0 ? inst.check(c, xv, yv) : inst.check(c, yv, xv);
                        if (allowed) {
                            supported = true;
                            break;
                        }
                    }
                    if (supported)
                        kept.push_back(xv);
                }
                if (kept.size() != dom[static_cast<std::size_t>(x)].size()) {
                    dom[static_cast<std::size_t>(x)] = std::move(kept);
                    changed = true;
                }
            }
        }
    }
    return dom;
}

inline bool closure_has_wipeout(const std::vector<std::vector<cocsp::Value>>& dom) {
    for (const auto& d : dom)
        if (d.empty())
            return true;
    return false;
}

} // namespace oracles
