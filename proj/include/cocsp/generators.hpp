#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cocsp/csp.hpp"
#include "cocsp/rng.hpp"

namespace cocsp {

// Tightness is the fraction of value pairs *disallowed* per relation; all
// generated relations use conflicts semantics with round(tightness * d^2)
// distinct forbidden tuples.

struct ModelDParams {
    int n = 0;
    int d = 0;
    int e = 0;
    double tightness = 0.0;
    std::uint64_t seed = 0;
};

struct ModelRbParams {
    int n = 0;
    double alpha = 0.0; // d = round(n^alpha)
    double r = 0.0;     // e = round(r * n * ln n)
    double p = 0.0;     // tightness in (0,1)
    bool forced = false;
    std::uint64_t seed = 0;
};

struct GeoParams {
    int n = 0;
    int d = 0;
    double distance = 0.0;
    double tightness = 0.0;
    std::uint64_t seed = 0;
};

struct ModelRbInstance {
    CspInstance instance;
    std::optional<Assignment> planted;
};

namespace detail {

inline long round_half_up(double x) { return static_cast<long>(std::floor(x + 0.5)); }

// k distinct values from [0, total), uniform without replacement, returned
// ascending (partial Fisher-Yates).
inline std::vector<long> sample_distinct(Rng& rng, long total, long k) {
    std::vector<long> pool(static_cast<std::size_t>(total));
    for (long i = 0; i < total; ++i)
        pool[static_cast<std::size_t>(i)] = i;
    for (long i = 0; i < k; ++i) {
        const long j = i + static_cast<long>(rng.below(static_cast<std::uint64_t>(total - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

inline std::vector<std::pair<VarId, VarId>> sample_pairs(Rng& rng, int n, long e) {
    std::vector<std::pair<VarId, VarId>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (VarId i = 0; i < n; ++i)
        for (VarId j = i + 1; j < n; ++j)
            pairs.emplace_back(i, j);
    std::vector<std::pair<VarId, VarId>> chosen;
    chosen.reserve(static_cast<std::size_t>(e));
    for (const long idx : sample_distinct(rng, static_cast<long>(pairs.size()), e))
        chosen.push_back(pairs[static_cast<std::size_t>(idx)]);
    return chosen; // already sorted: sample indices come back ascending
}

// round(tightness * d^2) distinct forbidden tuples over [0,d)^2, optionally
// avoiding one planted pair.
inline Relation conflicts_relation(Rng& rng, int d, long forbid,
                                   std::optional<long> skip_code = std::nullopt) {
    const long total = static_cast<long>(d) * d;
    std::vector<long> codes;
    if (skip_code) {
        std::vector<long> pool;
        pool.reserve(static_cast<std::size_t>(total - 1));
        for (long c = 0; c < total; ++c)
            if (c != *skip_code)
                pool.push_back(c);
        for (long i = 0; i < forbid; ++i) {
            const long j =
                i + static_cast<long>(rng.below(static_cast<std::uint64_t>(pool.size() - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(forbid));
        std::sort(pool.begin(), pool.end());
        codes = std::move(pool);
    } else {
        codes = sample_distinct(rng, total, forbid);
    }
    Relation rel;
    rel.semantics = RelationSemantics::conflicts;
    rel.tuples.reserve(codes.size());
    for (long c : codes)
        rel.tuples.emplace_back(static_cast<Value>(c / d), static_cast<Value>(c % d));
    return rel;
}

inline std::vector<Domain> uniform_domains(int n, int d) {
    Domain dom(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        dom[static_cast<std::size_t>(i)] = i;
    return std::vector<Domain>(static_cast<std::size_t>(n), dom);
}

} // namespace detail

inline CspInstance gen_model_d(const ModelDParams& p) {
    const long npairs = static_cast<long>(p.n) * (p.n - 1) / 2;
    if (p.n < 2 || p.d < 1 || p.e < 1 || p.e > npairs)
        throw std::invalid_argument("gen_model_d: need n >= 2, d >= 1, 1 <= e <= n(n-1)/2");
    if (p.tightness < 0.0 || p.tightness > 1.0)
        throw std::invalid_argument("gen_model_d: tightness must lie in [0,1]");
    Rng rng(p.seed);
    const long forbid = detail::round_half_up(p.tightness * p.d * p.d);
    std::vector<ConstraintSpec> specs;
    specs.reserve(static_cast<std::size_t>(p.e));
    for (const auto& [i, j] : detail::sample_pairs(rng, p.n, p.e))
        specs.push_back({i, j, detail::conflicts_relation(rng, p.d, forbid)});
    const std::string name = "rand-2-" + std::to_string(p.n) + "-" + std::to_string(p.d) + "-" +
                             std::to_string(p.e) + "-" +
                             std::to_string(detail::round_half_up(1000.0 * p.tightness)) + "-" +
                             std::to_string(p.seed);
    return CspInstance(name, detail::uniform_domains(p.n, p.d), std::move(specs));
}

inline ModelRbInstance gen_model_rb(const ModelRbParams& p) {
    if (p.n < 2 || p.alpha <= 0.0 || p.r <= 0.0)
        throw std::invalid_argument("gen_model_rb: need n >= 2, alpha > 0, r > 0");
    if (p.p <= 0.0 || p.p >= 1.0)
        throw std::invalid_argument("gen_model_rb: tightness p must lie in (0,1)");
    const int d = static_cast<int>(detail::round_half_up(std::pow(p.n, p.alpha)));
    if (d < 2)
        throw std::invalid_argument("gen_model_rb: derived domain size d < 2");
    const long e = detail::round_half_up(p.r * p.n * std::log(p.n));
    const long npairs = static_cast<long>(p.n) * (p.n - 1) / 2;
    if (e < 1 || e > npairs)
        throw std::invalid_argument("gen_model_rb: derived constraint count e out of range");
    const long forbid = detail::round_half_up(p.p * d * d);
    if (p.forced && forbid > static_cast<long>(d) * d - 1)
        throw std::invalid_argument("gen_model_rb: cannot avoid the planted tuple");

    Rng rng(p.seed);
    std::optional<Assignment> planted;
    std::vector<int> planted_vals;
    if (p.forced) {
        Assignment a(p.n);
        planted_vals.resize(static_cast<std::size_t>(p.n));
        for (VarId v = 0; v < p.n; ++v) {
            const int val = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
            planted_vals[static_cast<std::size_t>(v)] = val;
            a.bind(v, val);
        }
        planted = std::move(a);
    }
    std::vector<ConstraintSpec> specs;
    specs.reserve(static_cast<std::size_t>(e));
    for (const auto& [i, j] : detail::sample_pairs(rng, p.n, e)) {
        std::optional<long> skip;
        if (p.forced)
            skip = static_cast<long>(planted_vals[static_cast<std::size_t>(i)]) * d +
                   planted_vals[static_cast<std::size_t>(j)];
        specs.push_back({i, j, detail::conflicts_relation(rng, d, forbid, skip)});
    }
    const std::string name =
        "frb" + std::to_string(p.n) + "-" + std::to_string(d) + "-" + std::to_string(p.seed);
    CspInstance inst(name, detail::uniform_domains(p.n, d), std::move(specs));
    return {std::move(inst), std::move(planted)};
}

// Geometric instance over explicit points; gen_geo draws the points.
inline CspInstance geo_from_points(const std::vector<std::pair<double, double>>& points,
                                   const GeoParams& p, Rng& rng) {
    const int n = static_cast<int>(points.size());
    const long forbid = detail::round_half_up(p.tightness * p.d * p.d);
    std::vector<ConstraintSpec> specs;
    const double dist2 = p.distance * p.distance;
    for (VarId i = 0; i < n; ++i) {
        for (VarId j = i + 1; j < n; ++j) {
            const double dx = points[static_cast<std::size_t>(i)].first -
                              points[static_cast<std::size_t>(j)].first;
            const double dy = points[static_cast<std::size_t>(i)].second -
                              points[static_cast<std::size_t>(j)].second;
            if (dx * dx + dy * dy <= dist2)
                specs.push_back({i, j, detail::conflicts_relation(rng, p.d, forbid)});
        }
    }
    const std::string name = "geo" + std::to_string(p.n) + "-" + std::to_string(p.d) + "-d" +
                             std::to_string(detail::round_half_up(100.0 * p.distance)) + "-" +
                             std::to_string(detail::round_half_up(1000.0 * p.tightness)) + "-" +
                             std::to_string(p.seed);
    return CspInstance(name, detail::uniform_domains(n, p.d), std::move(specs));
}

inline CspInstance gen_geo(const GeoParams& p) {
    if (p.n < 1 || p.d < 1)
        throw std::invalid_argument("gen_geo: need n >= 1, d >= 1");
    if (p.distance < 0.0 || p.distance > std::sqrt(2.0))
        throw std::invalid_argument("gen_geo: distance must lie in [0, sqrt(2)]");
    if (p.tightness < 0.0 || p.tightness > 1.0)
        throw std::invalid_argument("gen_geo: tightness must lie in [0,1]");
    Rng rng(p.seed);
    std::vector<std::pair<double, double>> points;
    points.reserve(static_cast<std::size_t>(p.n));
    for (int i = 0; i < p.n; ++i) {
        const double x = rng.uniform01();
        const double y = rng.uniform01();
        points.emplace_back(x, y);
    }
    return geo_from_points(points, p, rng);
}

} // namespace cocsp
