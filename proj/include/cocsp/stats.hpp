#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace cocsp {

// Mann-Whitney U with mid-ranks for ties. U is reported as min(U_a, U_b);
// the two-sided p-value is exact (full enumeration of rank assignments) for
// pooled sizes up to mwu_exact_limit, and otherwise uses the normal
// approximation with continuity correction and tie-corrected variance.

inline constexpr std::size_t mwu_exact_limit = 16;

struct MwuResult {
    double u = 0.0;
    double u_a = 0.0;
    double u_b = 0.0;
    double p = 1.0;
};

namespace stats_detail {

// Pooled mid-ranks doubled to stay integral (a mid-rank is k or k + 1/2).
inline std::vector<long> doubled_ranks(std::span<const double> a, std::span<const double> b) {
    struct Entry {
        double value;
        std::size_t pos;
    };
    std::vector<Entry> pooled;
    pooled.reserve(a.size() + b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        pooled.push_back({a[i], i});
    for (std::size_t i = 0; i < b.size(); ++i)
        pooled.push_back({b[i], a.size() + i});
    std::sort(pooled.begin(), pooled.end(),
              [](const Entry& x, const Entry& y) { return x.value < y.value; });
    std::vector<long> ranks2(pooled.size());
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value)
            ++j;
        // positions i..j-1 share the mid-rank ((i+1) + j) / 2.
        const long rank2 = static_cast<long>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            ranks2[pooled[k].pos] = rank2;
        i = j;
    }
    return ranks2;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Exact two-sided p: the fraction of the C(n, n_a) rank assignments whose
// min(U_a, U_b) is at most the observed one.
inline double exact_p(const std::vector<long>& ranks2, std::size_t n_a, long min_u2_observed) {
    const std::size_t n = ranks2.size();
    const std::size_t n_b = n - n_a;
    const long u_offset = static_cast<long>(n_a * (n_a + 1)); // 2 * n_a(n_a+1)/2
    const long full2 = static_cast<long>(2 * n_a * n_b);
    std::uint64_t extreme = 0, total = 0;
    // Depth-first enumeration of the size-n_a subsets with running rank sums.
    auto recurse = [&](auto&& self, std::size_t next, long sum2, std::size_t chosen) -> void {
        if (chosen == n_a) {
            const long ua2 = sum2 - u_offset;
            const long ub2 = full2 - ua2;
            ++total;
            if (std::min(ua2, ub2) <= min_u2_observed)
                ++extreme;
            return;
        }
        if (n - next < n_a - chosen)
            return;
        self(self, next + 1, sum2 + ranks2[next], chosen + 1);
        self(self, next + 1, sum2, chosen);
    };
    recurse(recurse, 0, 0, 0);
    return static_cast<double>(extreme) / static_cast<double>(total);
}

inline double approx_p(const std::vector<long>& ranks2, std::size_t n_a, double u) {
    const std::size_t n = ranks2.size();
    const std::size_t n_b = n - n_a;
    const double na = static_cast<double>(n_a);
    const double nb = static_cast<double>(n_b);
    const double nn = static_cast<double>(n);
    // Tie-group sizes from the doubled ranks.
    std::vector<long> sorted = ranks2;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double mean = na * nb / 2.0;
    const double variance =
        na * nb / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (variance <= 0.0)
        return 1.0; // every pooled value identical
    const double z = (u - mean + 0.5) / std::sqrt(variance);
    return std::min(1.0, std::max(0.0, 2.0 * normal_cdf(z)));
}

} // namespace stats_detail

inline MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann_whitney_u: samples must be non-empty");
    const std::vector<long> ranks2 = stats_detail::doubled_ranks(a, b);
    long ra2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        ra2 += ranks2[i];
    MwuResult res;
    res.u_a = (static_cast<double>(ra2) - static_cast<double>(a.size() * (a.size() + 1))) / 2.0;
    res.u_b = static_cast<double>(a.size() * b.size()) - res.u_a;
    res.u = std::min(res.u_a, res.u_b);
    if (a.size() + b.size() <= mwu_exact_limit)
        res.p = stats_detail::exact_p(ranks2, a.size(), static_cast<long>(2.0 * res.u));
    else
        res.p = stats_detail::approx_p(ranks2, a.size(), res.u);
    return res;
}

// Both p-value routes on the same data, for cross-validation.
inline double mwu_exact_p(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mwu_exact_p: samples must be non-empty");
    const std::vector<long> ranks2 = stats_detail::doubled_ranks(a, b);
    long ra2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        ra2 += ranks2[i];
    const double u_a =
        (static_cast<double>(ra2) - static_cast<double>(a.size() * (a.size() + 1))) / 2.0;
    const double u = std::min(u_a, static_cast<double>(a.size() * b.size()) - u_a);
    return stats_detail::exact_p(ranks2, a.size(), static_cast<long>(2.0 * u));
}

inline double mwu_normal_p(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mwu_normal_p: samples must be non-empty");
    const std::vector<long> ranks2 = stats_detail::doubled_ranks(a, b);
    long ra2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        ra2 += ranks2[i];
    const double u_a =
        (static_cast<double>(ra2) - static_cast<double>(a.size() * (a.size() + 1))) / 2.0;
    const double u = std::min(u_a, static_cast<double>(a.size() * b.size()) - u_a);
    return stats_detail::approx_p(ranks2, a.size(), u);
}

// P(x > y) + P(x = y)/2 over all cross pairs: the probability that the first
// sample achieves the higher value.
inline double vargha_delaney_a(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("vargha_delaney_a: samples must be non-empty");
    double score = 0.0;
    for (double x : a)
        for (double y : b) {
            if (x > y)
                score += 1.0;
            else if (x == y)
                score += 0.5;
        }
    return score / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

} // namespace cocsp
