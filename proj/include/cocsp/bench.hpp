#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cocsp/coevo.hpp"
#include "cocsp/csp.hpp"
#include "cocsp/learners.hpp"
#include "cocsp/rng.hpp"
#include "cocsp/search.hpp"
#include "cocsp/stats.hpp"

namespace cocsp {

enum class Method { plain_mac, coevo_mac, rndi_mac, hc_mac };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::plain_mac: return "plain-mac";
    case Method::coevo_mac: return "coevo+mac";
    case Method::rndi_mac: return "rndi+mac";
    case Method::hc_mac: return "hc+mac";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "plain-mac" || s == "mac")
        return Method::plain_mac;
    if (s == "coevo" || s == "coevo+mac")
        return Method::coevo_mac;
    if (s == "rndi" || s == "rndi+mac")
        return Method::rndi_mac;
    if (s == "hc" || s == "hc+mac")
        return Method::hc_mac;
    throw std::invalid_argument("unknown method '" + s + "'");
}

// One solving pipeline: optional weight learner, then the MAC search with the
// learned weights carried in.
struct MethodConfig {
    Method method = Method::plain_mac;
    Heuristic heuristic = Heuristic::wdeg; // final/search heuristic
    CoevoParams coevo;
    RndiParams rndi;
    HcParams hc;

    std::string label() const {
        if (method == Method::plain_mac)
            return std::string(to_string(method)) + "(" + to_string(heuristic) + ")";
        return to_string(method);
    }
};

struct RunConfig {
    int runs = 50;
    double timeout_secs = 1200.0;
    std::uint64_t base_seed = 1;
    int jobs = 1;

    void validate() const {
        if (runs < 1)
            throw std::invalid_argument("run config: runs must be >= 1");
        if (timeout_secs <= 0.0)
            throw std::invalid_argument("run config: timeout must be positive");
        if (jobs < 1)
            throw std::invalid_argument("run config: jobs must be >= 1");
    }
};

struct RunRecord {
    int run = 0;
    double learn_seconds = 0.0;
    double search_seconds = 0.0;
    double total_seconds = 0.0; // t
    std::uint64_t nodes = 0;    // n
    std::uint64_t wipeouts = 0;
    Outcome outcome = Outcome::unsat;
};

// Learner seeds and the search seed are derived from the per-run seed, which
// is base_seed + run index.
inline RunRecord run_pipeline(const CspInstance& inst, const MethodConfig& method,
                              double timeout_secs, std::uint64_t run_seed, int run_index) {
    RunRecord rec;
    rec.run = run_index;

    const auto learn_started = std::chrono::steady_clock::now();
    ConstraintWeights weights = unit_weights(inst);
    switch (method.method) {
    case Method::plain_mac:
        break;
    case Method::coevo_mac: {
        CoevoParams p = method.coevo;
        p.seed = derive_seed(run_seed, 101);
        weights = learn_weights(inst, p);
        break;
    }
    case Method::rndi_mac: {
        RndiParams p = method.rndi;
        p.seed = derive_seed(run_seed, 102);
        RndiResult r = rndi_learn(inst, p);
        weights = std::move(r.weights);
        break;
    }
    case Method::hc_mac: {
        HcParams p = method.hc;
        p.seed = derive_seed(run_seed, 103);
        HcResult r = hc_learn(inst, p);
        weights = std::move(r.weights);
        break;
    }
    }
    rec.learn_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - learn_started).count();

    const double remaining = timeout_secs - rec.learn_seconds;
    if (remaining <= 0.0) {
        rec.outcome = Outcome::timeout;
        rec.total_seconds = timeout_secs; // timeout runs record t = timeout
        return rec;
    }
    SearchLimits limits;
    limits.timeout_secs = remaining;
    const Heuristic h =
        method.method == Method::rndi_mac ? method.rndi.final_heuristic : method.heuristic;
    SearchStats stats = mac_search(inst, h, weights, limits, derive_seed(run_seed, 104));
    rec.search_seconds = stats.elapsed;
    rec.nodes = stats.nodes;
    rec.wipeouts = stats.wipeouts;
    rec.outcome = stats.outcome;
    rec.total_seconds = rec.outcome == Outcome::timeout ? timeout_secs
                                                        : rec.learn_seconds + rec.search_seconds;
    return rec;
}

inline std::vector<RunRecord> run_experiment(const CspInstance& inst, const MethodConfig& method,
                                             const RunConfig& cfg) {
    cfg.validate();
    std::vector<RunRecord> records(static_cast<std::size_t>(cfg.runs));
    if (cfg.jobs <= 1) {
        for (int i = 0; i < cfg.runs; ++i)
            records[static_cast<std::size_t>(i)] = run_pipeline(
                inst, method, cfg.timeout_secs, cfg.base_seed + static_cast<std::uint64_t>(i), i);
        return records;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.runs)
                return;
            records[static_cast<std::size_t>(i)] = run_pipeline(
                inst, method, cfg.timeout_secs, cfg.base_seed + static_cast<std::uint64_t>(i), i);
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(cfg.jobs, cfg.runs);
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    return records;
}

struct ComparisonResult {
    std::string metric; // "t" or "n"
    std::string first, second;
    double mean_first = 0.0, mean_second = 0.0;
    double u = 0.0;
    double p_value = 1.0;
    double a_measure = 0.5;
    bool significant = false; // p < 0.05
};

struct MethodSummary {
    std::string label;
    double mean_t = 0.0;
    double mean_n = 0.0;
};

struct Summary {
    std::vector<MethodSummary> methods;
    std::vector<ComparisonResult> comparisons;
};

namespace bench_detail {

inline std::vector<double> metric_values(const std::vector<RunRecord>& records, bool nodes) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const RunRecord& r : records)
        out.push_back(nodes ? static_cast<double>(r.nodes) : r.total_seconds);
    return out;
}

inline double mean(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

} // namespace bench_detail

// Per-method means plus one pairwise comparison per metric for every method
// pair, in input order.
inline Summary summarize(const std::vector<std::pair<std::string, std::vector<RunRecord>>>& by_method) {
    Summary summary;
    for (const auto& [label, records] : by_method)
        summary.methods.push_back({label,
                                   bench_detail::mean(bench_detail::metric_values(records, false)),
                                   bench_detail::mean(bench_detail::metric_values(records, true))});
    for (std::size_t i = 0; i < by_method.size(); ++i) {
        for (std::size_t j = i + 1; j < by_method.size(); ++j) {
            for (const bool nodes : {false, true}) {
                const auto a = bench_detail::metric_values(by_method[i].second, nodes);
                const auto b = bench_detail::metric_values(by_method[j].second, nodes);
                const MwuResult mwu = mann_whitney_u(a, b);
                ComparisonResult cmp;
                cmp.metric = nodes ? "n" : "t";
                cmp.first = by_method[i].first;
                cmp.second = by_method[j].first;
                cmp.mean_first = bench_detail::mean(a);
                cmp.mean_second = bench_detail::mean(b);
                cmp.u = mwu.u;
                cmp.p_value = mwu.p;
                cmp.a_measure = vargha_delaney_a(a, b);
                cmp.significant = mwu.p < 0.05;
                summary.comparisons.push_back(std::move(cmp));
            }
        }
    }
    return summary;
}

namespace bench_detail {

inline std::string format_double(double x) {
    std::ostringstream out;
    out << std::setprecision(17) << x;
    return out.str();
}

} // namespace bench_detail

// One row per run; '#' lines carry the reproducibility metadata. The
// wall-clock columns are the last three.
inline std::string runs_csv(const CspInstance& inst, const std::string& label,
                            const RunConfig& cfg, const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << "# instance=" << inst.name() << "\n";
    out << "# method=" << label << "\n";
    out << "# runs=" << cfg.runs << " base_seed=" << cfg.base_seed
        << " timeout_secs=" << bench_detail::format_double(cfg.timeout_secs) << "\n";
    out << "run,outcome,n,wipeouts,learn_seconds,search_seconds,t\n";
    for (const RunRecord& r : records) {
        out << r.run << "," << to_string(r.outcome) << "," << r.nodes << "," << r.wipeouts << ","
            << bench_detail::format_double(r.learn_seconds) << ","
            << bench_detail::format_double(r.search_seconds) << ","
            << bench_detail::format_double(r.total_seconds) << "\n";
    }
    return out.str();
}

inline std::string comparison_csv(const Summary& summary) {
    std::ostringstream out;
    out << "metric,first,second,mean_first,mean_second,u,p,a_measure,significant\n";
    for (const ComparisonResult& c : summary.comparisons) {
        out << c.metric << "," << c.first << "," << c.second << ","
            << bench_detail::format_double(c.mean_first) << ","
            << bench_detail::format_double(c.mean_second) << ","
            << bench_detail::format_double(c.u) << "," << bench_detail::format_double(c.p_value)
            << "," << bench_detail::format_double(c.a_measure) << ","
            << (c.significant ? "1" : "0") << "\n";
    }
    return out.str();
}

// Aligned benchmark-style table: the A measure is printed with a
// '(*)' marker when significant, '-' otherwise.
inline std::string summary_table(const Summary& summary) {
    std::ostringstream out;
    out << std::left << std::setw(24) << "method" << std::right << std::setw(14) << "mean t"
        << std::setw(16) << "mean n" << "\n";
    for (const MethodSummary& m : summary.methods) {
        out << std::left << std::setw(24) << m.label << std::right << std::fixed
            << std::setprecision(4) << std::setw(14) << m.mean_t << std::setprecision(2)
            << std::setw(16) << m.mean_n << "\n";
        out.unsetf(std::ios::fixed);
    }
    if (summary.comparisons.empty())
        return out.str();
    out << "\n"
        << std::left << std::setw(40) << "comparison" << std::setw(8) << "metric" << std::setw(12)
        << "A" << "\n";
    for (const ComparisonResult& c : summary.comparisons) {
        std::ostringstream cell;
        if (c.significant)
            cell << std::fixed << std::setprecision(3) << c.a_measure << "(*)";
        else
            cell << "-";
        out << std::left << std::setw(40) << (c.first + " vs " + c.second) << std::setw(8)
            << c.metric << std::setw(12) << cell.str() << "\n";
    }
    return out.str();
}

// Column reader for the stats subcommand; skips '#' metadata lines.
inline std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ','))
            header.push_back(cell);
        break;
    }
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column)
            col = i;
    if (col == header.size())
        throw std::runtime_error("column '" + column + "' not found in '" + path + "'");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t i = 0;
        std::string wanted;
        while (std::getline(ls, cell, ',')) {
            if (i++ == col)
                wanted = cell;
        }
        if (wanted.empty())
            throw std::runtime_error("row in '" + path + "' is missing column '" + column + "'");
        values.push_back(std::stod(wanted));
    }
    if (values.empty())
        throw std::runtime_error("no data rows in '" + path + "'");
    return values;
}

} // namespace cocsp
