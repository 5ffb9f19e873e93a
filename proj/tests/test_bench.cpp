#include <doctest.h>

#include <sstream>

#include "cocsp/bench.hpp"
#include "cocsp/generators.hpp"

using namespace cocsp;

namespace {

Relation neq(int d) {
    Relation r;
    r.semantics = RelationSemantics::conflicts;
    for (int v = 0; v < d; ++v)
        r.tuples.emplace_back(v, v);
    return r;
}

CspInstance two_color_triangle() {
    std::vector<Domain> doms{{0, 1}, {0, 1}, {0, 1}};
    return CspInstance("triangle2", doms,
                       {{0, 1, neq(2)}, {1, 2, neq(2)}, {0, 2, neq(2)}});
}

// The deterministic CSV prefix: run, outcome, n, wipeouts columns only.
std::string stable_csv_prefix(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            out << line << "\n";
            continue;
        }
        int commas = 0;
        std::string kept;
        for (char c : line) {
            if (c == ',' && ++commas == 4)
                break;
            kept.push_back(c);
        }
        out << kept << "\n";
    }
    return out.str();
}

} // namespace

TEST_CASE("run_experiment: one run on a satisfiable instance") {
    CspInstance inst = gen_model_d({6, 3, 6, 0.2, 4});
    MethodConfig method;
    method.method = Method::plain_mac;
    method.heuristic = Heuristic::dom_wdeg;
    RunConfig cfg;
    cfg.runs = 1;
    cfg.base_seed = 3;
    const auto records = run_experiment(inst, method, cfg);
    REQUIRE(records.size() == 1);
    CHECK(records[0].outcome == Outcome::sat);
    CHECK(records[0].total_seconds >= records[0].search_seconds);
}

TEST_CASE("run_experiment: identical configs differ only in wall-clock fields") {
    CspInstance inst = gen_model_d({8, 3, 14, 0.5, 6});
    for (Method m : {Method::plain_mac, Method::coevo_mac, Method::rndi_mac, Method::hc_mac}) {
        MethodConfig method;
        method.method = m;
        method.coevo.generations = 3;
        method.rndi.restarts = 3;
        method.hc.iterations_total = 20;
        RunConfig cfg;
        cfg.runs = 6;
        cfg.base_seed = 17;
        const auto a = run_experiment(inst, method, cfg);
        const auto b = run_experiment(inst, method, cfg);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].run == b[i].run);
            CHECK(a[i].nodes == b[i].nodes);
            CHECK(a[i].wipeouts == b[i].wipeouts);
            CHECK(a[i].outcome == b[i].outcome);
        }
    }
}

TEST_CASE("run_experiment: lex on the 2-color triangle is constant across runs") {
    CspInstance inst = two_color_triangle();
    MethodConfig method;
    method.method = Method::plain_mac;
    method.heuristic = Heuristic::lex;
    RunConfig cfg;
    cfg.runs = 50;
    cfg.base_seed = 1;
    const auto records = run_experiment(inst, method, cfg);
    REQUIRE(records.size() == 50);
    for (const RunRecord& r : records) {
        CHECK(r.outcome == Outcome::unsat);
        CHECK(r.nodes == records[0].nodes);
    }
}

TEST_CASE("run_experiment: parallel jobs produce the same records") {
    CspInstance inst = gen_model_d({8, 3, 13, 0.5, 8});
    MethodConfig method;
    method.method = Method::rndi_mac;
    method.rndi.restarts = 4;
    RunConfig serial;
    serial.runs = 8;
    serial.base_seed = 5;
    RunConfig parallel = serial;
    parallel.jobs = 4;
    const auto a = run_experiment(inst, method, serial);
    const auto b = run_experiment(inst, method, parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].run == b[i].run);
        CHECK(a[i].nodes == b[i].nodes);
        CHECK(a[i].outcome == b[i].outcome);
    }
}

TEST_CASE("summarize: single method has means but no comparisons") {
    CspInstance inst = two_color_triangle();
    MethodConfig method;
    RunConfig cfg;
    cfg.runs = 3;
    const auto records = run_experiment(inst, method, cfg);
    const Summary s = summarize({{method.label(), records}});
    REQUIRE(s.methods.size() == 1);
    CHECK(s.comparisons.empty());
    CHECK(s.methods[0].mean_n == doctest::Approx(static_cast<double>(records[0].nodes)));
}

TEST_CASE("summarize: identical record sets compare as equal") {
    std::vector<RunRecord> records;
    for (int i = 0; i < 10; ++i) {
        RunRecord r;
        r.run = i;
        r.nodes = 42;
        r.total_seconds = 0.5;
        records.push_back(r);
    }
    const Summary s = summarize({{"a", records}, {"b", records}});
    REQUIRE(s.comparisons.size() == 2); // metrics t and n
    for (const ComparisonResult& c : s.comparisons) {
        CHECK(c.a_measure == doctest::Approx(0.5));
        CHECK_FALSE(c.significant);
        CHECK(c.p_value == doctest::Approx(1.0));
    }
}

TEST_CASE("summarize: constant shifted samples are significant with A=0") {
    std::vector<RunRecord> low, high;
    for (int i = 0; i < 50; ++i) {
        RunRecord a;
        a.run = i;
        a.nodes = 1;
        a.total_seconds = 1.0;
        low.push_back(a);
        RunRecord b;
        b.run = i;
        b.nodes = 2;
        b.total_seconds = 2.0;
        high.push_back(b);
    }
    const Summary s = summarize({{"low", low}, {"high", high}});
    for (const ComparisonResult& c : s.comparisons) {
        CHECK(c.a_measure == doctest::Approx(0.0));
        CHECK(c.significant);
    }
    const std::string table = summary_table(s);
    CHECK(table.find("(*)") != std::string::npos);
}

TEST_CASE("csv: stable columns are byte-identical across reruns") {
    CspInstance inst = gen_model_d({8, 3, 12, 0.5, 9});
    MethodConfig method;
    method.method = Method::hc_mac;
    method.hc.iterations_total = 25;
    RunConfig cfg;
    cfg.runs = 5;
    cfg.base_seed = 2;
    const std::string csv1 = runs_csv(inst, method.label(), cfg, run_experiment(inst, method, cfg));
    const std::string csv2 = runs_csv(inst, method.label(), cfg, run_experiment(inst, method, cfg));
    CHECK(stable_csv_prefix(csv1) == stable_csv_prefix(csv2));
    CHECK(csv1.find("# instance=" + inst.name()) != std::string::npos);
    CHECK(csv1.find("base_seed=2") != std::string::npos);
    CHECK(csv1.find("run,outcome,n,wipeouts,learn_seconds,search_seconds,t") != std::string::npos);
}

TEST_CASE("csv: comparison file carries all comparison columns") {
    std::vector<RunRecord> a(4), b(4);
    for (int i = 0; i < 4; ++i) {
        a[static_cast<std::size_t>(i)].nodes = static_cast<std::uint64_t>(10 + i);
        b[static_cast<std::size_t>(i)].nodes = static_cast<std::uint64_t>(20 + i);
    }
    const Summary s = summarize({{"first", a}, {"second", b}});
    const std::string csv = comparison_csv(s);
    CHECK(csv.find("metric,first,second,mean_first,mean_second,u,p,a_measure,significant") == 0);
    CHECK(csv.find("n,first,second,") != std::string::npos);
}
