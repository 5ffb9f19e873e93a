#include <doctest.h>

#include <numeric>

#include "cocsp/csp.hpp"
#include "cocsp/generators.hpp"
#include "cocsp/search.hpp"
#include "oracles.hpp"

using namespace cocsp;

namespace {

Relation neq(int d) {
    Relation r;
    r.semantics = RelationSemantics::conflicts;
    for (int v = 0; v < d; ++v)
        r.tuples.emplace_back(v, v);
    return r;
}

CspInstance triangle(int d) {
    std::vector<Domain> doms(3);
    for (auto& dom : doms)
        for (int v = 0; v < d; ++v)
            dom.push_back(v);
    return CspInstance("triangle", doms,
                       {{0, 1, neq(d)}, {1, 2, neq(d)}, {0, 2, neq(d)}});
}

std::int64_t weight_excess(const ConstraintWeights& w) {
    std::int64_t sum = 0;
    for (std::int64_t x : w.w)
        sum += x - 1;
    return sum;
}

} // namespace

TEST_CASE("mac finds a 3-coloring of the triangle") {
    CspInstance inst = triangle(3);
    ConstraintWeights w = unit_weights(inst);
    const SearchStats stats = mac_search(inst, Heuristic::lex, w, {}, 1);
    REQUIRE(stats.outcome == Outcome::sat);
    REQUIRE(stats.solution.has_value());
    CHECK(is_solution(inst, *stats.solution));
}

TEST_CASE("mac proves the 2-color triangle unsatisfiable, weights match wipeouts") {
    CspInstance inst = triangle(2);
    for (Heuristic h : all_heuristics) {
        ConstraintWeights w = unit_weights(inst);
        const SearchStats stats = mac_search(inst, h, w, {}, 5);
        CHECK(stats.outcome == Outcome::unsat);
        CHECK(weight_excess(w) == static_cast<std::int64_t>(stats.wipeouts));
    }
}

TEST_CASE("node cap of one stops after the first node") {
    CspInstance inst = triangle(2);
    ConstraintWeights w = unit_weights(inst);
    SearchLimits limits;
    limits.node_cap = 1;
    const SearchStats stats = mac_search(inst, Heuristic::lex, w, limits, 1);
    CHECK(stats.outcome == Outcome::node_limit);
    CHECK(stats.nodes == 1);
}

TEST_CASE("mac agrees with brute force on small random instances") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const int n = 2 + static_cast<int>(seed % 6);
        const int d = 2 + static_cast<int>((seed / 2) % 3);
        const int max_e = n * (n - 1) / 2;
        const int e = 1 + static_cast<int>((seed * 13) % static_cast<std::uint64_t>(max_e));
        CspInstance inst = gen_model_d({n, d, e, 0.55, seed});
        const bool expect_sat = oracles::brute_force_satisfiable(inst);
        for (Heuristic h : all_heuristics) {
            ConstraintWeights w = unit_weights(inst);
            const SearchStats stats = mac_search(inst, h, w, {}, seed);
            CHECK(stats.outcome == (expect_sat ? Outcome::sat : Outcome::unsat));
            if (stats.solution)
                CHECK(is_solution(inst, *stats.solution));
            CHECK(weight_excess(w) == static_cast<std::int64_t>(stats.wipeouts));
        }
    }
}

TEST_CASE("mac search is deterministic apart from elapsed time") {
    CspInstance inst = gen_model_d({8, 4, 14, 0.45, 3});
    for (Heuristic h : {Heuristic::random, Heuristic::dom_wdeg}) {
        ConstraintWeights w1 = unit_weights(inst);
        ConstraintWeights w2 = unit_weights(inst);
        const SearchStats a = mac_search(inst, h, w1, {}, 42);
        const SearchStats b = mac_search(inst, h, w2, {}, 42);
        CHECK(a.outcome == b.outcome);
        CHECK(a.nodes == b.nodes);
        CHECK(a.wipeouts == b.wipeouts);
        CHECK(w1.w == w2.w);
        CHECK(a.solution == b.solution);
    }
}

TEST_CASE("select_variable: wdeg with equal weights reduces to ddeg, ties go low") {
    // Triangle constraints in order (0,1), (1,2), (0,2); weights (2, 7, 2)
    // give wdeg sums (4, 9, 9): the tie goes to variable 1.
    CspInstance inst = triangle(3);
    DomainStore store(inst);
    ConstraintWeights w{{2, 7, 2}};
    std::vector<std::uint8_t> assigned(3, 0);
    Rng rng(1);
    CHECK(select_variable(inst, store, w, assigned, Heuristic::wdeg, rng) == 1);

    ConstraintWeights unit = unit_weights(inst);
    // Equal weights: all wdeg equal, smallest index wins; same as ddeg.
    CHECK(select_variable(inst, store, unit, assigned, Heuristic::wdeg, rng) == 0);
    CHECK(select_variable(inst, store, unit, assigned, Heuristic::ddeg, rng) == 0);
}

TEST_CASE("select_variable: dom_wdeg picks the smallest ratio") {
    // Ratios: v0 = 6/20, v1 = 2/4 = 0.5, v2 = 4/16 = 0.25 -> v2.
    std::vector<Domain> doms{{0, 1, 2, 3, 4, 5}, {0, 1}, {0, 1, 2, 3}};
    CspInstance inst("t", doms, {{0, 1, neq(2)}, {0, 2, neq(4)}});
    DomainStore store(inst);
    ConstraintWeights w{{4, 16}};
    std::vector<std::uint8_t> assigned(3, 0);
    Rng rng(1);
    CHECK(select_variable(inst, store, w, assigned, Heuristic::dom_wdeg, rng) == 2);
}

TEST_CASE("select_variable: assigned variables and their constraints drop out") {
    std::vector<Domain> doms{{0, 1}, {0, 1}, {0, 1}};
    CspInstance inst("t", doms, {{0, 1, neq(2)}, {1, 2, neq(2)}});
    DomainStore store(inst);
    ConstraintWeights w{{100, 1}};
    std::vector<std::uint8_t> assigned{1, 0, 0};
    Rng rng(1);
    // v1's only live constraint is (1,2): wdeg 1; v2 also 1; tie -> v1.
    CHECK(select_variable(inst, store, w, assigned, Heuristic::wdeg, rng) == 1);
    std::vector<std::uint8_t> none(3, 0);
    CHECK(select_variable(inst, store, w, none, Heuristic::wdeg, rng) == 1);
}

TEST_CASE("select_variable: scaling the weights never changes the pick") {
    Rng instance_rng(77);
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        CspInstance inst = gen_model_d({7, 4, 12, 0.4, seed});
        ConstraintWeights w = unit_weights(inst);
        for (auto& x : w.w)
            x = 1 + static_cast<std::int64_t>(instance_rng.below(20));
        ConstraintWeights scaled = w;
        for (auto& x : scaled.w)
            x *= 7;
        DomainStore store(inst);
        std::vector<std::uint8_t> assigned(static_cast<std::size_t>(inst.num_vars()), 0);
        assigned[static_cast<std::size_t>(instance_rng.below(inst.num_vars()))] = 1;
        for (Heuristic h : {Heuristic::wdeg, Heuristic::dom_wdeg}) {
            Rng r1(5), r2(5);
            CHECK(select_variable(inst, store, w, assigned, h, r1) ==
                  select_variable(inst, store, scaled, assigned, h, r2));
        }
    }
}

TEST_CASE("select_variable demands an unassigned variable") {
    CspInstance inst = triangle(2);
    DomainStore store(inst);
    ConstraintWeights w = unit_weights(inst);
    std::vector<std::uint8_t> assigned{1, 1, 1};
    Rng rng(1);
    CHECK_THROWS_AS(select_variable(inst, store, w, assigned, Heuristic::lex, rng),
                    std::logic_error);
}

TEST_CASE("static_order_by_wdeg sorts by total incident weight") {
    // Path v0 - v1 - v2 with weights 10 and 1: sums (10, 11, 1).
    std::vector<Domain> doms{{0, 1}, {0, 1}, {0, 1}};
    CspInstance inst("t", doms, {{0, 1, neq(2)}, {1, 2, neq(2)}});
    ConstraintWeights w{{10, 1}};
    CHECK(static_order_by_wdeg(inst, w) == std::vector<VarId>{1, 0, 2});

    ConstraintWeights unit = unit_weights(inst);
    // All weights 1: descending static degree, ties by index.
    CHECK(static_order_by_wdeg(inst, unit) == std::vector<VarId>{1, 0, 2});

    CspInstance lone("t", {{0, 1}}, {});
    ConstraintWeights no_w;
    CHECK(static_order_by_wdeg(lone, no_w) == std::vector<VarId>{0});
}

TEST_CASE("random heuristic draws only from unassigned variables") {
    CspInstance inst = triangle(3);
    DomainStore store(inst);
    ConstraintWeights w = unit_weights(inst);
    std::vector<std::uint8_t> assigned{0, 1, 0};
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        const VarId v = select_variable(inst, store, w, assigned, Heuristic::random, rng);
        CHECK(v != 1);
    }
}
