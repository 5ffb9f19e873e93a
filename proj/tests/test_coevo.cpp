#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "cocsp/coevo.hpp"
#include "cocsp/generators.hpp"

using namespace cocsp;

namespace {

CspInstance single_var_instance(int d) {
    Domain dom;
    for (int v = 0; v < d; ++v)
        dom.push_back(10 * v); // values 0, 10, 20, ... to separate value from index
    return CspInstance("one", {dom}, {});
}

Chromosome bits_of(std::initializer_list<int> bits) {
    Chromosome ch;
    for (int b : bits)
        ch.bits.push_back(static_cast<std::uint8_t>(b));
    return ch;
}

} // namespace

TEST_CASE("layout: field widths are max(1, ceil(log2 d))") {
    std::vector<Domain> doms{{0}, {0, 1}, {0, 1, 2}, {0, 1, 2, 3}, {0, 1, 2, 3, 4}};
    CspInstance inst("t", doms, {});
    const ChromosomeLayout layout = ChromosomeLayout::for_instance(inst);
    CHECK(layout.width == std::vector<int>{1, 1, 2, 2, 3});
    CHECK(layout.total_bits == 9);
}

TEST_CASE("decode: plain binary read, most significant bit first") {
    CspInstance inst = single_var_instance(4);
    const ChromosomeLayout layout = ChromosomeLayout::for_instance(inst);
    CHECK(decode(layout, bits_of({1, 0}), inst).value(0) == 20); // index 2
    CHECK(decode(layout, bits_of({0, 1}), inst).value(0) == 10);
}

TEST_CASE("decode: out-of-range fields wrap modulo the domain size") {
    CspInstance inst = single_var_instance(3);
    const ChromosomeLayout layout = ChromosomeLayout::for_instance(inst);
    CHECK(decode(layout, bits_of({1, 1}), inst).value(0) == 0); // 3 mod 3 = 0
}

TEST_CASE("decode: the all-zero chromosome binds every smallest value") {
    CspInstance inst = gen_model_d({6, 5, 8, 0.2, 3});
    const ChromosomeLayout layout = ChromosomeLayout::for_instance(inst);
    Chromosome zeros;
    zeros.bits.assign(static_cast<std::size_t>(layout.total_bits), 0);
    const Assignment a = decode(layout, zeros, inst);
    for (VarId v = 0; v < inst.num_vars(); ++v)
        CHECK(*a.value(v) == inst.domain(v).front());
}

TEST_CASE("decode validates the chromosome length") {
    CspInstance inst = single_var_instance(4);
    const ChromosomeLayout layout = ChromosomeLayout::for_instance(inst);
    CHECK_THROWS_AS(decode(layout, bits_of({1}), inst), std::invalid_argument);
}

TEST_CASE("encounter: zero-sum scores in both directions") {
    std::vector<Domain> doms{{0, 1}, {0, 1}};
    Relation all;
    all.semantics = RelationSemantics::conflicts; // empty conflicts = allow all
    Relation none;
    none.semantics = RelationSemantics::supports; // empty supports = forbid all
    CspInstance friendly("t", doms, {{0, 1, all}});
    CspInstance hostile("t", doms, {{0, 1, none}});
    const ChromosomeLayout layout = ChromosomeLayout::for_instance(friendly);

    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        SolutionIndividual sol{random_chromosome(layout, rng), EncounterHistory(4)};
        EncounterHistory ch(4);
        const EncounterScores win =
            encounter(layout, sol, ch, friendly.constraint(0), friendly);
        CHECK(win.sol_score == 1);
        CHECK(win.cons_score == -1);
        CHECK(win.sol_score + win.cons_score == 0);

        const EncounterScores loss = encounter(layout, sol, ch, hostile.constraint(0), hostile);
        CHECK(loss.sol_score == -1);
        CHECK(loss.cons_score == 1); // an unsatisfiable relation always wins
        CHECK(sol.history.size() == 2);
        CHECK(ch.size() == 2);
    }
}

TEST_CASE("history: ring buffer evicts the oldest score") {
    EncounterHistory h(3);
    h.append(1);
    h.append(1);
    h.append(1);
    CHECK(h.fitness() == 3);
    h.append(-1); // evicts one +1
    CHECK(h.fitness() == 1);
    h.append(-1);
    h.append(-1);
    CHECK(h.fitness() == -3);
    CHECK(h.size() == 3);
}

TEST_CASE("tournament: k=1 is uniform (chi-square)") {
    std::vector<SolutionIndividual> pop;
    for (int i = 0; i < 8; ++i)
        pop.push_back({Chromosome{}, EncounterHistory(4)});
    Rng rng(11);
    const int draws = 10000;
    std::vector<int> counts(pop.size(), 0);
    for (int i = 0; i < draws; ++i)
        ++counts[tournament_select(pop, 1, rng)];
    double chi2 = 0.0;
    const double expected = static_cast<double>(draws) / static_cast<double>(pop.size());
    for (int c : counts)
        chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 18.48); // chi-square(7 dof) at p = 0.01
}

TEST_CASE("tournament: equal fitness stays uniform, higher fitness dominates") {
    std::vector<SolutionIndividual> pop;
    for (int i = 0; i < 5; ++i)
        pop.push_back({Chromosome{}, EncounterHistory(4)});
    Rng rng(23);
    const int draws = 10000;
    std::vector<int> counts(pop.size(), 0);
    for (int i = 0; i < draws; ++i)
        ++counts[tournament_select(pop, 2, rng)];
    double chi2 = 0.0;
    const double expected = static_cast<double>(draws) / static_cast<double>(pop.size());
    for (int c : counts)
        chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 13.28); // chi-square(4 dof) at p = 0.01

    // fitness (-10, +10): the better one wins unless both draws hit index 0.
    std::vector<SolutionIndividual> two;
    two.push_back({Chromosome{}, EncounterHistory(10)});
    two.push_back({Chromosome{}, EncounterHistory(10)});
    for (int i = 0; i < 10; ++i) {
        two[0].history.append(-1);
        two[1].history.append(1);
    }
    int best_wins = 0;
    for (int i = 0; i < draws; ++i)
        best_wins += tournament_select(two, 2, rng) == 1;
    CHECK(best_wins > draws * 0.70); // expected 3/4
    CHECK(best_wins < draws * 0.80);
}

TEST_CASE("linear ranking: bias 1 collapses to uniform") {
    std::vector<EncounterHistory> histories(6, EncounterHistory(4));
    Rng rng(31);
    const int draws = 12000;
    std::vector<int> counts(histories.size(), 0);
    for (int i = 0; i < draws; ++i)
        ++counts[static_cast<std::size_t>(linear_ranking_select(histories, 1.0, rng))];
    const double expected = static_cast<double>(draws) / 6.0;
    for (int c : counts)
        CHECK(std::abs(c - expected) < 5.0 * std::sqrt(expected));
}

TEST_CASE("linear ranking: bias 2 with N=4 gives p = (0, 1/6, 2/6, 3/6)") {
    // Distinct fitness so ranks are unambiguous: ids 0..3 worst to best.
    std::vector<EncounterHistory> histories(4, EncounterHistory(8));
    for (int id = 0; id < 4; ++id)
        for (int k = 0; k < id; ++k)
            histories[static_cast<std::size_t>(id)].append(1);
    Rng rng(41);
    const int draws = 100000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < draws; ++i)
        ++counts[static_cast<std::size_t>(linear_ranking_select(histories, 2.0, rng))];
    const double p_expected[] = {0.0, 1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0};
    for (int id = 0; id < 4; ++id) {
        const double p_hat = counts[static_cast<std::size_t>(id)] / static_cast<double>(draws);
        CHECK(std::abs(p_hat - p_expected[id]) < 0.01);
    }
}

TEST_CASE("linear ranking: single constraint is always chosen; ties rank by id") {
    std::vector<EncounterHistory> one(1, EncounterHistory(4));
    Rng rng(3);
    for (int i = 0; i < 5; ++i)
        CHECK(linear_ranking_select(one, 2.0, rng) == 0);

    // Two tied constraints under bias 2: rank 1 gets p = 0, so the
    // smaller id (worst rank on tie) is never selected.
    std::vector<EncounterHistory> tied(2, EncounterHistory(4));
    for (int i = 0; i < 2000; ++i)
        CHECK(linear_ranking_select(tied, 2.0, rng) == 1);
}

TEST_CASE("crossover: prefix from the first parent, suffix from the second") {
    const Chromosome a = bits_of({0, 0, 0, 0});
    const Chromosome b = bits_of({1, 1, 1, 1});
    CHECK(crossover_at(a, b, 2).bits == bits_of({0, 0, 1, 1}).bits);
    CHECK(crossover_at(a, b, 1).bits == bits_of({0, 1, 1, 1}).bits);
    CHECK(crossover_at(a, b, 3).bits == bits_of({0, 0, 0, 1}).bits);
}

TEST_CASE("crossover: rate 0 copies the first parent; identical parents are a fixpoint") {
    Rng rng(17);
    const Chromosome a = bits_of({0, 1, 0, 1, 1});
    const Chromosome b = bits_of({1, 0, 1, 0, 0});
    CHECK(one_point_crossover(a, b, 0.0, rng).bits == a.bits);
    for (int i = 0; i < 20; ++i)
        CHECK(one_point_crossover(a, a, 1.0, rng).bits == a.bits);
    // rate 1 always cuts somewhere in [1, L-1]
    for (int i = 0; i < 50; ++i) {
        const Chromosome child = one_point_crossover(a, b, 1.0, rng);
        bool matches_some_cut = false;
        for (int cut = 1; cut < 5; ++cut)
            matches_some_cut |= child.bits == crossover_at(a, b, cut).bits;
        CHECK(matches_some_cut);
    }
    CHECK_THROWS_AS(one_point_crossover(a, bits_of({1}), 1.0, rng), std::invalid_argument);
}

TEST_CASE("mutation: rate 0 is identity, rate 1 is complement, rate 0.5 concentrates") {
    Rng rng(29);
    const Chromosome a = bits_of({0, 1, 1, 0, 1});
    CHECK(bit_mutation(a, 0.0, rng).bits == a.bits);
    const Chromosome flipped = bit_mutation(a, 1.0, rng);
    for (std::size_t i = 0; i < a.bits.size(); ++i)
        CHECK(flipped.bits[i] == (a.bits[i] ^ 1));

    Chromosome big;
    big.bits.assign(10000, 0);
    const Chromosome mutated = bit_mutation(big, 0.5, rng);
    int flips = 0;
    for (auto b : mutated.bits)
        flips += b;
    CHECK(flips > 4800); // binomial(10000, 0.5) within +-0.02
    CHECK(flips < 5200);
}

TEST_CASE("run_generation: zero encounters still inserts one offspring") {
    CspInstance inst = gen_model_d({5, 4, 6, 0.3, 2});
    CoevoParams params;
    params.pop_size = 6;
    params.encounters_per_gen = 0;
    params.generations = 1;
    params.seed = 8;
    Rng rng(params.seed);
    CoevoState state = init_coevo_state(inst, params, rng);
    run_generation(state, params, inst, rng);
    CHECK(state.generation == 1);
    CHECK(state.solutions.size() == 6);
    // The offspring was evaluated: history_len encounters happened.
    int touched = 0;
    for (const auto& h : state.constraint_histories)
        touched += h.size();
    CHECK(touched == params.history_len);
}

TEST_CASE("run_generation: cloning operators keep the chromosome multiset") {
    std::vector<Domain> doms{{0, 1}, {0, 1}, {0, 1}};
    Relation allow_all;
    allow_all.semantics = RelationSemantics::conflicts;
    CspInstance inst("t", doms, {{0, 1, allow_all}});
    CoevoParams params;
    params.pop_size = 5;
    params.crossover_rate = 0.0;
    params.mutation_rate = 0.0;
    params.seed = 13;
    Rng rng(params.seed);
    CoevoState state = init_coevo_state(inst, params, rng);
    for (auto& sol : state.solutions)
        sol.chromosome = state.solutions.front().chromosome; // make them identical
    const auto reference = state.solutions.front().chromosome.bits;
    for (int g = 0; g < 5; ++g)
        run_generation(state, params, inst, rng);
    CHECK(state.solutions.size() == 5);
    for (const auto& sol : state.solutions)
        CHECK(sol.chromosome.bits == reference);
}

TEST_CASE("run_generation keeps every fitness within [-H, +H]") {
    CspInstance inst = gen_model_d({6, 3, 8, 0.5, 5});
    CoevoParams params;
    params.pop_size = 10;
    params.history_len = 4;
    params.seed = 21;
    Rng rng(params.seed);
    CoevoState state = init_coevo_state(inst, params, rng);
    for (int g = 0; g < 20; ++g) {
        run_generation(state, params, inst, rng);
        for (const auto& sol : state.solutions) {
            CHECK(sol.history.fitness() >= -params.history_len);
            CHECK(sol.history.fitness() <= params.history_len);
        }
        for (const auto& h : state.constraint_histories) {
            CHECK(h.fitness() >= -params.history_len);
            CHECK(h.fitness() <= params.history_len);
        }
    }
}

TEST_CASE("learn_weights on a constraint-free instance returns empty weights") {
    CspInstance inst("free", {{0, 1}, {0, 1, 2}}, {});
    CoevoParams params;
    params.generations = 5;
    params.seed = 3;
    const ConstraintWeights w = learn_weights(inst, params);
    CHECK(w.w.empty());
}

TEST_CASE("learn_weights: zero generations gives unit weights") {
    CspInstance inst = gen_model_d({5, 3, 6, 0.4, 9});
    CoevoParams params;
    params.generations = 0;
    params.seed = 2;
    const ConstraintWeights w = learn_weights(inst, params);
    for (std::int64_t x : w.w)
        CHECK(x == 1);
}

TEST_CASE("learn_weights: equal seeds give identical weights, floor is exactly 1") {
    CspInstance inst = gen_model_d({7, 4, 12, 0.4, 10});
    CoevoParams params;
    params.generations = 8;
    params.seed = 77;
    const ConstraintWeights a = learn_weights(inst, params);
    const ConstraintWeights b = learn_weights(inst, params);
    CHECK(a.w == b.w);
    std::int64_t min_w = a.w.front();
    for (std::int64_t x : a.w)
        min_w = std::min(min_w, x);
    CHECK(min_w == 1);
}

TEST_CASE("learn_weights preserves the fitness order of constraints") {
    CspInstance inst = gen_model_d({7, 3, 10, 0.6, 15});
    CoevoParams params;
    params.generations = 10;
    params.seed = 5;
    const CoevoState state = run_coevo(inst, params);
    const ConstraintWeights w = weights_from_state(state);
    for (std::size_t i = 0; i < w.w.size(); ++i)
        for (std::size_t j = 0; j < w.w.size(); ++j) {
            const int fi = state.constraint_histories[i].fitness();
            const int fj = state.constraint_histories[j].fitness();
            CHECK((fi > fj) == (w.w[i] > w.w[j]));
        }
}

TEST_CASE("learn_weights singles out an unsatisfiable constraint") {
    // One empty-supports constraint among loose ones.
    std::vector<Domain> doms(8, Domain{0, 1, 2, 3, 4});
    std::vector<ConstraintSpec> specs;
    int k = 0;
    for (VarId i = 0; i < 8 && specs.size() < 22; ++i)
        for (VarId j = i + 1; j < 8 && specs.size() < 22; ++j, ++k) {
            ConstraintSpec s;
            s.x = i;
            s.y = j;
            if (k == 7) {
                s.relation.semantics = RelationSemantics::supports; // empty: unsatisfiable
            } else {
                s.relation.semantics = RelationSemantics::conflicts;
                s.relation.tuples = {{k % 5, (k + 2) % 5}}; // 1/25 forbidden: loose
            }
            specs.push_back(std::move(s));
        }
    CspInstance inst("bottleneck", doms, specs);
    CoevoParams params;
    params.generations = 15;
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        params.seed = seed;
        const ConstraintWeights w = learn_weights(inst, params);
        bool strictly_max = true;
        for (std::size_t c = 0; c < w.w.size(); ++c)
            if (c != 7 && w.w[c] >= w.w[7])
                strictly_max = false;
        wins += strictly_max;
    }
    CHECK(wins >= 9);
}
