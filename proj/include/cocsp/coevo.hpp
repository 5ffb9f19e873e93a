#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cocsp/csp.hpp"
#include "cocsp/propagate.hpp"
#include "cocsp/rng.hpp"

namespace cocsp {

// Competitive coevolution between a population of candidate solutions
// (bit-string chromosomes) and the static population of constraints.
// Each encounter scores +1/-1 in bounded histories on both sides; after the
// final generation the constraint fitness values, shifted to a floor of 1,
// become the constraint weights.

// Per-variable bit fields of width max(1, ceil(log2 d)); a field decodes to
// the domain value at (field mod d).
struct ChromosomeLayout {
    std::vector<int> offset;
    std::vector<int> width;
    int total_bits = 0;

    static ChromosomeLayout for_instance(const CspInstance& inst) {
        ChromosomeLayout layout;
        layout.offset.reserve(static_cast<std::size_t>(inst.num_vars()));
        layout.width.reserve(static_cast<std::size_t>(inst.num_vars()));
        for (VarId v = 0; v < inst.num_vars(); ++v) {
            const auto d = static_cast<unsigned>(inst.domain(v).size());
            const int w = std::max(1, static_cast<int>(std::bit_width(d - 1)));
            layout.offset.push_back(layout.total_bits);
            layout.width.push_back(w);
            layout.total_bits += w;
        }
        return layout;
    }
};

struct Chromosome {
    std::vector<std::uint8_t> bits; // one 0/1 per entry, field MSB first
};

inline Chromosome random_chromosome(const ChromosomeLayout& layout, Rng& rng) {
    Chromosome ch;
    ch.bits.resize(static_cast<std::size_t>(layout.total_bits));
    for (auto& b : ch.bits)
        b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    return ch;
}

// Ring buffer of +-1 encounter scores; fitness is their sum.
class EncounterHistory {
public:
    explicit EncounterHistory(int capacity = 0) : capacity_(capacity) {}

    void append(int score) {
        if (capacity_ == 0)
            return;
        if (static_cast<int>(buf_.size()) < capacity_) {
            buf_.push_back(static_cast<std::int8_t>(score));
            sum_ += score;
        } else {
            sum_ -= buf_[static_cast<std::size_t>(head_)];
            buf_[static_cast<std::size_t>(head_)] = static_cast<std::int8_t>(score);
            sum_ += score;
            head_ = (head_ + 1) % capacity_;
        }
    }

    int fitness() const { return sum_; }
    int size() const { return static_cast<int>(buf_.size()); }
    int capacity() const { return capacity_; }

private:
    int capacity_;
    int head_ = 0;
    int sum_ = 0;
    std::vector<std::int8_t> buf_;
};

struct SolutionIndividual {
    Chromosome chromosome;
    EncounterHistory history;
};

struct CoevoParams {
    int pop_size = 50;
    int history_len = 10;
    int encounters_per_gen = 20;
    double crossover_rate = 0.9;
    double mutation_rate = 0.01;
    double ranking_bias = 2.0;
    int tournament_size = 2;
    int generations = 10;
    std::uint64_t seed = 1;

    void validate() const {
        if (pop_size < 1 || history_len < 1 || encounters_per_gen < 0 || tournament_size < 1 ||
            generations < 0)
            throw std::invalid_argument("coevo params: counts out of range");
        if (crossover_rate < 0.0 || crossover_rate > 1.0 || mutation_rate < 0.0 ||
            mutation_rate > 1.0)
            throw std::invalid_argument("coevo params: rates must lie in [0,1]");
        if (ranking_bias < 1.0 || ranking_bias > 2.0)
            throw std::invalid_argument("coevo params: ranking bias must lie in [1,2]");
    }
};

struct CoevoState {
    ChromosomeLayout layout;
    std::vector<SolutionIndividual> solutions;
    std::vector<EncounterHistory> constraint_histories;
    long generation = 0;
};

// Value a chromosome assigns to one variable.
inline Value decode_value(const ChromosomeLayout& layout, const Chromosome& ch,
                          const CspInstance& inst, VarId v) {
    const int off = layout.offset[static_cast<std::size_t>(v)];
    const int w = layout.width[static_cast<std::size_t>(v)];
    std::uint64_t k = 0;
    for (int i = 0; i < w; ++i)
        k = (k << 1) | ch.bits[static_cast<std::size_t>(off + i)];
    const Domain& d = inst.domain(v);
    return d[static_cast<std::size_t>(k % d.size())];
}

inline Assignment decode(const ChromosomeLayout& layout, const Chromosome& ch,
                         const CspInstance& inst) {
    if (layout.total_bits != static_cast<int>(ch.bits.size()))
        throw std::invalid_argument("decode: chromosome length does not match the layout");
    Assignment a(inst.num_vars());
    for (VarId v = 0; v < inst.num_vars(); ++v)
        a.bind(v, decode_value(layout, ch, inst, v));
    return a;
}

struct EncounterScores {
    int sol_score;
    int cons_score;
};

// One solution-vs-constraint evaluation: the solution wins iff its decoded
// values satisfy the constraint. Both histories record the outcome.
inline EncounterScores encounter(const ChromosomeLayout& layout, SolutionIndividual& sol,
                                 EncounterHistory& cons_history, const Constraint& c,
                                 const CspInstance& inst) {
    const Value xv = decode_value(layout, sol.chromosome, inst, c.x);
    const Value yv = decode_value(layout, sol.chromosome, inst, c.y);
    const bool satisfied = inst.check(c, xv, yv);
    const EncounterScores scores{satisfied ? 1 : -1, satisfied ? -1 : 1};
    sol.history.append(scores.sol_score);
    cons_history.append(scores.cons_score);
    return scores;
}

// k uniform draws with replacement; highest history fitness wins, ties
// broken uniformly among the tied draws.
inline std::size_t tournament_select(const std::vector<SolutionIndividual>& pop, int k, Rng& rng) {
    if (pop.empty())
        throw std::invalid_argument("tournament_select: empty population");
    std::vector<std::size_t> drawn(static_cast<std::size_t>(k));
    int best = std::numeric_limits<int>::min();
    for (auto& idx : drawn) {
        idx = static_cast<std::size_t>(rng.below(pop.size()));
        best = std::max(best, pop[idx].history.fitness());
    }
    std::vector<std::size_t> tied;
    for (std::size_t idx : drawn)
        if (pop[idx].history.fitness() == best)
            tied.push_back(idx);
    return tied[static_cast<std::size_t>(rng.below(tied.size()))];
}

// Linear ranking over constraint fitness: rank 1 is the worst constraint,
// rank N the best (fitness ties ranked by ascending id), and rank r is
// selected with probability (2-bias)/N + 2(r-1)(bias-1)/(N(N-1)).
inline ConstraintId linear_ranking_select(const std::vector<EncounterHistory>& histories,
                                          double bias, Rng& rng) {
    const std::size_t n = histories.size();
    if (n == 0)
        throw std::invalid_argument("linear_ranking_select: no constraints");
    if (n == 1)
        return 0;
    std::vector<ConstraintId> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::stable_sort(by_rank.begin(), by_rank.end(), [&](ConstraintId a, ConstraintId b) {
        return histories[static_cast<std::size_t>(a)].fitness() <
               histories[static_cast<std::size_t>(b)].fitness();
    });
    const double nd = static_cast<double>(n);
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t r = 1; r <= n; ++r) {
        acc += (2.0 - bias) / nd +
               2.0 * (static_cast<double>(r) - 1.0) * (bias - 1.0) / (nd * (nd - 1.0));
        if (u < acc)
            return by_rank[r - 1];
    }
    return by_rank[n - 1]; // floating-point dust
}

inline Chromosome crossover_at(const Chromosome& a, const Chromosome& b, int cut) {
    Chromosome child = a;
    for (std::size_t i = static_cast<std::size_t>(cut); i < b.bits.size(); ++i)
        child.bits[i] = b.bits[i];
    return child;
}

// With probability `rate`, one offspring from a uniform cut in [1, L-1];
// otherwise a copy of the first parent.
inline Chromosome one_point_crossover(const Chromosome& a, const Chromosome& b, double rate,
                                      Rng& rng) {
    if (a.bits.size() != b.bits.size())
        throw std::invalid_argument("one_point_crossover: parent layouts differ");
    const std::size_t len = a.bits.size();
    if (len < 2)
        return a;
    if (rng.uniform01() >= rate)
        return a;
    const int cut = 1 + static_cast<int>(rng.below(len - 1));
    return crossover_at(a, b, cut);
}

inline Chromosome bit_mutation(const Chromosome& ch, double rate, Rng& rng) {
    Chromosome out = ch;
    for (auto& bit : out.bits)
        if (rng.uniform01() < rate)
            bit ^= 1u;
    return out;
}

inline CoevoState init_coevo_state(const CspInstance& inst, const CoevoParams& params, Rng& rng) {
    CoevoState state;
    state.layout = ChromosomeLayout::for_instance(inst);
    state.solutions.reserve(static_cast<std::size_t>(params.pop_size));
    for (int i = 0; i < params.pop_size; ++i)
        state.solutions.push_back(
            {random_chromosome(state.layout, rng), EncounterHistory(params.history_len)});
    state.constraint_histories.assign(static_cast<std::size_t>(inst.num_constraints()),
                                      EncounterHistory(params.history_len));
    return state;
}

// One steady-state generation: scored encounters between selected solutions
// and constraints, then one offspring (tournament parents, crossover,
// mutation) evaluated by history_len fresh encounters and inserted over the
// worst incumbent.
inline void run_generation(CoevoState& state, const CoevoParams& params, const CspInstance& inst,
                           Rng& rng) {
    const bool has_constraints = inst.num_constraints() > 0;
    if (has_constraints) {
        for (int i = 0; i < params.encounters_per_gen; ++i) {
            const std::size_t s = tournament_select(state.solutions, params.tournament_size, rng);
            const ConstraintId c =
                linear_ranking_select(state.constraint_histories, params.ranking_bias, rng);
            encounter(state.layout, state.solutions[s],
                      state.constraint_histories[static_cast<std::size_t>(c)], inst.constraint(c),
                      inst);
        }
    }

    const std::size_t p1 = tournament_select(state.solutions, params.tournament_size, rng);
    const std::size_t p2 = tournament_select(state.solutions, params.tournament_size, rng);
    Chromosome child_bits =
        one_point_crossover(state.solutions[p1].chromosome, state.solutions[p2].chromosome,
                            params.crossover_rate, rng);
    child_bits = bit_mutation(child_bits, params.mutation_rate, rng);

    SolutionIndividual child{std::move(child_bits), EncounterHistory(params.history_len)};
    if (has_constraints) {
        for (int i = 0; i < params.history_len; ++i) {
            const ConstraintId c =
                linear_ranking_select(state.constraint_histories, params.ranking_bias, rng);
            encounter(state.layout, child, state.constraint_histories[static_cast<std::size_t>(c)],
                      inst.constraint(c), inst);
        }
    }

    std::size_t worst = 0;
    for (std::size_t i = 1; i < state.solutions.size(); ++i)
        if (state.solutions[i].history.fitness() <
            state.solutions[worst].history.fitness())
            worst = i;
    state.solutions[worst] = std::move(child);
    ++state.generation;
}

inline CoevoState run_coevo(const CspInstance& inst, const CoevoParams& params) {
    params.validate();
    Rng rng(params.seed);
    CoevoState state = init_coevo_state(inst, params, rng);
    for (int g = 0; g < params.generations; ++g)
        run_generation(state, params, inst, rng);
    return state;
}

// Constraint fitness shifted so the minimum weight is exactly 1; the
// solution population is discarded.
inline ConstraintWeights weights_from_state(const CoevoState& state) {
    ConstraintWeights weights;
    if (state.constraint_histories.empty())
        return weights;
    weights.w.reserve(state.constraint_histories.size());
    int min_fit = std::numeric_limits<int>::max();
    for (const EncounterHistory& h : state.constraint_histories)
        min_fit = std::min(min_fit, h.fitness());
    for (const EncounterHistory& h : state.constraint_histories)
        weights.w.push_back(static_cast<std::int64_t>(h.fitness()) - min_fit + 1);
    return weights;
}

inline ConstraintWeights learn_weights(const CspInstance& inst, const CoevoParams& params) {
    return weights_from_state(run_coevo(inst, params));
}

} // namespace cocsp
