#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cocsp/csp.hpp"

namespace cocsp {

// Current (pruned) domains during search, held as per-variable bitsets over
// original-domain indices, with a trail of removals for chronological
// backtracking. All hot-path operations work in index space; values are
// translated only at the API boundary.
class DomainStore {
public:
    explicit DomainStore(const CspInstance& inst) : inst_(&inst) {
        const int n = inst.num_vars();
        word_offset_.resize(static_cast<std::size_t>(n));
        nwords_.resize(static_cast<std::size_t>(n));
        count_.resize(static_cast<std::size_t>(n));
        std::size_t total = 0;
        for (VarId v = 0; v < n; ++v) {
            const int d = static_cast<int>(inst.domain(v).size());
            word_offset_[static_cast<std::size_t>(v)] = total;
            nwords_[static_cast<std::size_t>(v)] = (d + 63) / 64;
            count_[static_cast<std::size_t>(v)] = d;
            total += static_cast<std::size_t>(nwords_[static_cast<std::size_t>(v)]);
        }
        words_.assign(total, 0);
        for (VarId v = 0; v < n; ++v) {
            const int d = static_cast<int>(inst.domain(v).size());
            for (int i = 0; i < d; ++i)
                word(v, i / 64) |= 1ull << (i % 64);
        }
    }

    const CspInstance& instance() const { return *inst_; }

    int level() const { return static_cast<int>(level_marks_.size()); }

    void push_level() { level_marks_.push_back(trail_.size()); }

    // Undo all removals made since the matching push_level.
    void pop_level() {
        if (level_marks_.empty())
            throw std::logic_error("pop_level on root level");
        const std::size_t mark = level_marks_.back();
        level_marks_.pop_back();
        while (trail_.size() > mark) {
            const TrailEntry e = trail_.back();
            trail_.pop_back();
            word(e.var, e.idx / 64) |= 1ull << (e.idx % 64);
            ++count_[static_cast<std::size_t>(e.var)];
        }
    }

    void pop_to_root() {
        while (!level_marks_.empty())
            pop_level();
    }

    bool has(VarId v, int idx) const { return (word(v, idx / 64) >> (idx % 64)) & 1u; }

    int count(VarId v) const { return count_[static_cast<std::size_t>(v)]; }

    void remove(VarId v, int idx) {
        word(v, idx / 64) &= ~(1ull << (idx % 64));
        --count_[static_cast<std::size_t>(v)];
        trail_.push_back({v, idx});
    }

    // Fix v to the single index `idx`, trailing every other removal.
    void assign(VarId v, int idx) {
        const int d = static_cast<int>(inst_->domain(v).size());
        for (int i = 0; i < d; ++i)
            if (i != idx && has(v, i))
                remove(v, i);
    }

    // Lowest index still present; v must be non-empty.
    int first_index(VarId v) const {
        const int nw = nwords_[static_cast<std::size_t>(v)];
        for (int w = 0; w < nw; ++w) {
            const std::uint64_t bits = word(v, w);
            if (bits)
                return w * 64 + std::countr_zero(bits);
        }
        throw std::logic_error("first_index on wiped-out domain");
    }

    std::span<const std::uint64_t> words(VarId v) const {
        return {words_.data() + word_offset_[static_cast<std::size_t>(v)],
                static_cast<std::size_t>(nwords_[static_cast<std::size_t>(v)])};
    }

    std::vector<int> current_indices(VarId v) const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(count(v)));
        const int nw = nwords_[static_cast<std::size_t>(v)];
        for (int w = 0; w < nw; ++w) {
            std::uint64_t bits = word(v, w);
            while (bits) {
                out.push_back(w * 64 + std::countr_zero(bits));
                bits &= bits - 1;
            }
        }
        return out;
    }

    std::vector<Value> current_values(VarId v) const {
        std::vector<Value> out;
        const Domain& d = inst_->domain(v);
        for (int idx : current_indices(v))
            out.push_back(d[static_cast<std::size_t>(idx)]);
        return out;
    }

private:
    struct TrailEntry {
        VarId var;
        int idx;
    };

    std::uint64_t& word(VarId v, int w) {
        return words_[word_offset_[static_cast<std::size_t>(v)] + static_cast<std::size_t>(w)];
    }
    const std::uint64_t& word(VarId v, int w) const {
        return words_[word_offset_[static_cast<std::size_t>(v)] + static_cast<std::size_t>(w)];
    }

    const CspInstance* inst_;
    std::vector<std::uint64_t> words_;
    std::vector<std::size_t> word_offset_;
    std::vector<int> nwords_;
    std::vector<int> count_;
    std::vector<TrailEntry> trail_;
    std::vector<std::size_t> level_marks_;
};

} // namespace cocsp
