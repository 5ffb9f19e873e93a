#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cocsp {

using Value = int;
using VarId = int;
using ConstraintId = int;

// Ordered set of integer values, ascending and distinct.
using Domain = std::vector<Value>;

using ValuePair = std::pair<Value, Value>;

enum class RelationSemantics { supports, conflicts };

// Binary extensional relation: an explicit list of allowed (supports) or
// forbidden (conflicts) value pairs. Tuples are kept sorted and distinct.
struct Relation {
    RelationSemantics semantics = RelationSemantics::conflicts;
    std::vector<ValuePair> tuples;

    bool operator==(const Relation&) const = default;
};

// Scope + relation, as handed to the CspInstance constructor.
struct ConstraintSpec {
    VarId x = -1;
    VarId y = -1;
    Relation relation;
};

// A constraint as stored inside an instance. Besides the scope and the
// relation it carries dense allow-bit matrices over domain *indices*, one
// per direction, so propagation never touches the tuple list.
struct Constraint {
    ConstraintId id = -1;
    VarId x = -1;
    VarId y = -1;
    Relation relation;

    int dx = 0;                             // |domain(x)|, |domain(y)|
    int dy = 0;
    int words_y = 0;                        // words per row of allow_fwd
    int words_x = 0;                        // words per row of allow_rev
    std::vector<std::uint64_t> allow_fwd;   // row xi: bitmask over y indices
    std::vector<std::uint64_t> allow_rev;   // row yi: bitmask over x indices

    bool allows_idx(int xi, int yi) const {
        return (allow_fwd[static_cast<std::size_t>(xi) * words_y + yi / 64] >> (yi % 64)) & 1u;
    }
    std::span<const std::uint64_t> fwd_row(int xi) const {
        return {allow_fwd.data() + static_cast<std::size_t>(xi) * words_y,
                static_cast<std::size_t>(words_y)};
    }
    std::span<const std::uint64_t> rev_row(int yi) const {
        return {allow_rev.data() + static_cast<std::size_t>(yi) * words_x,
                static_cast<std::size_t>(words_x)};
    }
};

struct AdjEntry {
    ConstraintId constraint = -1;
    VarId other = -1;
};

// Partial map from variable to value.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(int num_vars) : vals_(static_cast<std::size_t>(num_vars)) {}

    void bind(VarId v, Value val) { vals_.at(static_cast<std::size_t>(v)) = val; }
    void unbind(VarId v) { vals_.at(static_cast<std::size_t>(v)).reset(); }
    std::optional<Value> value(VarId v) const { return vals_.at(static_cast<std::size_t>(v)); }
    int num_vars() const { return static_cast<int>(vals_.size()); }

    bool is_total() const {
        for (const auto& v : vals_)
            if (!v)
                return false;
        return true;
    }

    bool operator==(const Assignment&) const = default;

private:
    std::vector<std::optional<Value>> vals_;
};

// Immutable binary CSP: variables with finite integer domains plus binary
// extensional constraints, at most one per unordered variable pair.
class CspInstance {
public:
    CspInstance(std::string name, std::vector<Domain> domains, std::vector<ConstraintSpec> specs)
        : name_(std::move(name)), domains_(std::move(domains)) {
        const int n = static_cast<int>(domains_.size());
        if (n == 0)
            throw std::invalid_argument("instance has no variables");
        for (auto& d : domains_) {
            std::sort(d.begin(), d.end());
            d.erase(std::unique(d.begin(), d.end()), d.end());
            if (d.empty())
                throw std::invalid_argument("empty domain at construction");
        }
        adjacency_.resize(static_cast<std::size_t>(n));
        constraints_.reserve(specs.size());
        std::vector<std::pair<VarId, VarId>> seen_pairs;
        for (auto& spec : specs) {
            if (spec.x < 0 || spec.x >= n || spec.y < 0 || spec.y >= n)
                throw std::invalid_argument("constraint scope out of range");
            if (spec.x == spec.y)
                throw std::invalid_argument("constraint scope variables must differ");
            auto key = std::minmax(spec.x, spec.y);
            if (std::find(seen_pairs.begin(), seen_pairs.end(),
                          std::pair<VarId, VarId>(key.first, key.second)) != seen_pairs.end())
                throw std::invalid_argument("duplicate constraint on variable pair (" +
                                            std::to_string(key.first) + "," +
                                            std::to_string(key.second) + ")");
            seen_pairs.emplace_back(key.first, key.second);

            Constraint c;
            c.id = static_cast<ConstraintId>(constraints_.size());
            c.x = spec.x;
            c.y = spec.y;
            c.relation = std::move(spec.relation);
            normalize_relation(c);
            build_bits(c);
            adjacency_[static_cast<std::size_t>(c.x)].push_back({c.id, c.y});
            adjacency_[static_cast<std::size_t>(c.y)].push_back({c.id, c.x});
            constraints_.push_back(std::move(c));
        }
    }

    const std::string& name() const { return name_; }
    int num_vars() const { return static_cast<int>(domains_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    const Domain& domain(VarId v) const { return domains_.at(static_cast<std::size_t>(v)); }
    const std::vector<Domain>& domains() const { return domains_; }
    const Constraint& constraint(ConstraintId c) const {
        return constraints_.at(static_cast<std::size_t>(c));
    }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<AdjEntry>& adjacency(VarId v) const {
        return adjacency_.at(static_cast<std::size_t>(v));
    }
    int degree(VarId v) const { return static_cast<int>(adjacency(v).size()); }

    // Index of a value in the (sorted) domain of v, or -1.
    int index_of(VarId v, Value val) const {
        const Domain& d = domain(v);
        auto it = std::lower_bound(d.begin(), d.end(), val);
        if (it == d.end() || *it != val)
            return -1;
        return static_cast<int>(it - d.begin());
    }

    // True iff the value pair is allowed by the constraint. Values must lie
    // in the scope variables' original domains.
    bool check(const Constraint& c, Value x_val, Value y_val) const {
        const int xi = index_of(c.x, x_val);
        const int yi = index_of(c.y, y_val);
        if (xi < 0 || yi < 0)
            throw std::invalid_argument("check: value outside the scope's domain");
        return c.allows_idx(xi, yi);
    }
    bool check(ConstraintId c, Value x_val, Value y_val) const {
        return check(constraint(c), x_val, y_val);
    }

private:
    static void normalize_relation(Constraint& c) {
        auto& t = c.relation.tuples;
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }

    void build_bits(Constraint& c) {
        const Domain& dx = domain(c.x);
        const Domain& dy = domain(c.y);
        c.dx = static_cast<int>(dx.size());
        c.dy = static_cast<int>(dy.size());
        c.words_y = (c.dy + 63) / 64;
        c.words_x = (c.dx + 63) / 64;
        const bool conflicts = c.relation.semantics == RelationSemantics::conflicts;
        c.allow_fwd.assign(static_cast<std::size_t>(c.dx) * c.words_y, 0);
        c.allow_rev.assign(static_cast<std::size_t>(c.dy) * c.words_x, 0);
        if (conflicts) {
            for (int xi = 0; xi < c.dx; ++xi)
                for (int yi = 0; yi < c.dy; ++yi)
                    set_bit(c, xi, yi);
        }
        for (const auto& [xv, yv] : c.relation.tuples) {
            auto xit = std::lower_bound(dx.begin(), dx.end(), xv);
            auto yit = std::lower_bound(dy.begin(), dy.end(), yv);
            if (xit == dx.end() || *xit != xv || yit == dy.end() || *yit != yv)
                throw std::invalid_argument("relation tuple (" + std::to_string(xv) + "," +
                                            std::to_string(yv) +
                                            ") outside the scope's domain product");
            const int xi = static_cast<int>(xit - dx.begin());
            const int yi = static_cast<int>(yit - dy.begin());
            if (conflicts)
                clear_bit(c, xi, yi);
            else
                set_bit(c, xi, yi);
        }
    }

    static void set_bit(Constraint& c, int xi, int yi) {
        c.allow_fwd[static_cast<std::size_t>(xi) * c.words_y + yi / 64] |= 1ull << (yi % 64);
        c.allow_rev[static_cast<std::size_t>(yi) * c.words_x + xi / 64] |= 1ull << (xi % 64);
    }
    static void clear_bit(Constraint& c, int xi, int yi) {
        c.allow_fwd[static_cast<std::size_t>(xi) * c.words_y + yi / 64] &= ~(1ull << (yi % 64));
        c.allow_rev[static_cast<std::size_t>(yi) * c.words_x + xi / 64] &= ~(1ull << (xi % 64));
    }

    std::string name_;
    std::vector<Domain> domains_;
    std::vector<Constraint> constraints_;
    std::vector<std::vector<AdjEntry>> adjacency_;
};

inline void require_total(const CspInstance& inst, const Assignment& a) {
    if (a.num_vars() != inst.num_vars())
        throw std::invalid_argument("assignment variable count mismatch");
    for (VarId v = 0; v < inst.num_vars(); ++v)
        if (!a.value(v))
            throw std::invalid_argument("assignment is partial (variable " + std::to_string(v) +
                                        " unbound)");
}

inline bool is_solution(const CspInstance& inst, const Assignment& a) {
    require_total(inst, a);
    for (const Constraint& c : inst.constraints())
        if (!inst.check(c, *a.value(c.x), *a.value(c.y)))
            return false;
    return true;
}

inline std::vector<ConstraintId> violated_constraints(const CspInstance& inst,
                                                      const Assignment& a) {
    require_total(inst, a);
    std::vector<ConstraintId> out;
    for (const Constraint& c : inst.constraints())
        if (!inst.check(c, *a.value(c.x), *a.value(c.y)))
            out.push_back(c.id);
    return out;
}

// Field-by-field equality, used by the io round-trip checks.
inline bool equal_instances(const CspInstance& a, const CspInstance& b) {
    if (a.name() != b.name() || a.num_vars() != b.num_vars() ||
        a.num_constraints() != b.num_constraints())
        return false;
    for (VarId v = 0; v < a.num_vars(); ++v)
        if (a.domain(v) != b.domain(v))
            return false;
    for (ConstraintId i = 0; i < a.num_constraints(); ++i) {
        const Constraint& ca = a.constraint(i);
        const Constraint& cb = b.constraint(i);
        if (ca.x != cb.x || ca.y != cb.y || !(ca.relation == cb.relation))
            return false;
    }
    return true;
}

} // namespace cocsp
