#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cocsp/csp.hpp"

namespace cocsp {

// Errors from either instance reader; the message names the offending
// element or line.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Native instance format, schema version 1. Line oriented:
//
//   cocsp 1
//   name <rest of line>
//   nvars <n>
//   ndomains <k>
//   domain <id> <count> : <v...>
//   vardomains <domain id per variable>
//   nrelations <m>
//   relation <id> <supports|conflicts> <tuple count> : <a b  a b ...>
//   nconstraints <e>
//   constraint <id> <x> <y> <relation id>
//
// Serialization is canonical: domains and relations are deduplicated and
// sorted by content, so equal instances serialize to identical bytes.

namespace native_detail {

struct RelationKey {
    RelationSemantics semantics;
    std::vector<ValuePair> tuples;
    bool operator<(const RelationKey& o) const {
        if (semantics != o.semantics)
            return semantics < o.semantics;
        return tuples < o.tuples;
    }
};

} // namespace native_detail

inline std::string serialize_native(const CspInstance& inst) {
    if (inst.name().find('\n') != std::string::npos)
        throw ParseError("serialize_native: instance name must not contain newlines");

    std::map<Domain, int> domain_ids;
    for (VarId v = 0; v < inst.num_vars(); ++v)
        domain_ids.emplace(inst.domain(v), 0);
    int next = 0;
    for (auto& [dom, id] : domain_ids)
        id = next++;

    std::map<native_detail::RelationKey, int> relation_ids;
    for (const Constraint& c : inst.constraints())
        relation_ids.emplace(
            native_detail::RelationKey{c.relation.semantics, c.relation.tuples}, 0);
    next = 0;
    for (auto& [key, id] : relation_ids)
        id = next++;

    std::ostringstream out;
    out << "cocsp 1\n";
    out << "name " << inst.name() << "\n";
    out << "nvars " << inst.num_vars() << "\n";
    out << "ndomains " << domain_ids.size() << "\n";
    for (const auto& [dom, id] : domain_ids) {
        out << "domain " << id << " " << dom.size() << " :";
        for (Value v : dom)
            out << " " << v;
        out << "\n";
    }
    out << "vardomains";
    for (VarId v = 0; v < inst.num_vars(); ++v)
        out << " " << domain_ids.at(inst.domain(v));
    out << "\n";
    out << "nrelations " << relation_ids.size() << "\n";
    for (const auto& [key, id] : relation_ids) {
        out << "relation " << id << " "
            << (key.semantics == RelationSemantics::supports ? "supports" : "conflicts") << " "
            << key.tuples.size() << " :";
        for (const auto& [a, b] : key.tuples)
            out << " " << a << " " << b;
        out << "\n";
    }
    out << "nconstraints " << inst.num_constraints() << "\n";
    for (const Constraint& c : inst.constraints()) {
        const int rid = relation_ids.at(
            native_detail::RelationKey{c.relation.semantics, c.relation.tuples});
        out << "constraint " << c.id << " " << c.x << " " << c.y << " " << rid << "\n";
    }
    return out.str();
}

namespace native_detail {

class LineReader {
public:
    explicit LineReader(const std::string& text) : in_(text) {}

    // Next non-empty line; throws naming the expected keyword on EOF.
    std::string next(const std::string& expecting) {
        std::string line;
        while (std::getline(in_, line)) {
            ++lineno_;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos)
                return line;
        }
        throw ParseError("native parse: unexpected end of input, expected '" + expecting + "'");
    }

    int lineno() const { return lineno_; }

private:
    std::istringstream in_;
    int lineno_ = 0;
};

inline long expect_count(LineReader& r, const std::string& keyword) {
    // Documents carry one line per declared entity; anything past this bound
    // is corrupt, and rejecting it here keeps huge counts from turning into
    // allocation failures.
    constexpr long max_count = 16'777'216;
    std::istringstream ls(r.next(keyword));
    std::string kw;
    long count = -1;
    ls >> kw >> count;
    if (kw != keyword || count < 0 || count > max_count)
        throw ParseError("native parse: line " + std::to_string(r.lineno()) + ": expected '" +
                         keyword + " <count>'");
    return count;
}

} // namespace native_detail

inline CspInstance parse_native(const std::string& text) {
    using native_detail::LineReader;
    LineReader r(text);

    {
        std::istringstream ls(r.next("cocsp"));
        std::string kw, version;
        ls >> kw >> version;
        if (kw != "cocsp")
            throw ParseError("native parse: missing 'cocsp <version>' header");
        if (version != "1")
            throw ParseError("native parse: unsupported schema version '" + version + "'");
    }

    std::string name;
    {
        const std::string line = r.next("name");
        if (line.rfind("name", 0) != 0)
            throw ParseError("native parse: expected 'name' line");
        if (line.size() > 5)
            name = line.substr(5);
    }

    const long nvars = native_detail::expect_count(r, "nvars");
    const long ndomains = native_detail::expect_count(r, "ndomains");
    std::vector<Domain> domain_defs(static_cast<std::size_t>(ndomains));
    for (long i = 0; i < ndomains; ++i) {
        std::istringstream ls(r.next("domain"));
        std::string kw, colon;
        long id = -1, count = -1;
        ls >> kw >> id >> count >> colon;
        if (kw != "domain" || id < 0 || id >= ndomains || count < 0 || colon != ":")
            throw ParseError("native parse: line " + std::to_string(r.lineno()) +
                             ": malformed domain line");
        Domain dom;
        Value v;
        while (ls >> v)
            dom.push_back(v);
        if (static_cast<long>(dom.size()) != count)
            throw ParseError("native parse: domain " + std::to_string(id) +
                             ": value count mismatch");
        domain_defs[static_cast<std::size_t>(id)] = std::move(dom);
    }

    std::vector<Domain> domains;
    {
        std::istringstream ls(r.next("vardomains"));
        std::string kw;
        ls >> kw;
        if (kw != "vardomains")
            throw ParseError("native parse: expected 'vardomains' line");
        long id;
        while (ls >> id) {
            if (id < 0 || id >= ndomains)
                throw ParseError("native parse: vardomains references unknown domain " +
                                 std::to_string(id));
            domains.push_back(domain_defs[static_cast<std::size_t>(id)]);
        }
        if (static_cast<long>(domains.size()) != nvars)
            throw ParseError("native parse: vardomains lists " + std::to_string(domains.size()) +
                             " entries for " + std::to_string(nvars) + " variables");
    }

    const long nrelations = native_detail::expect_count(r, "nrelations");
    std::vector<Relation> relations(static_cast<std::size_t>(nrelations));
    for (long i = 0; i < nrelations; ++i) {
        std::istringstream ls(r.next("relation"));
        std::string kw, semantics, colon;
        long id = -1, count = -1;
        ls >> kw >> id >> semantics >> count >> colon;
        if (kw != "relation" || id < 0 || id >= nrelations || count < 0 || colon != ":" ||
            (semantics != "supports" && semantics != "conflicts"))
            throw ParseError("native parse: line " + std::to_string(r.lineno()) +
                             ": malformed relation line");
        Relation rel;
        rel.semantics = semantics == "supports" ? RelationSemantics::supports
                                                : RelationSemantics::conflicts;
        Value a, b;
        while (ls >> a >> b)
            rel.tuples.emplace_back(a, b);
        if (static_cast<long>(rel.tuples.size()) != count)
            throw ParseError("native parse: relation " + std::to_string(id) +
                             ": tuple count mismatch");
        relations[static_cast<std::size_t>(id)] = std::move(rel);
    }

    const long nconstraints = native_detail::expect_count(r, "nconstraints");
    std::vector<ConstraintSpec> specs;
    specs.reserve(static_cast<std::size_t>(nconstraints));
    for (long i = 0; i < nconstraints; ++i) {
        std::istringstream ls(r.next("constraint"));
        std::string kw;
        long id = -1, x = -1, y = -1, rid = -1;
        ls >> kw >> id >> x >> y >> rid;
        if (kw != "constraint" || id != i || rid < 0 || rid >= nrelations)
            throw ParseError("native parse: line " + std::to_string(r.lineno()) +
                             ": malformed constraint line");
        specs.push_back({static_cast<VarId>(x), static_cast<VarId>(y),
                         relations[static_cast<std::size_t>(rid)]});
    }

    try {
        return CspInstance(name, std::move(domains), std::move(specs));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("native parse: invalid instance: ") + e.what());
    }
}

} // namespace cocsp
