#pragma once

#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cocsp/csp.hpp"
#include "cocsp/native_io.hpp"

namespace cocsp {

// Reader for the XCSP 2.1 extensional binary subset: value-list/range
// domains, supports/conflicts relations, binary constraint scopes. Unary
// extensional constraints are folded into the referenced variable's domain.
// Intensional (predicate) and global constraints are rejected.

namespace xml {

struct Node {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<Node> children;
    std::string text;

    const std::string* attr(const std::string& key) const {
        for (const auto& [k, v] : attrs)
            if (k == key)
                return &v;
        return nullptr;
    }
    const Node* child(const std::string& tag) const {
        for (const Node& c : children)
            if (c.name == tag)
                return &c;
        return nullptr;
    }
};

// Minimal non-validating XML scanner: elements, attributes, text, comments,
// declarations, the five predefined entities. Enough for XCSP 2.1 documents.
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Node parse_document() {
        skip_misc();
        Node root = parse_element();
        skip_misc();
        if (pos_ != src_.size())
            fail("trailing content after the root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("xml parse: " + msg + " (offset " + std::to_string(pos_) + ")");
    }

    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                const auto end = src_.find("?>", pos_);
                if (end == std::string_view::npos)
                    fail("unterminated processing instruction");
                pos_ = end + 2;
            } else if (starts_with("<!--")) {
                const auto end = src_.find("-->", pos_);
                if (end == std::string_view::npos)
                    fail("unterminated comment");
                pos_ = end + 3;
            } else if (starts_with("<!")) {
                const auto end = src_.find('>', pos_);
                if (end == std::string_view::npos)
                    fail("unterminated declaration");
                pos_ = end + 1;
            } else {
                return;
            }
        }
    }

    std::string parse_name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                src_[pos_] == '-' || src_[pos_] == '.' || src_[pos_] == ':'))
            ++pos_;
        if (pos_ == start)
            fail("expected a name");
        return std::string(src_.substr(start, pos_ - start));
    }

    static std::string decode_entities(std::string_view s) {
        std::string out;
        out.reserve(s.size());
        for (std::size_t i = 0; i < s.size();) {
            if (s[i] != '&') {
                out.push_back(s[i++]);
                continue;
            }
            const auto semi = s.find(';', i);
            const std::string_view ent =
                semi == std::string_view::npos ? s.substr(i) : s.substr(i, semi - i + 1);
            if (ent == "&amp;")
                out.push_back('&');
            else if (ent == "&lt;")
                out.push_back('<');
            else if (ent == "&gt;")
                out.push_back('>');
            else if (ent == "&quot;")
                out.push_back('"');
            else if (ent == "&apos;")
                out.push_back('\'');
            else
                throw ParseError("xml parse: unsupported entity '" + std::string(ent) + "'");
            i += ent.size();
        }
        return out;
    }

    Node parse_element() {
        if (pos_ >= src_.size() || src_[pos_] != '<')
            fail("expected '<'");
        ++pos_;
        Node node;
        node.name = parse_name();
        for (;;) {
            skip_ws();
            if (pos_ >= src_.size())
                fail("unterminated element <" + node.name + ">");
            if (starts_with("/>")) {
                pos_ += 2;
                return node;
            }
            if (src_[pos_] == '>') {
                ++pos_;
                break;
            }
            std::string key = parse_name();
            skip_ws();
            if (pos_ >= src_.size() || src_[pos_] != '=')
                fail("expected '=' after attribute '" + key + "'");
            ++pos_;
            skip_ws();
            if (pos_ >= src_.size() || (src_[pos_] != '"' && src_[pos_] != '\''))
                fail("expected a quoted attribute value");
            const char quote = src_[pos_++];
            const auto end = src_.find(quote, pos_);
            if (end == std::string_view::npos)
                fail("unterminated attribute value");
            node.attrs.emplace_back(std::move(key), decode_entities(src_.substr(pos_, end - pos_)));
            pos_ = end + 1;
        }
        // Content: text chunks interleaved with child elements and comments.
        for (;;) {
            if (pos_ >= src_.size())
                fail("missing </" + node.name + ">");
            if (src_[pos_] == '<') {
                if (starts_with("</")) {
                    pos_ += 2;
                    const std::string closing = parse_name();
                    if (closing != node.name)
                        fail("mismatched </" + closing + "> for <" + node.name + ">");
                    skip_ws();
                    if (pos_ >= src_.size() || src_[pos_] != '>')
                        fail("malformed closing tag");
                    ++pos_;
                    return node;
                }
                if (starts_with("<!--")) {
                    const auto end = src_.find("-->", pos_);
                    if (end == std::string_view::npos)
                        fail("unterminated comment");
                    pos_ = end + 3;
                    continue;
                }
                node.children.push_back(parse_element());
            } else {
                const auto next = src_.find('<', pos_);
                const auto chunk =
                    src_.substr(pos_, next == std::string_view::npos ? src_.size() - pos_
                                                                     : next - pos_);
                node.text += decode_entities(chunk);
                pos_ = next == std::string_view::npos ? src_.size() : next;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace xml

namespace xcsp_detail {

inline long parse_long_attr(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const long value = std::stol(text, &used);
        if (used != text.size())
            throw ParseError("xcsp parse: malformed number '" + text + "' in " + where);
        return value;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("xcsp parse: malformed number '" + text + "' in " + where);
    }
}

// "0..2 4 7..9" -> {0,1,2,4,7,8,9}
inline Domain parse_value_list(const std::string& text, const std::string& where) {
    Domain out;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        const auto dots = token.find("..");
        try {
            if (dots == std::string::npos) {
                out.push_back(std::stoi(token));
            } else {
                const int lo = std::stoi(token.substr(0, dots));
                const int hi = std::stoi(token.substr(dots + 2));
                if (hi < lo)
                    throw ParseError("xcsp parse: empty range '" + token + "' in " + where);
                for (int v = lo; v <= hi; ++v)
                    out.push_back(v);
            }
        } catch (const std::invalid_argument&) {
            throw ParseError("xcsp parse: malformed value '" + token + "' in " + where);
        } catch (const std::out_of_range&) {
            throw ParseError("xcsp parse: value out of range '" + token + "' in " + where);
        }
    }
    return out;
}

struct XcspRelation {
    int arity = 0;
    RelationSemantics semantics = RelationSemantics::supports;
    std::vector<std::vector<Value>> tuples;
};

inline XcspRelation parse_relation_node(const xml::Node& node) {
    const std::string* name = node.attr("name");
    const std::string where = "relation '" + (name ? *name : std::string("?")) + "'";
    XcspRelation rel;
    const std::string* arity = node.attr("arity");
    if (!arity)
        throw ParseError("xcsp parse: " + where + " is missing an arity attribute");
    rel.arity = static_cast<int>(parse_long_attr(*arity, where));
    if (rel.arity < 1)
        throw ParseError("xcsp parse: " + where + " has arity " + *arity);
    const std::string* semantics = node.attr("semantics");
    if (!semantics || (*semantics != "supports" && *semantics != "conflicts"))
        throw ParseError("xcsp parse: " + where + " needs semantics supports|conflicts");
    rel.semantics = *semantics == "supports" ? RelationSemantics::supports
                                             : RelationSemantics::conflicts;
    // Tuples are '|'-separated, values whitespace-separated.
    std::vector<std::string> parts;
    {
        std::string part;
        for (char ch : node.text) {
            if (ch == '|') {
                parts.push_back(part);
                part.clear();
            } else {
                part.push_back(ch);
            }
        }
        parts.push_back(part);
    }
    for (const std::string& part : parts) {
        std::istringstream ts(part);
        std::vector<Value> tuple;
        Value v;
        while (ts >> v)
            tuple.push_back(v);
        if (tuple.empty())
            continue;
        if (static_cast<int>(tuple.size()) != rel.arity)
            throw ParseError("xcsp parse: " + where + ": tuple width " +
                             std::to_string(tuple.size()) + " does not match arity " +
                             std::to_string(rel.arity));
        rel.tuples.push_back(std::move(tuple));
    }
    const std::string* nb = node.attr("nbTuples");
    if (nb && parse_long_attr(*nb, where) != static_cast<long>(rel.tuples.size()))
        throw ParseError("xcsp parse: " + where + ": nbTuples says " + *nb + " but " +
                         std::to_string(rel.tuples.size()) + " tuples are present");
    return rel;
}

} // namespace xcsp_detail

inline CspInstance parse_xcsp(const std::string& document) {
    const xml::Node root = xml::Parser(document).parse_document();
    if (root.name != "instance")
        throw ParseError("xcsp parse: root element is <" + root.name + ">, expected <instance>");
    if (root.child("predicates"))
        throw ParseError("xcsp parse: intensional constraints unsupported (found <predicates>)");

    std::string name;
    if (const xml::Node* pres = root.child("presentation"))
        if (const std::string* n = pres->attr("name"))
            name = *n;

    const xml::Node* domains_node = root.child("domains");
    const xml::Node* variables_node = root.child("variables");
    const xml::Node* constraints_node = root.child("constraints");
    if (!domains_node || !variables_node || !constraints_node)
        throw ParseError("xcsp parse: missing <domains>, <variables> or <constraints> section");

    std::map<std::string, Domain> domain_defs;
    for (const xml::Node& d : domains_node->children) {
        if (d.name != "domain")
            continue;
        const std::string* dname = d.attr("name");
        if (!dname)
            throw ParseError("xcsp parse: <domain> without a name attribute");
        Domain values = xcsp_detail::parse_value_list(d.text, "domain '" + *dname + "'");
        if (const std::string* nb = d.attr("nbValues"))
            if (xcsp_detail::parse_long_attr(*nb, "domain '" + *dname + "'") !=
                static_cast<long>(values.size()))
                throw ParseError("xcsp parse: domain '" + *dname + "': nbValues mismatch");
        if (!domain_defs.emplace(*dname, std::move(values)).second)
            throw ParseError("xcsp parse: duplicate domain name '" + *dname + "'");
    }

    std::vector<std::string> var_names;
    std::map<std::string, VarId> var_ids;
    std::vector<Domain> domains;
    for (const xml::Node& v : variables_node->children) {
        if (v.name != "variable")
            continue;
        const std::string* vname = v.attr("name");
        const std::string* dref = v.attr("domain");
        if (!vname || !dref)
            throw ParseError("xcsp parse: <variable> needs name and domain attributes");
        const auto it = domain_defs.find(*dref);
        if (it == domain_defs.end())
            throw ParseError("xcsp parse: variable '" + *vname + "' references unknown domain '" +
                             *dref + "'");
        if (!var_ids.emplace(*vname, static_cast<VarId>(var_names.size())).second)
            throw ParseError("xcsp parse: duplicate variable name '" + *vname + "'");
        var_names.push_back(*vname);
        domains.push_back(it->second);
    }
    if (var_names.empty())
        throw ParseError("xcsp parse: no variables declared");

    std::map<std::string, xcsp_detail::XcspRelation> relations;
    if (const xml::Node* relations_node = root.child("relations")) {
        for (const xml::Node& rnode : relations_node->children) {
            if (rnode.name != "relation")
                continue;
            const std::string* rname = rnode.attr("name");
            if (!rname)
                throw ParseError("xcsp parse: <relation> without a name attribute");
            if (!relations.emplace(*rname, xcsp_detail::parse_relation_node(rnode)).second)
                throw ParseError("xcsp parse: duplicate relation name '" + *rname + "'");
        }
    }

    // First pass: resolve scopes, fold unary constraints into domains,
    // collect binary ones. Tuples of binary relations are filtered against
    // the final (possibly folded) domains afterwards.
    struct PendingBinary {
        VarId x, y;
        const xcsp_detail::XcspRelation* rel;
    };
    std::vector<PendingBinary> binaries;
    for (const xml::Node& cnode : constraints_node->children) {
        if (cnode.name != "constraint")
            continue;
        const std::string* cname = cnode.attr("name");
        const std::string where = "constraint '" + (cname ? *cname : std::string("?")) + "'";
        const std::string* scope = cnode.attr("scope");
        const std::string* reference = cnode.attr("reference");
        if (!scope || !reference)
            throw ParseError("xcsp parse: " + where + " needs scope and reference attributes");
        if (reference->rfind("global:", 0) == 0)
            throw ParseError("xcsp parse: " + where + ": global constraints unsupported");
        std::vector<VarId> scope_vars;
        {
            std::istringstream ss(*scope);
            std::string tok;
            while (ss >> tok) {
                const auto it = var_ids.find(tok);
                if (it == var_ids.end())
                    throw ParseError("xcsp parse: " + where + " references unknown variable '" +
                                     tok + "'");
                scope_vars.push_back(it->second);
            }
        }
        const auto rel_it = relations.find(*reference);
        if (rel_it == relations.end())
            throw ParseError("xcsp parse: " + where + " references '" + *reference +
                             "', which is not an extensional relation (intensional constraints "
                             "unsupported)");
        const xcsp_detail::XcspRelation& rel = rel_it->second;
        if (rel.arity != static_cast<int>(scope_vars.size()))
            throw ParseError("xcsp parse: " + where + ": scope size " +
                             std::to_string(scope_vars.size()) + " does not match relation arity " +
                             std::to_string(rel.arity));
        if (scope_vars.size() == 1) {
            Domain& dom = domains[static_cast<std::size_t>(scope_vars[0])];
            Domain kept;
            for (Value v : dom) {
                bool listed = false;
                for (const auto& t : rel.tuples)
                    if (t[0] == v)
                        listed = true;
                const bool keep = rel.semantics == RelationSemantics::supports ? listed : !listed;
                if (keep)
                    kept.push_back(v);
            }
            if (kept.empty())
                throw ParseError("xcsp parse: " + where + " empties the domain of variable '" +
                                 var_names[static_cast<std::size_t>(scope_vars[0])] + "'");
            dom = std::move(kept);
        } else if (scope_vars.size() == 2) {
            binaries.push_back({scope_vars[0], scope_vars[1], &rel});
        } else {
            throw ParseError("xcsp parse: " + where + " has arity " +
                             std::to_string(scope_vars.size()) + "; only binary (and foldable "
                             "unary) extensional constraints are supported");
        }
    }

    const auto in_domain = [&](VarId v, Value val) {
        const Domain& d = domains[static_cast<std::size_t>(v)];
        return std::find(d.begin(), d.end(), val) != d.end();
    };
    std::vector<ConstraintSpec> specs;
    specs.reserve(binaries.size());
    for (const PendingBinary& b : binaries) {
        Relation out;
        out.semantics = b.rel->semantics;
        for (const auto& t : b.rel->tuples)
            if (in_domain(b.x, t[0]) && in_domain(b.y, t[1]))
                out.tuples.emplace_back(t[0], t[1]);
        specs.push_back({b.x, b.y, std::move(out)});
    }

    try {
        return CspInstance(name, std::move(domains), std::move(specs));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("xcsp parse: invalid instance: ") + e.what());
    }
}

} // namespace cocsp
