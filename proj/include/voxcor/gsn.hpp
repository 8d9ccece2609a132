#ifndef VOXCOR_GSN_HPP
#define VOXCOR_GSN_HPP

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "voxcor/types.hpp"

namespace voxcor::gsn {

enum class errc { syntax, duplicate_label, dangling_reference };

class gsn_error : public error {
public:
    gsn_error(errc code, const std::string& what, std::size_t line = 0)
        : error(what), code_(code), line_(line) {}
    errc code() const { return code_; }
    std::size_t line() const { return line_; }

private:
    errc code_;
    std::size_t line_;
};

enum class node_kind { goal, strategy, context, justification, assumption, evidence };

constexpr std::string_view to_string(node_kind k) {
    switch (k) {
        case node_kind::goal: return "GOAL";
        case node_kind::strategy: return "STRATEGY";
        case node_kind::context: return "CONTEXT";
        case node_kind::justification: return "JUSTIFICATION";
        case node_kind::assumption: return "ASSUMPTION";
        case node_kind::evidence: return "EVIDENCE";
    }
    return "?";
}

struct gsn_node {
    std::string label;
    node_kind kind = node_kind::goal;
    std::string statement;
    std::vector<std::string> supports; // labels of the nodes this one supports
    std::string evidence_key;          // optional report key, evidence nodes only

    bool operator==(const gsn_node&) const = default;
};

/// Assurance-case graph: nodes in file order; the support relation is the
/// edge set declared by each node's `supports` clause.
struct assurance_case {
    std::vector<gsn_node> nodes;

    const gsn_node* find(std::string_view label) const {
        for (const auto& n : nodes)
            if (n.label == label) return &n;
        return nullptr;
    }

    std::vector<const gsn_node*> supporters_of(std::string_view label) const {
        std::vector<const gsn_node*> out;
        for (const auto& n : nodes)
            for (const auto& s : n.supports)
                if (s == label) out.push_back(&n);
        return out;
    }

    bool operator==(const assurance_case&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline bool parse_kind(std::string_view word, node_kind& out) {
    for (auto k : {node_kind::goal, node_kind::strategy, node_kind::context,
                   node_kind::justification, node_kind::assumption, node_kind::evidence}) {
        if (word == to_string(k)) {
            out = k;
            return true;
        }
    }
    return false;
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace detail

/// Parse the line-oriented case grammar:
///   <KIND> <LABEL> "<statement>" [supports <LABEL>[,<LABEL>...]] [key=<name>]
/// Blank lines and lines starting with '#' are skipped.
inline assurance_case parse_case(std::string_view text) {
    assurance_case result;
    std::map<std::string, std::size_t, std::less<>> seen;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fail = [&](const std::string& why) -> gsn_error {
            return gsn_error(errc::syntax, "line " + std::to_string(line_no) + ": " + why,
                             line_no);
        };

        gsn_node node;
        // kind
        auto sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos) throw fail("expected '<KIND> <LABEL> \"...\"'");
        if (!detail::parse_kind(line.substr(0, sp), node.kind))
            throw fail("unknown node kind '" + std::string(line.substr(0, sp)) + "'");
        line = detail::trim(line.substr(sp));
        // label
        sp = line.find_first_of(" \t");
        if (sp == std::string_view::npos) throw fail("missing quoted statement");
        node.label = std::string(line.substr(0, sp));
        if (node.label.find('"') != std::string::npos) throw fail("label must not contain '\"'");
        line = detail::trim(line.substr(sp));
        // "statement"
        if (line.empty() || line.front() != '"') throw fail("statement must be double-quoted");
        const auto close = line.find('"', 1);
        if (close == std::string_view::npos) throw fail("unterminated statement");
        node.statement = std::string(line.substr(1, close - 1));
        line = detail::trim(line.substr(close + 1));
        // optional clauses
        if (!line.empty() && line.substr(0, 8) == "supports") {
            line = detail::trim(line.substr(8));
            auto list_end = line.find(" key=");
            auto list = detail::trim(list_end == std::string_view::npos ? line
                                                                        : line.substr(0, list_end));
            if (list.empty()) throw fail("'supports' needs at least one label");
            std::size_t p = 0;
            while (p <= list.size()) {
                auto comma = list.find(',', p);
                auto item = detail::trim(
                    list.substr(p, comma == std::string_view::npos ? list.size() - p : comma - p));
                if (item.empty()) throw fail("empty label in 'supports' list");
                node.supports.emplace_back(item);
                if (comma == std::string_view::npos) break;
                p = comma + 1;
            }
            line = list_end == std::string_view::npos ? std::string_view{}
                                                      : detail::trim(line.substr(list_end));
        }
        if (!line.empty() && line.substr(0, 4) == "key=") {
            if (node.kind != node_kind::evidence)
                throw fail("key= is only valid on EVIDENCE nodes");
            node.evidence_key = std::string(detail::trim(line.substr(4)));
            if (node.evidence_key.empty()) throw fail("key= needs a value");
            line = {};
        }
        if (!line.empty()) throw fail("unexpected trailing text '" + std::string(line) + "'");

        if (seen.contains(node.label))
            throw gsn_error(errc::duplicate_label,
                            "line " + std::to_string(line_no) + ": duplicate label '" +
                                node.label + "'",
                            line_no);
        seen.emplace(node.label, result.nodes.size());
        result.nodes.push_back(std::move(node));
    }

    for (const auto& n : result.nodes)
        for (const auto& target : n.supports)
            if (!seen.contains(target))
                throw gsn_error(errc::dangling_reference,
                                "'" + n.label + "' supports undefined label '" + target + "'");
    return result;
}

/// Canonical text form; parse_case(render(c)) == c for every valid case.
inline std::string render(const assurance_case& c) {
    std::string out;
    for (const auto& n : c.nodes) {
        out += to_string(n.kind);
        out += ' ';
        out += n.label;
        out += " \"";
        out += n.statement;
        out += '"';
        if (!n.supports.empty()) {
            out += " supports ";
            for (std::size_t i = 0; i < n.supports.size(); ++i) {
                if (i) out += ',';
                out += n.supports[i];
            }
        }
        if (!n.evidence_key.empty()) {
            out += " key=";
            out += n.evidence_key;
        }
        out += '\n';
    }
    return out;
}

enum class issue_kind { undeveloped_goal, label_violation, cycle, orphan_evidence, convention };
enum class issue_severity { error, warning };

constexpr std::string_view to_string(issue_kind k) {
    switch (k) {
        case issue_kind::undeveloped_goal: return "undeveloped-goal";
        case issue_kind::label_violation: return "label-violation";
        case issue_kind::cycle: return "cycle";
        case issue_kind::orphan_evidence: return "orphan-evidence";
        case issue_kind::convention: return "convention";
    }
    return "?";
}

struct issue {
    issue_kind kind = issue_kind::undeveloped_goal;
    issue_severity severity = issue_severity::error;
    std::string label;
    std::string message;
};

namespace detail {

// Dotted goal labels must extend their parent goal's label with exactly one
// numeric segment; bare labels open a new sub-structure and are always fine.
inline bool extends_with_number(std::string_view child, std::string_view parent) {
    if (child.size() <= parent.size() + 1) return false;
    if (child.substr(0, parent.size()) != parent) return false;
    if (child[parent.size()] != '.') return false;
    return all_digits(child.substr(parent.size() + 1));
}

inline bool follows_letter_convention(std::string_view label, char prefix,
                                      std::string_view parent) {
    // e.g. C_G, C_Ga, C_Gb for contexts of goal G
    if (label.size() < 2 + parent.size()) return false;
    if (label[0] != prefix || label[1] != '_') return false;
    if (label.substr(2, parent.size()) != parent) return false;
    const auto suffix = label.substr(2 + parent.size());
    if (suffix.empty()) return true;
    if (suffix.size() != 1) return false;
    return suffix[0] >= 'a' && suffix[0] <= 'z';
}

} // namespace detail

/// Structural validation: undeveloped terminal goals, goal-label scheme
/// violations, support cycles, orphan evidence (all errors), plus naming
/// convention warnings for context/strategy/justification/evidence labels.
inline std::vector<issue> validate(const assurance_case& c) {
    std::vector<issue> issues;
    std::map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) index.emplace(c.nodes[i].label, i);

    const auto kind_of = [&](std::string_view label) { return c.nodes[index.at(label)].kind; };

    // effective goal parents, looking through one strategy hop
    const auto goal_parents = [&](const gsn_node& n) {
        std::vector<const gsn_node*> out;
        for (const auto& target : n.supports) {
            const auto& t = c.nodes[index.at(target)];
            if (t.kind == node_kind::goal) {
                out.push_back(&t);
            } else if (t.kind == node_kind::strategy) {
                for (const auto& up : t.supports)
                    if (kind_of(up) == node_kind::goal) out.push_back(&c.nodes[index.at(up)]);
            }
        }
        return out;
    };

    for (const auto& n : c.nodes) {
        switch (n.kind) {
            case node_kind::goal: {
                bool developed = false;
                for (const auto& other : c.nodes) {
                    if (other.kind != node_kind::goal && other.kind != node_kind::strategy &&
                        other.kind != node_kind::evidence)
                        continue;
                    for (const auto& s : other.supports)
                        if (s == n.label) developed = true;
                }
                if (!developed)
                    issues.push_back({issue_kind::undeveloped_goal, issue_severity::error, n.label,
                                      "undeveloped goal " + n.label});

                if (n.label.find('.') != std::string::npos) {
                    const auto parents = goal_parents(n);
                    if (parents.empty()) {
                        issues.push_back({issue_kind::label_violation, issue_severity::error,
                                          n.label,
                                          "dotted goal label " + n.label + " has no parent goal"});
                    } else {
                        for (const auto* p : parents) {
                            if (!detail::extends_with_number(n.label, p->label))
                                issues.push_back({issue_kind::label_violation,
                                                  issue_severity::error, n.label,
                                                  "label " + n.label + " does not extend " +
                                                      p->label});
                        }
                    }
                }
                break;
            }
            case node_kind::evidence: {
                if (n.supports.empty())
                    issues.push_back({issue_kind::orphan_evidence, issue_severity::error, n.label,
                                      "orphan evidence " + n.label + " supports nothing"});
                bool shaped = n.label.size() > 2 && n.label.substr(0, 2) == "E_";
                if (shaped) {
                    const auto dot = n.label.rfind('.');
                    shaped = dot != std::string::npos &&
                             detail::all_digits(std::string_view(n.label).substr(dot + 1));
                }
                if (!shaped)
                    issues.push_back({issue_kind::convention, issue_severity::warning, n.label,
                                      "evidence label " + n.label +
                                          " does not follow E_<name>.<n>"});
                break;
            }
            case node_kind::context:
            case node_kind::strategy:
            case node_kind::justification: {
                const char prefix = n.kind == node_kind::context ? 'C'
                                    : n.kind == node_kind::strategy ? 'S'
                                                                    : 'J';
                bool ok = n.supports.empty(); // nothing to check against
                for (const auto& target : n.supports)
                    if (detail::follows_letter_convention(n.label, prefix, target)) ok = true;
                if (!ok)
                    issues.push_back({issue_kind::convention, issue_severity::warning, n.label,
                                      std::string("label ") + n.label + " does not follow " +
                                          prefix + "_<parent><letter>"});
                break;
            }
            case node_kind::assumption: break;
        }
    }

    // cycle detection over the supports relation
    std::vector<int> color(c.nodes.size(), 0);
    std::vector<std::size_t> stack;
    const auto dfs = [&](auto&& self, std::size_t v) -> void {
        color[v] = 1;
        stack.push_back(v);
        for (const auto& target : c.nodes[v].supports) {
            const auto u = index.at(target);
            if (color[u] == 0) {
                self(self, u);
            } else if (color[u] == 1) {
                std::string path;
                for (std::size_t s = 0; s < stack.size(); ++s) {
                    if (c.nodes[stack[s]].label == target || !path.empty()) {
                        path += c.nodes[stack[s]].label;
                        path += " -> ";
                    }
                }
                path += target;
                issues.push_back({issue_kind::cycle, issue_severity::error, target,
                                  "support cycle: " + path});
            }
        }
        stack.pop_back();
        color[v] = 2;
    };
    for (std::size_t v = 0; v < c.nodes.size(); ++v)
        if (color[v] == 0) dfs(dfs, v);

    return issues;
}

enum class link_status { satisfied, violated, missing };

constexpr std::string_view to_string(link_status s) {
    switch (s) {
        case link_status::satisfied: return "satisfied";
        case link_status::violated: return "violated";
        case link_status::missing: return "missing";
    }
    return "?";
}

/// Evidence annotation produced by link_evidence; the case itself is not
/// modified.
struct link_summary {
    std::map<std::string, link_status> evidence; // evidence label -> status
    std::size_t satisfied = 0, violated = 0, missing = 0, unkeyed = 0;
};

/// Stamp each keyed evidence node with the outcome of the matching report
/// entry: satisfied/violated when the key is present, missing otherwise.
inline link_summary link_evidence(const assurance_case& c,
                                  const std::map<std::string, bool>& results) {
    link_summary summary;
    for (const auto& n : c.nodes) {
        if (n.kind != node_kind::evidence) continue;
        if (n.evidence_key.empty()) {
            ++summary.unkeyed;
            continue;
        }
        const auto it = results.find(n.evidence_key);
        link_status status;
        if (it == results.end())
            status = link_status::missing;
        else
            status = it->second ? link_status::satisfied : link_status::violated;
        summary.evidence.emplace(n.label, status);
        switch (status) {
            case link_status::satisfied: ++summary.satisfied; break;
            case link_status::violated: ++summary.violated; break;
            case link_status::missing: ++summary.missing; break;
        }
    }
    return summary;
}

/// Graphviz rendering of the case, optionally colored by annotation.
inline std::string to_dot(const assurance_case& c, const link_summary* annotation = nullptr) {
    std::string out = "digraph gsn {\n  rankdir=BT;\n";
    for (const auto& n : c.nodes) {
        const char* shape = "box";
        switch (n.kind) {
            case node_kind::goal: shape = "box"; break;
            case node_kind::strategy: shape = "parallelogram"; break;
            case node_kind::context: shape = "box, style=rounded"; break;
            case node_kind::justification: shape = "ellipse"; break;
            case node_kind::assumption: shape = "ellipse"; break;
            case node_kind::evidence: shape = "circle"; break;
        }
        out += "  \"" + n.label + "\" [shape=" + shape;
        if (annotation) {
            const auto it = annotation->evidence.find(n.label);
            if (it != annotation->evidence.end()) {
                const char* color = it->second == link_status::satisfied ? "palegreen"
                                    : it->second == link_status::violated ? "salmon"
                                                                          : "khaki";
                out += std::string(", style=filled, fillcolor=") + color;
            }
        }
        out += ", label=\"" + n.label + "\\n" + n.statement + "\"];\n";
    }
    for (const auto& n : c.nodes)
        for (const auto& s : n.supports) out += "  \"" + n.label + "\" -> \"" + s + "\";\n";
    out += "}\n";
    return out;
}

} // namespace voxcor::gsn

#endif
