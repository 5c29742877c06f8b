#include "camp/validate.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>

namespace camp {

namespace {

std::string rel_subject(const Relationship& rel) {
    return rel.source + "->" + rel.target;
}

void add(std::vector<Diagnostic>& out, std::string code, std::string subject,
         std::string message) {
    out.push_back(Diagnostic{std::move(code), Diagnostic::Severity::Error,
                             std::move(subject), std::move(message)});
}

bool has_nonempty_attr(const ComponentNode& c, const char* name) {
    const std::string* v = c.attributes.find(name);
    return v != nullptr && !v->empty();
}

// (a), (b), (d): per-kind required attributes.
void check_component_attributes(const Topology& t, std::vector<Diagnostic>& out) {
    for (const auto& c : t.components) {
        switch (c.kind) {
        case ComponentKind::Web:
            if (!has_nonempty_attr(c, "webengine"))
                add(out, "E_UNIQUE_WEBENGINE", c.id,
                    "web component must declare exactly one 'webengine'");
            break;
        case ComponentKind::Database:
            if (!has_nonempty_attr(c, "dbengine"))
                add(out, "E_UNIQUE_DBENGINE", c.id,
                    "database component must declare exactly one 'dbengine'");
            break;
        case ComponentKind::DataAnalytics:
            if (!has_nonempty_attr(c, "process_engine"))
                add(out, "E_PROCESS_ENGINE", c.id,
                    "dataanalytics component must declare a 'process_engine'");
            break;
        }
    }
}

// (c): every OpenStack platform names its image.
void check_platform_attributes(const Topology& t, std::vector<Diagnostic>& out) {
    for (const auto& p : t.platforms)
        if (p.provider == Provider::OpenStack && (!p.image_name || p.image_name->empty()))
            add(out, "E_UNIQUE_IMAGENAME", p.id,
                "openstack platform must declare exactly one 'image_name'");
}

// (e): a migrateTo edge needs a deleteFrom on the same source.
void check_migration_pairs(const Topology& t, std::vector<Diagnostic>& out) {
    for (const auto& rel : t.relationships) {
        if (rel.kind != RelationKind::MigrateTo) continue;
        bool paired = std::any_of(
            t.relationships.begin(), t.relationships.end(), [&](const Relationship& other) {
                return other.kind == RelationKind::DeleteFrom && other.source == rel.source;
            });
        if (!paired)
            add(out, "E_MIGRATE_NEEDS_DELETE", rel_subject(rel),
                "migrateTo from '" + rel.source + "' has no matching deleteFrom");
    }
}

// (f): endpoint kinds must agree with the relationship kind.
void check_endpoint_kinds(const Topology& t, std::vector<Diagnostic>& out) {
    for (const auto& rel : t.relationships) {
        bool ok = true;
        if (rel.kind == RelationKind::ConnectsTo) {
            ok = t.find_component(rel.source) != nullptr &&
                 t.find_component(rel.target) != nullptr;
        } else {
            ok = t.find_component(rel.source) != nullptr &&
                 t.find_platform(rel.target) != nullptr;
        }
        if (!ok)
            add(out, "E_ENDPOINT_KIND", rel_subject(rel),
                to_string(rel.kind) + " requires " +
                    (rel.kind == RelationKind::ConnectsTo
                         ? "component endpoints on both sides"
                         : "a component source and a platform target"));
    }
}

// A component whose placement is expressed purely through migration edges
// against machines with known addresses needs no hostedOn of its own.
bool migration_source_exempt(const Topology& t, const ComponentNode& c) {
    bool has_migrate = false;
    bool has_delete = false;
    for (const auto& rel : t.relationships) {
        if (rel.source != c.id) continue;
        if (rel.kind == RelationKind::MigrateTo) has_migrate = true;
        if (rel.kind == RelationKind::DeleteFrom) {
            has_delete = true;
            const PlatformNode* p = t.find_platform(rel.target);
            if (p == nullptr || p->provider != Provider::PreDeployed) return false;
        }
    }
    return has_migrate && has_delete;
}

// (g): every deployed component is hosted exactly once.
void check_hosting(const Topology& t, std::vector<Diagnostic>& out) {
    for (const auto& c : t.components) {
        int hosted = 0;
        for (const auto& rel : t.relationships)
            if (rel.kind == RelationKind::HostedOn && rel.source == c.id) ++hosted;
        if (hosted > 1) {
            add(out, "E_HOSTED_EXACTLY_ONCE", c.id,
                "component '" + c.id + "' has " + std::to_string(hosted) +
                    " hostedOn relationships, expected exactly one");
        } else if (hosted == 0 && !migration_source_exempt(t, c)) {
            add(out, "E_HOSTED_EXACTLY_ONCE", c.id,
                "component '" + c.id + "' has no hostedOn relationship");
        }
    }
}

// (h): the connectsTo subgraph is a DAG; start ordering deadlocks on cycles.
// One diagnostic per back edge found by a DFS over sorted adjacency.
void check_connects_cycles(const Topology& t, std::vector<Diagnostic>& out) {
    std::map<std::string, std::vector<std::string>> adjacency;
    for (const auto& rel : t.relationships)
        if (rel.kind == RelationKind::ConnectsTo) adjacency[rel.source].push_back(rel.target);
    for (auto& [node, targets] : adjacency) std::sort(targets.begin(), targets.end());

    enum class Color { White, Gray, Black };
    std::map<std::string, Color> color;

    std::function<void(const std::string&)> visit = [&](const std::string& node) {
        color[node] = Color::Gray;
        for (const std::string& next : adjacency[node]) {
            Color c = color.count(next) ? color[next] : Color::White;
            if (c == Color::Gray) {
                add(out, "E_CONNECTS_CYCLE", node + "->" + next,
                    "connectsTo relationships form a cycle through '" + next + "'");
            } else if (c == Color::White) {
                visit(next);
            }
        }
        color[node] = Color::Black;
    };

    for (const auto& c : t.components) {
        if (!color.count(c.id) && adjacency.count(c.id)) visit(c.id);
    }
}

// (i): bind rules restrict where the connection targets of flagged
// components may be hosted.
void check_provider_bindings(const Topology& t, const RuleSet& rules,
                             std::vector<Diagnostic>& out) {
    for (const auto& rule : rules.binds) {
        for (const auto& c : t.components) {
            bool flagged = std::any_of(
                c.attributes.items().begin(), c.attributes.items().end(),
                [&](const AttrMap::Item& item) { return item.second == rule.attribute_value; });
            if (!flagged) continue;
            for (const auto& rel : t.relationships) {
                if (rel.kind != RelationKind::ConnectsTo || rel.source != c.id) continue;
                const ComponentNode* target = t.find_component(rel.target);
                if (target == nullptr) continue; // (f) reports this edge
                const PlatformNode* host = nullptr;
                try {
                    host = hosting_platform(t, target->id);
                } catch (const ModelError&) {
                    continue; // (g) reports ambiguous hosting
                }
                if (host == nullptr) continue; // (g) reports missing hosting
                if (host->provider != rule.provider)
                    add(out, "E_PROVIDER_COMPAT", rel_subject(rel),
                        "'" + c.id + "' is bound to " + to_string(rule.provider) +
                            " targets, but '" + target->id + "' is hosted on " +
                            to_string(host->provider));
            }
        }
    }
}

} // namespace

std::string to_string(Diagnostic::Severity s) {
    return s == Diagnostic::Severity::Error ? "error" : "warning";
}

RuleSet default_rules() { return RuleSet{}; }

RuleSet rule_set_from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open rules file '" + path.string() + "'");

    RuleSet rules;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream fields(line);
        std::string word;
        std::vector<std::string> words;
        while (fields >> word) words.push_back(word);
        if (words.empty()) continue;
        if (words.size() != 4 || words[0] != "bind" || words[2] != "to")
            throw RuleParseError(line_no, "expected 'bind <attribute-value> to <provider>'");
        auto provider = parse_provider(words[3]);
        if (!provider)
            throw RuleParseError(line_no, "unknown provider '" + words[3] + "'");
        rules.binds.push_back(BindRule{words[1], *provider});
    }
    return rules;
}

std::vector<Diagnostic> validate(const Topology& t, const RuleSet& rules) {
    std::vector<Diagnostic> out;
    check_component_attributes(t, out);
    check_platform_attributes(t, out);
    check_migration_pairs(t, out);
    check_endpoint_kinds(t, out);
    check_hosting(t, out);
    check_connects_cycles(t, out);
    check_provider_bindings(t, rules, out);

    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.subject, a.code) < std::tie(b.subject, b.code);
    });
    return out;
}

bool deployable(const std::vector<Diagnostic>& diagnostics) {
    return std::none_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::Error;
    });
}

} // namespace camp
