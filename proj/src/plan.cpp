#include "camp/plan.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace camp {

namespace {

class PlanBuilder {
public:
    Step& add(Action action, const std::string& subject, std::string payload,
              bool satisfied = false) {
        std::string id = step_id(action, subject);
        auto it = index_.find(id);
        if (it != index_.end()) {
            Step& existing = plan_.steps[it->second];
            // a real step wins over a marker for the same work
            if (existing.already_satisfied && !satisfied) existing.already_satisfied = false;
            return existing;
        }
        index_.emplace(id, plan_.steps.size());
        plan_.steps.push_back(Step{id, action, subject, std::move(payload), satisfied});
        return plan_.steps.back();
    }

    bool has(Action action, const std::string& subject) const {
        return index_.count(step_id(action, subject)) > 0;
    }

    void edge(const std::string& before, const std::string& after) {
        if (before == after) return;
        if (edge_set_.insert({before, after}).second) plan_.edges.emplace_back(before, after);
    }

    void edge(Action a, const std::string& sa, Action b, const std::string& sb) {
        edge(step_id(a, sa), step_id(b, sb));
    }

    Plan finish() {
        std::sort(plan_.edges.begin(), plan_.edges.end());
        ensure_acyclic(plan_);
        return std::move(plan_);
    }

private:
    Plan plan_;
    std::map<std::string, std::size_t> index_;
    std::set<std::pair<std::string, std::string>> edge_set_;
};

std::string playbook_payload(const std::string& component_id) {
    return "playbooks/" + component_id + ".yml";
}

std::string provision_payload(const std::string& platform_id) {
    return "provision/" + platform_id + ".sh";
}

std::string terminate_payload(const PlatformNode& platform) {
    return platform.provider == Provider::PreDeployed ? std::string()
                                                      : "terminate/" + platform.id + ".sh";
}

// Hosted components with their unique platform, sorted by component id.
std::map<std::string, const PlatformNode*> hosted_components(const Topology& topology) {
    std::map<std::string, const PlatformNode*> hosts;
    for (const auto& c : topology.components) {
        const PlatformNode* p = hosting_platform(topology, c.id);
        if (p != nullptr) hosts.emplace(c.id, p);
    }
    return hosts;
}

// Emits [Provision ->] WaitSsh for a platform and returns the id of the
// chain's tail (the waitssh step).
std::string host_chain(PlanBuilder& builder, const PlatformNode& platform, bool satisfied) {
    std::string wait_id = step_id(Action::WaitSsh, platform.id);
    if (platform.provider != Provider::PreDeployed) {
        builder.add(Action::Provision, platform.id, provision_payload(platform.id), satisfied);
        builder.add(Action::WaitSsh, platform.id, "", satisfied);
        builder.edge(Action::Provision, platform.id, Action::WaitSsh, platform.id);
    } else {
        builder.add(Action::WaitSsh, platform.id, "", satisfied);
    }
    return wait_id;
}

void configure_start_chain(PlanBuilder& builder, const std::string& component_id,
                           const std::string& wait_id) {
    builder.add(Action::Configure, component_id, playbook_payload(component_id));
    builder.add(Action::Start, component_id, playbook_payload(component_id));
    builder.edge(wait_id, step_id(Action::Configure, component_id));
    builder.edge(Action::Configure, component_id, Action::Start, component_id);
}

void component_chain(PlanBuilder& builder, const std::string& component_id,
                     const PlatformNode& platform) {
    configure_start_chain(builder, component_id, host_chain(builder, platform, false));
}

void connects_to_edges(PlanBuilder& builder, const Topology& topology) {
    for (const auto& rel : topology.relationships) {
        if (rel.kind != RelationKind::ConnectsTo) continue;
        if (builder.has(Action::Start, rel.source) && builder.has(Action::Start, rel.target))
            builder.edge(Action::Start, rel.target, Action::Start, rel.source);
    }
}

struct Move {
    const ComponentNode* component = nullptr;
    const PlatformNode* old_platform = nullptr;
    const PlatformNode* new_platform = nullptr;
    MigrationType type = MigrationType::Stateless;
};

std::map<std::string, Move> collect_moves(const Topology& topology) {
    std::map<std::string, Move> moves;
    for (const auto& rel : topology.relationships) {
        if (rel.kind != RelationKind::MigrateTo) continue;
        Move move;
        move.component = topology.find_component(rel.source);
        move.new_platform = topology.find_platform(rel.target);
        move.type = rel.migration.value_or(MigrationType::Stateless);
        for (const auto& del : topology.relationships) {
            if (del.kind == RelationKind::DeleteFrom && del.source == rel.source) {
                move.old_platform = topology.find_platform(del.target);
                break;
            }
        }
        if (move.component == nullptr || move.new_platform == nullptr)
            throw PlanError(PlanError::Code::NoMigrationPair,
                            "migrateTo endpoints of '" + rel.source + "' do not name a "
                            "component and a platform");
        if (move.old_platform == nullptr)
            throw PlanError(PlanError::Code::NoMigrationPair,
                            "migrateTo from '" + rel.source +
                                "' has no deleteFrom naming the old platform");
        moves.emplace(rel.source, move);
    }
    return moves;
}

// For new-host generation, a migrating component is hosted on its migrateTo
// target; migrate edges are dropped, deleteFrom edges are kept so the bundle
// carries termination scripts.
Topology migration_view(const Topology& topology, const std::map<std::string, Move>& moves) {
    Topology derived = topology;
    derived.relationships.clear();
    for (const auto& rel : topology.relationships) {
        if (rel.kind == RelationKind::MigrateTo) continue;
        if (rel.kind == RelationKind::HostedOn && moves.count(rel.source)) continue;
        derived.relationships.push_back(rel);
    }
    for (const auto& [component_id, move] : moves)
        derived.relationships.push_back(
            Relationship{RelationKind::HostedOn, component_id, move.new_platform->id, {}});
    return derived;
}

} // namespace

std::string to_string(Action a) {
    switch (a) {
    case Action::Provision: return "provision";
    case Action::WaitSsh: return "waitssh";
    case Action::Configure: return "configure";
    case Action::Start: return "start";
    case Action::Terminate: return "terminate";
    case Action::Checkpoint: return "checkpoint";
    case Action::Restore: return "restore";
    case Action::AttachLb: return "attachlb";
    case Action::DetachLb: return "detachlb";
    case Action::Redirect: return "redirect";
    }
    return "?";
}

std::optional<Action> parse_action(std::string_view s) {
    static const std::pair<const char*, Action> table[] = {
        {"provision", Action::Provision}, {"waitssh", Action::WaitSsh},
        {"configure", Action::Configure}, {"start", Action::Start},
        {"terminate", Action::Terminate}, {"checkpoint", Action::Checkpoint},
        {"restore", Action::Restore},     {"attachlb", Action::AttachLb},
        {"detachlb", Action::DetachLb},   {"redirect", Action::Redirect},
    };
    for (const auto& [name, action] : table)
        if (s == name) return action;
    return std::nullopt;
}

std::string step_id(Action a, const std::string& subject) {
    return to_string(a) + ":" + subject;
}

const Step* Plan::find(std::string_view id) const {
    for (const auto& step : steps)
        if (step.id == id) return &step;
    return nullptr;
}

bool Plan::has_edge(std::string_view before, std::string_view after) const {
    for (const auto& [b, a] : edges)
        if (b == before && a == after) return true;
    return false;
}

Plan plan_deploy(const Topology& topology, const IacBundle& bundle) {
    (void)bundle; // payloads are path references; the bundle fixes their layout
    PlanBuilder builder;
    for (const auto& [component_id, platform] : hosted_components(topology))
        component_chain(builder, component_id, *platform);
    connects_to_edges(builder, topology);
    return builder.finish();
}

Plan plan_migrate(const Topology& topology, const KnowledgeBase& kb,
                  const TemplateLibrary& templates) {
    std::map<std::string, Move> moves = collect_moves(topology);
    if (moves.empty())
        throw PlanError(PlanError::Code::NoMigrationPair,
                        "topology contains no migrateTo relationship");

    // Same generation path as deployment, aimed at the new hosts.
    Topology derived = migration_view(topology, moves);
    (void)generate_bundle(derived, kb, templates);

    PlanBuilder builder;
    for (const auto& [component_id, move] : moves) {
        component_chain(builder, component_id, *move.new_platform);
        builder.add(Action::Terminate, move.old_platform->id,
                    terminate_payload(*move.old_platform));

        if (move.type == MigrationType::Stateful) {
            std::string lb = component_id + "-lb";
            builder.add(Action::AttachLb, lb, "");
            std::string head = move.new_platform->provider == Provider::PreDeployed
                                   ? step_id(Action::WaitSsh, move.new_platform->id)
                                   : step_id(Action::Provision, move.new_platform->id);
            builder.edge(step_id(Action::AttachLb, lb), head);

            builder.add(Action::Redirect, lb, "");
            builder.add(Action::Checkpoint, component_id, "hooks/checkpoint_" + component_id + ".sh");
            builder.add(Action::Restore, component_id, "hooks/restore_" + component_id + ".sh");
            builder.add(Action::DetachLb, lb, "");

            builder.edge(Action::Start, component_id, Action::Redirect, lb);
            builder.edge(step_id(Action::Redirect, lb), step_id(Action::Checkpoint, component_id));
            builder.edge(Action::Checkpoint, component_id, Action::Restore, component_id);
            builder.edge(Action::Restore, component_id, Action::Terminate, move.old_platform->id);
            builder.edge(step_id(Action::Restore, component_id), step_id(Action::DetachLb, lb));
        }
        // Stateless moves leave Terminate(old) unordered: deletion and
        // migration run in parallel.
    }
    connects_to_edges(builder, topology);
    return builder.finish();
}

Plan plan_delta(const Topology& baseline, const Topology& updated, const KnowledgeBase& kb,
                const TemplateLibrary& templates) {
    auto unsupported = [](const std::string& msg) {
        throw PlanError(PlanError::Code::UnsupportedDelta, msg);
    };

    for (const auto& c : baseline.components) {
        const ComponentNode* now = updated.find_component(c.id);
        if (now == nullptr)
            unsupported("component '" + c.id + "' was removed; express removals via deleteFrom");
        if (!(*now == c))
            unsupported("component '" + c.id + "' changed in place; model changes as add/remove");
    }
    for (const auto& p : baseline.platforms) {
        const PlatformNode* now = updated.find_platform(p.id);
        if (now == nullptr)
            unsupported("platform '" + p.id + "' was removed; express removals via deleteFrom");
        if (!(*now == p))
            unsupported("platform '" + p.id + "' changed in place; model changes as add/remove");
    }
    for (const auto& rel : baseline.relationships) {
        bool present = std::any_of(updated.relationships.begin(), updated.relationships.end(),
                                   [&](const Relationship& r) { return r == rel; });
        if (!present)
            unsupported("relationship '" + rel.source + " " + to_string(rel.kind) + " " +
                        rel.target + "' was removed");
    }

    auto is_new_rel = [&](const Relationship& rel) {
        return std::none_of(baseline.relationships.begin(), baseline.relationships.end(),
                            [&](const Relationship& r) {
                                return r.kind == rel.kind && r.source == rel.source &&
                                       r.target == rel.target;
                            });
    };
    std::set<std::string> new_components;
    for (const auto& c : updated.components)
        if (baseline.find_component(c.id) == nullptr) new_components.insert(c.id);
    std::set<std::string> new_platforms;
    for (const auto& p : updated.platforms)
        if (baseline.find_platform(p.id) == nullptr) new_platforms.insert(p.id);

    for (const auto& rel : updated.relationships) {
        if (!is_new_rel(rel)) continue;
        if (rel.kind == RelationKind::MigrateTo)
            unsupported("adding migrateTo is a migration; use the migration planner");
        if (rel.kind == RelationKind::HostedOn && !new_components.count(rel.source))
            unsupported("component '" + rel.source +
                        "' changed placement; relocations are migrations");
    }

    (void)generate_bundle(updated, kb, templates);

    PlanBuilder builder;
    for (const std::string& component_id : new_components) {
        const PlatformNode* p = hosting_platform(updated, component_id);
        if (p == nullptr) continue; // a migration-exempt source deploys nothing here
        bool platform_preexists = new_platforms.count(p->id) == 0;
        // pre-existing hosts were provisioned by the previous rollout
        std::string wait_id = host_chain(builder, *p, platform_preexists);
        configure_start_chain(builder, component_id, wait_id);
    }
    for (const std::string& platform_id : new_platforms) {
        const PlatformNode* p = updated.find_platform(platform_id);
        if (p->provider != Provider::PreDeployed) host_chain(builder, *p, false);
    }

    for (const auto& rel : updated.relationships) {
        if (!is_new_rel(rel)) continue;
        if (rel.kind == RelationKind::ConnectsTo) {
            if (updated.find_component(rel.source) == nullptr ||
                updated.find_component(rel.target) == nullptr)
                continue;
            // ordering edges into steps that already ran use satisfied markers
            builder.add(Action::Start, rel.source, playbook_payload(rel.source),
                        !new_components.count(rel.source));
            builder.add(Action::Start, rel.target, playbook_payload(rel.target),
                        !new_components.count(rel.target));
            builder.edge(Action::Start, rel.target, Action::Start, rel.source);
        } else if (rel.kind == RelationKind::DeleteFrom) {
            const PlatformNode* p = updated.find_platform(rel.target);
            if (p != nullptr) builder.add(Action::Terminate, p->id, terminate_payload(*p));
        }
    }
    return builder.finish();
}

void ensure_acyclic(const Plan& plan) {
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> successors;
    for (const auto& step : plan.steps) indegree[step.id] = 0;
    for (const auto& [before, after] : plan.edges) {
        if (!indegree.count(before) || !indegree.count(after))
            throw PlanError(PlanError::Code::CyclicPlan,
                            "edge (" + before + ", " + after + ") names an unknown step");
        successors[before].push_back(after);
        ++indegree[after];
    }
    std::vector<std::string> ready;
    for (const auto& [id, degree] : indegree)
        if (degree == 0) ready.push_back(id);
    std::size_t visited = 0;
    while (!ready.empty()) {
        std::string id = ready.back();
        ready.pop_back();
        ++visited;
        for (const std::string& next : successors[id])
            if (--indegree[next] == 0) ready.push_back(next);
    }
    if (visited != plan.steps.size())
        throw PlanError(PlanError::Code::CyclicPlan, "plan edges form a cycle");
}

std::string plan_to_json(const Plan& plan) {
    nlohmann::json doc;
    doc["steps"] = nlohmann::json::array();
    auto steps = plan.steps;
    std::sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.id < b.id; });
    for (const auto& step : steps)
        doc["steps"].push_back({{"id", step.id},
                                {"action", to_string(step.action)},
                                {"subject", step.subject},
                                {"payload", step.payload},
                                {"satisfied", step.already_satisfied}});
    doc["edges"] = nlohmann::json::array();
    auto edges = plan.edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& [before, after] : edges)
        doc["edges"].push_back({{"before", before}, {"after", after}});
    return doc.dump(2) + "\n";
}

Plan plan_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    Plan plan;
    for (const auto& s : doc.at("steps")) {
        Step step;
        step.id = s.at("id").get<std::string>();
        auto action = parse_action(s.at("action").get<std::string>());
        if (!action) throw Error("unknown action '" + s.at("action").get<std::string>() + "'");
        step.action = *action;
        step.subject = s.at("subject").get<std::string>();
        step.payload = s.value("payload", std::string());
        step.already_satisfied = s.value("satisfied", false);
        plan.steps.push_back(std::move(step));
    }
    for (const auto& e : doc.at("edges"))
        plan.edges.emplace_back(e.at("before").get<std::string>(),
                                e.at("after").get<std::string>());
    return plan;
}

std::string plan_to_dot(const Plan& plan) {
    std::ostringstream os;
    os << "digraph plan {\n  rankdir=LR;\n";
    auto steps = plan.steps;
    std::sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.id < b.id; });
    for (const auto& step : steps) {
        os << "  \"" << step.id << "\" [label=\"" << to_string(step.action) << "\\n"
           << step.subject << "\"";
        if (step.already_satisfied) os << " style=dashed";
        os << "];\n";
    }
    auto edges = plan.edges;
    std::sort(edges.begin(), edges.end());
    for (const auto& [before, after] : edges)
        os << "  \"" << before << "\" -> \"" << after << "\";\n";
    os << "}\n";
    return os.str();
}

} // namespace camp
