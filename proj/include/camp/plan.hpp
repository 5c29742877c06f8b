#pragma once

#include <string>
#include <utility>
#include <vector>

#include "camp/iac.hpp"
#include "camp/knowledge_base.hpp"
#include "camp/templates.hpp"
#include "camp/topology.hpp"

namespace camp {

enum class Action {
    Provision,
    WaitSsh,
    Configure,
    Start,
    Terminate,
    Checkpoint,
    Restore,
    AttachLb,
    DetachLb,
    Redirect,
};

std::string to_string(Action a);
std::optional<Action> parse_action(std::string_view s);

/// One executable unit of work. `payload` references a document inside an
/// IacBundle (or a hook script name for checkpoint/restore); it may be empty
/// for steps with no document, such as waiting for SSH.
struct Step {
    std::string id; // "<action>:<subject>"
    Action action = Action::Provision;
    std::string subject;
    std::string payload;
    /// Marks work that already happened in a previous deployment; delta
    /// plans use these so ordering edges into pre-existing steps stay
    /// expressible.
    bool already_satisfied = false;

    friend bool operator==(const Step&, const Step&) = default;
};

/// Execution DAG. Steps without a connecting edge path may run concurrently.
struct Plan {
    std::vector<Step> steps;
    std::vector<std::pair<std::string, std::string>> edges; // (before, after)

    const Step* find(std::string_view id) const;
    bool has_edge(std::string_view before, std::string_view after) const;
};

/// Deterministic step id for an action/subject pair.
std::string step_id(Action a, const std::string& subject);

/// Deployment plan: per hosted component, Provision -> WaitSsh -> Configure
/// -> Start chained linearly (provisioning emitted once per platform), plus
/// one Start(b) -> Start(a) edge per connectsTo(a -> b). No other
/// cross-component edges exist, so unrelated work is concurrent.
Plan plan_deploy(const Topology& topology, const IacBundle& bundle);

/// Migration plan per (deleteFrom, migrateTo) pair. Stateless: the new-host
/// chain and the old-host termination run in parallel. Stateful: a load
/// balancer is attached, the new host is brought up and traffic redirected,
/// state is checkpointed on the old machine and restored on the new one, and
/// only then the old VM termination and the balancer detach run in parallel.
/// New-host IaC comes from the same generation path as deployment.
Plan plan_migrate(const Topology& topology, const KnowledgeBase& kb,
                  const TemplateLibrary& templates);

/// Continuous-delivery plan covering only the nodes and relationships added
/// in `updated` relative to `baseline`. Ordering edges into steps that
/// already ran are represented with already_satisfied markers. Throws
/// PlanError{UnsupportedDelta} for in-place attribute changes or removals
/// not expressed via deleteFrom.
Plan plan_delta(const Topology& baseline, const Topology& updated, const KnowledgeBase& kb,
                const TemplateLibrary& templates);

/// Throws PlanError{CyclicPlan} when the edge relation has a cycle.
void ensure_acyclic(const Plan& plan);

/// JSON document with `steps` and `edges` arrays (see docs/formats.md).
std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& text);

/// DOT digraph for inspection.
std::string plan_to_dot(const Plan& plan);

} // namespace camp
