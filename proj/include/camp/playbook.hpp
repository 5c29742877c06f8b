#pragma once

#include <string>
#include <utility>
#include <vector>

namespace camp {

/// One automation task: a named module invocation with ordered scalar
/// arguments.
struct Task {
    std::string name;
    std::string module;
    std::vector<std::pair<std::string, std::string>> args;

    friend bool operator==(const Task&, const Task&) = default;
};

/// One play: ordered tasks plus handlers, executed against a host group.
struct Play {
    std::string name;
    std::string hosts;
    bool become = false;
    std::vector<Task> tasks;
    std::vector<Task> handlers;

    friend bool operator==(const Play&, const Play&) = default;
};

/// Neutral playbook tree. Generation works on this structure; the external
/// YAML form is produced in one final serialization step.
struct Playbook {
    std::vector<Play> plays;

    friend bool operator==(const Playbook&, const Playbook&) = default;
};

/// Renders the playbook as a YAML document compatible with the Ansible
/// playbook schema. Byte-deterministic for a given tree.
std::string render_yaml(const Playbook& playbook);

/// Parses a playbook document (used for template files). Each task map must
/// contain `name` plus exactly one module key whose value is a mapping of
/// scalars. Throws GenerateError{BadTemplate} on any other shape.
Playbook playbook_from_yaml(const std::string& text, const std::string& origin);

} // namespace camp
