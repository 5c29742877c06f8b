#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "camp/errors.hpp"

namespace camp {

enum class ComponentKind { Web, Database, DataAnalytics };
enum class Provider { OpenStack, Amazon, Azure, PreDeployed };
enum class OsType { Ubuntu, RedHat, Windows };
enum class RelationKind { HostedOn, ConnectsTo, DeleteFrom, MigrateTo };
enum class MigrationType { Stateless, Stateful };

std::string to_string(ComponentKind k);
std::string to_string(Provider p);
std::string to_string(OsType o);
std::string to_string(RelationKind k);
std::string to_string(MigrationType m);

std::optional<ComponentKind> parse_component_kind(std::string_view s);
std::optional<Provider> parse_provider(std::string_view s);
std::optional<OsType> parse_os_type(std::string_view s);
std::optional<RelationKind> parse_relation_kind(std::string_view s);
std::optional<MigrationType> parse_migration_type(std::string_view s);

/// Attribute bag preserving declaration order. Keys are lowercase
/// identifiers, values are non-empty strings.
class AttrMap {
public:
    using Item = std::pair<std::string, std::string>;

    const std::string* find(std::string_view name) const;
    bool has(std::string_view name) const { return find(name) != nullptr; }
    void set(std::string name, std::string value);
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }

    const std::vector<Item>& items() const { return items_; }

    friend bool operator==(const AttrMap&, const AttrMap&) = default;

private:
    std::vector<Item> items_;
};

/// One application building block (web app, database, analytics job).
struct ComponentNode {
    std::string id;
    ComponentKind kind = ComponentKind::Web;
    AttrMap attributes;
    std::optional<std::string> source_ref;

    /// Attribute lookup that also exposes source_ref under its field name.
    std::optional<std::string> attribute(std::string_view name) const;

    friend bool operator==(const ComponentNode&, const ComponentNode&) = default;
};

/// One execution environment (a cloud VM group or a pre-deployed machine).
struct PlatformNode {
    std::string id;
    Provider provider = Provider::OpenStack;
    OsType os_type = OsType::Ubuntu;
    std::string os_version;
    std::optional<std::string> image_name;
    std::optional<std::string> flavor;
    std::optional<std::string> network;
    std::optional<std::string> security_group;
    std::optional<std::string> key_name;
    int instance_count = 1;
    std::optional<std::string> address; // present iff provider == PreDeployed
    AttrMap extra;                      // open-ended keys (env_file, key_file, ...)

    friend bool operator==(const PlatformNode&, const PlatformNode&) = default;
};

struct Relationship {
    RelationKind kind = RelationKind::HostedOn;
    std::string source;
    std::string target;
    std::optional<MigrationType> migration; // required iff kind == MigrateTo

    friend bool operator==(const Relationship&, const Relationship&) = default;
};

/// The in-memory topology graph. Immutable after construction; every
/// relationship endpoint is guaranteed to name a declared node.
struct Topology {
    std::vector<ComponentNode> components;
    std::vector<PlatformNode> platforms;
    std::vector<Relationship> relationships; // declaration order

    const ComponentNode* find_component(std::string_view id) const;
    const PlatformNode* find_platform(std::string_view id) const;
    bool has_node(std::string_view id) const;
};

/// Structural equality: node sets compared irrespective of declaration
/// order, relationships compared as an ordered list.
bool structurally_equal(const Topology& a, const Topology& b);

/// Unique HostedOn target of a component, nullptr when it has none.
/// Throws ModelError{AmbiguousHosting} when more than one HostedOn edge
/// leaves the component, ModelError{UnknownNode} when the id is not a
/// component.
const PlatformNode* hosting_platform(const Topology& t, std::string_view component_id);

/// ConnectsTo targets of a component: the components that must start first.
std::set<std::string> start_dependencies(const Topology& t, std::string_view component_id);

} // namespace camp
