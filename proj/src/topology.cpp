#include "camp/topology.hpp"

#include <algorithm>
#include <sstream>

namespace camp {

std::string to_string(const SourceSpan& span) {
    std::ostringstream os;
    os << span.file << ":" << span.line << ":" << span.column;
    return os.str();
}

ParseError::ParseError(Code code, SourceSpan span, const std::string& msg)
    : Error(to_string(span) + ": " + msg), code_(code), span_(std::move(span)) {}

RuleParseError::RuleParseError(int line, const std::string& msg)
    : Error("rules:" + std::to_string(line) + ": " + msg), line_(line) {}

std::string to_string(ComponentKind k) {
    switch (k) {
    case ComponentKind::Web: return "web";
    case ComponentKind::Database: return "database";
    case ComponentKind::DataAnalytics: return "dataanalytics";
    }
    return "?";
}

std::string to_string(Provider p) {
    switch (p) {
    case Provider::OpenStack: return "openstack";
    case Provider::Amazon: return "amazon";
    case Provider::Azure: return "azure";
    case Provider::PreDeployed: return "predeployed";
    }
    return "?";
}

std::string to_string(OsType o) {
    switch (o) {
    case OsType::Ubuntu: return "ubuntu";
    case OsType::RedHat: return "redhat";
    case OsType::Windows: return "windows";
    }
    return "?";
}

std::string to_string(RelationKind k) {
    switch (k) {
    case RelationKind::HostedOn: return "hostedOn";
    case RelationKind::ConnectsTo: return "connectsTo";
    case RelationKind::DeleteFrom: return "deleteFrom";
    case RelationKind::MigrateTo: return "migrateTo";
    }
    return "?";
}

std::string to_string(MigrationType m) {
    return m == MigrationType::Stateful ? "stateful" : "stateless";
}

std::optional<ComponentKind> parse_component_kind(std::string_view s) {
    if (s == "web") return ComponentKind::Web;
    if (s == "database") return ComponentKind::Database;
    if (s == "dataanalytics") return ComponentKind::DataAnalytics;
    return std::nullopt;
}

std::optional<Provider> parse_provider(std::string_view s) {
    if (s == "openstack") return Provider::OpenStack;
    if (s == "amazon") return Provider::Amazon;
    if (s == "azure") return Provider::Azure;
    if (s == "predeployed") return Provider::PreDeployed;
    return std::nullopt;
}

std::optional<OsType> parse_os_type(std::string_view s) {
    if (s == "ubuntu") return OsType::Ubuntu;
    if (s == "redhat") return OsType::RedHat;
    if (s == "windows") return OsType::Windows;
    return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view s) {
    if (s == "hostedOn") return RelationKind::HostedOn;
    if (s == "connectsTo") return RelationKind::ConnectsTo;
    if (s == "deleteFrom") return RelationKind::DeleteFrom;
    if (s == "migrateTo") return RelationKind::MigrateTo;
    return std::nullopt;
}

std::optional<MigrationType> parse_migration_type(std::string_view s) {
    if (s == "stateless") return MigrationType::Stateless;
    if (s == "stateful") return MigrationType::Stateful;
    return std::nullopt;
}

const std::string* AttrMap::find(std::string_view name) const {
    for (const auto& [k, v] : items_)
        if (k == name) return &v;
    return nullptr;
}

void AttrMap::set(std::string name, std::string value) {
    for (auto& [k, v] : items_) {
        if (k == name) {
            v = std::move(value);
            return;
        }
    }
    items_.emplace_back(std::move(name), std::move(value));
}

std::optional<std::string> ComponentNode::attribute(std::string_view name) const {
    if (name == "source_ref") return source_ref;
    if (const std::string* v = attributes.find(name)) return *v;
    return std::nullopt;
}

const ComponentNode* Topology::find_component(std::string_view id) const {
    for (const auto& c : components)
        if (c.id == id) return &c;
    return nullptr;
}

const PlatformNode* Topology::find_platform(std::string_view id) const {
    for (const auto& p : platforms)
        if (p.id == id) return &p;
    return nullptr;
}

bool Topology::has_node(std::string_view id) const {
    return find_component(id) != nullptr || find_platform(id) != nullptr;
}

bool structurally_equal(const Topology& a, const Topology& b) {
    auto by_id = [](const auto& lhs, const auto& rhs) { return lhs.id < rhs.id; };

    auto ca = a.components;
    auto cb = b.components;
    std::sort(ca.begin(), ca.end(), by_id);
    std::sort(cb.begin(), cb.end(), by_id);
    if (ca != cb) return false;

    auto pa = a.platforms;
    auto pb = b.platforms;
    std::sort(pa.begin(), pa.end(), by_id);
    std::sort(pb.begin(), pb.end(), by_id);
    if (pa != pb) return false;

    return a.relationships == b.relationships;
}

const PlatformNode* hosting_platform(const Topology& t, std::string_view component_id) {
    if (t.find_component(component_id) == nullptr)
        throw ModelError(ModelError::Code::UnknownNode,
                         "no component named '" + std::string(component_id) + "'");

    const PlatformNode* found = nullptr;
    for (const auto& rel : t.relationships) {
        if (rel.kind != RelationKind::HostedOn || rel.source != component_id) continue;
        const PlatformNode* p = t.find_platform(rel.target);
        if (p == nullptr) continue; // endpoint-kind violations are the validator's business
        if (found != nullptr)
            throw ModelError(ModelError::Code::AmbiguousHosting,
                             "component '" + std::string(component_id) +
                                 "' has more than one hostedOn relationship");
        found = p;
    }
    return found;
}

std::set<std::string> start_dependencies(const Topology& t, std::string_view component_id) {
    if (t.find_component(component_id) == nullptr)
        throw ModelError(ModelError::Code::UnknownNode,
                         "no component named '" + std::string(component_id) + "'");

    std::set<std::string> deps;
    for (const auto& rel : t.relationships)
        if (rel.kind == RelationKind::ConnectsTo && rel.source == component_id)
            deps.insert(rel.target);
    return deps;
}

} // namespace camp
