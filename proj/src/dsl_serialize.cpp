#include "camp/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace camp {

namespace {

bool bare_safe(const std::string& v) {
    if (v.empty()) return false;
    for (char c : v) {
        bool ok = (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                   c == '-' || c == '/' || c == ':' || c == '@' || c == '+');
        if (!ok) return false;
    }
    return true;
}

std::string quote(const std::string& v) {
    std::string out = "\"";
    for (char c : v) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string value_text(const std::string& v) {
    return bare_safe(v) ? v : quote(v);
}

void emit_attr(std::ostringstream& os, const std::string& key, const std::string& value) {
    os << "  " << key << " = " << value_text(value) << ";\n";
}

void emit_platform(std::ostringstream& os, const PlatformNode& p) {
    os << "platform " << p.id << " {\n";
    emit_attr(os, "provider", to_string(p.provider));
    os << "  os = " << to_string(p.os_type) << " " << value_text(p.os_version) << ";\n";
    if (p.image_name) emit_attr(os, "image_name", *p.image_name);
    if (p.flavor) emit_attr(os, "flavor", *p.flavor);
    if (p.network) emit_attr(os, "network", *p.network);
    if (p.security_group) emit_attr(os, "security_group", *p.security_group);
    if (p.key_name) emit_attr(os, "key_name", *p.key_name);
    if (p.address) emit_attr(os, "address", *p.address);
    if (p.instance_count != 1) emit_attr(os, "instance_count", std::to_string(p.instance_count));
    for (const auto& [k, v] : p.extra.items()) emit_attr(os, k, v);
    os << "}\n";
}

void emit_component(std::ostringstream& os, const ComponentNode& c) {
    os << "component " << c.id << " {\n";
    emit_attr(os, "kind", to_string(c.kind));
    if (c.source_ref) emit_attr(os, "source_ref", *c.source_ref);
    for (const auto& [k, v] : c.attributes.items()) emit_attr(os, k, v);
    os << "}\n";
}

} // namespace

std::string serialize(const Topology& t) {
    std::ostringstream os;

    auto platforms = t.platforms;
    std::sort(platforms.begin(), platforms.end(),
              [](const PlatformNode& a, const PlatformNode& b) { return a.id < b.id; });
    auto components = t.components;
    std::sort(components.begin(), components.end(),
              [](const ComponentNode& a, const ComponentNode& b) { return a.id < b.id; });

    bool first = true;
    for (const auto& p : platforms) {
        if (!first) os << "\n";
        emit_platform(os, p);
        first = false;
    }
    for (const auto& c : components) {
        if (!first) os << "\n";
        emit_component(os, c);
        first = false;
    }
    if (!t.relationships.empty() && !first) os << "\n";
    for (const auto& rel : t.relationships) {
        os << rel.source << " " << to_string(rel.kind) << " " << rel.target;
        if (rel.kind == RelationKind::MigrateTo && rel.migration)
            os << " with migration=" << to_string(*rel.migration);
        os << ";\n";
    }
    return os.str();
}

} // namespace camp
