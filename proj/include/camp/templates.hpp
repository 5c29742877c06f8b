#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "camp/playbook.hpp"

namespace camp {

/// Where a placeholder value comes from when a template is instantiated.
struct PlaceholderSource {
    enum class Kind { Attribute, Builtin } kind = Kind::Attribute;
    std::string name;

    friend bool operator==(const PlaceholderSource&, const PlaceholderSource&) = default;
};

/// Parsed manifest.toml of one application template.
struct TemplateManifest {
    std::string kind;   // component kind token: web, database, dataanalytics
    std::string engine; // template key within the kind
    std::string origin; // provenance note, free-form
    std::map<std::string, PlaceholderSource> placeholders;
    std::map<std::string, std::string> files; // asset name -> destination path
};

/// One template: the placeholder-bearing playbook skeleton plus companion
/// config assets.
struct AppTemplate {
    TemplateManifest manifest;
    Playbook skeleton;
    std::map<std::string, std::string> assets; // asset name -> file bytes
};

/// Template store loaded from `<dir>/<kind>/<engine>/{template.yml,
/// manifest.toml, files/}`. Every placeholder used in a template must be
/// documented in its manifest; undocumented placeholders fail the load.
class TemplateLibrary {
public:
    static TemplateLibrary load(const std::filesystem::path& dir);

    const AppTemplate* find(const std::string& kind, const std::string& engine) const;
    const std::map<std::pair<std::string, std::string>, AppTemplate>& all() const {
        return templates_;
    }

private:
    std::map<std::pair<std::string, std::string>, AppTemplate> templates_;
};

/// Names of the placeholders every template may use without declaring an
/// attribute: component_id, host_group, files_dir.
bool is_builtin_placeholder(const std::string& name);

/// Collects the `{{name}}` placeholders appearing anywhere in a playbook.
std::vector<std::string> collect_placeholders(const Playbook& playbook);

} // namespace camp
