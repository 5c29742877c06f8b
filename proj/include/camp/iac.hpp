#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "camp/knowledge_base.hpp"
#include "camp/playbook.hpp"
#include "camp/templates.hpp"
#include "camp/topology.hpp"

namespace camp {

/// A secret-valued attribute substituted verbatim into a document.
struct SecretUse {
    std::string node;
    std::string attribute;

    friend bool operator==(const SecretUse&, const SecretUse&) = default;
    friend auto operator<=>(const SecretUse&, const SecretUse&) = default;
};

/// Generated automation artifacts for one topology, as an in-memory file
/// tree. Byte-deterministic for a given (topology, KB, template library).
struct IacBundle {
    std::map<std::string, Playbook> playbooks;              // component id -> playbook
    std::map<std::string, std::string> provision_scripts;   // platform id -> script
    std::map<std::string, std::string> terminate_scripts;   // platform id -> script
    std::map<std::string, std::vector<std::string>> inventory; // group -> hosts
    std::map<std::string, std::string> files;                // bundle path -> bytes
    std::vector<SecretUse> secrets;
};

/// How a component maps onto the knowledge base and template library.
struct AppBinding {
    std::string app_name; // swdependency key, e.g. "php-web", "mysql"
    std::string apptype;  // language/engine qualifier for the package join
    std::string engine;   // template key within the component kind
};

/// Derives the KB/template binding from the component's attributes.
/// Throws GenerateError{MissingAttribute} when a required attribute is
/// absent.
AppBinding app_binding(const ComponentNode& component);

/// Host addresses backing a platform: the declared address of a pre-deployed
/// machine, otherwise one synthetic entry per instance.
std::vector<std::string> platform_hosts(const PlatformNode& platform);

/// Provider-specific provisioning script declaring image, flavor, network,
/// security group, key, and instance count. Pre: provider != PreDeployed.
std::string generate_provision(const PlatformNode& platform);

/// Provider-specific termination script for a platform a component is being
/// deleted from. Pre: provider != PreDeployed.
std::string generate_terminate(const PlatformNode& platform);

/// Instantiates a component's template: package-install tasks per resolution
/// step, then config-asset copy tasks, then the template's own tasks with
/// every placeholder substituted. Throws GenerateError{NoTemplate,
/// UnboundPlaceholder}.
Playbook generate_config(const ComponentNode& component, const std::string& os_type,
                         const std::string& os_version, const PackageResolution& resolution,
                         const TemplateLibrary& templates,
                         std::vector<SecretUse>* secrets = nullptr);

/// Generates the full bundle for a validated topology: one playbook per
/// hosted component, one provisioning script per non-pre-deployed platform in
/// use, termination scripts for deleteFrom targets, inventory and config
/// assets. Per-node failures are aggregated into one
/// GenerateError{Aggregate}.
IacBundle generate_bundle(const Topology& topology, const KnowledgeBase& kb,
                          const TemplateLibrary& templates);

/// The bundle as (relative path, bytes) pairs, sorted by path. Includes the
/// rendered inventory and manifest.json.
std::vector<std::pair<std::string, std::string>> bundle_documents(const IacBundle& bundle);

/// INI-style host groups, one group per component.
std::string render_inventory(const IacBundle& bundle);

/// JSON index of the bundle contents and the secret substitutions.
std::string bundle_manifest_json(const IacBundle& bundle);

/// Writes the bundle under out_dir, replacing it atomically (the tree is
/// staged next to the target and renamed into place).
void write_bundle(const IacBundle& bundle, const std::filesystem::path& out_dir);

} // namespace camp
