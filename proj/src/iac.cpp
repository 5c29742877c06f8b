#include "camp/iac.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace camp {

namespace {

bool secret_name(const std::string& name) {
    return name.find("pass") != std::string::npos ||
           name.find("secret") != std::string::npos || name.find("key") != std::string::npos;
}

std::string shell_quote(const std::string& v) {
    std::string out = "'";
    for (char c : v) {
        if (c == '\'')
            out += "'\\''";
        else
            out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

std::string require_attr(const ComponentNode& c, const char* name) {
    auto v = c.attribute(name);
    if (!v || v->empty())
        throw GenerateError(GenerateError::Code::MissingAttribute,
                            "component '" + c.id + "' is missing attribute '" + name + "'");
    return *v;
}

std::string install_module(const std::string& pkg_mgr) {
    if (pkg_mgr == "apt") return "apt";
    if (pkg_mgr == "yum") return "yum";
    if (pkg_mgr == "pip") return "pip";
    if (pkg_mgr == "choco") return "win_chocolatey";
    return pkg_mgr;
}

// Replaces {{name}} placeholders via the manifest mapping. Returns the text
// with every placeholder substituted; unresolvable names raise
// UnboundPlaceholder.
std::string substitute(const std::string& text, const ComponentNode& component,
                       const TemplateManifest& manifest, const std::string& files_dir,
                       std::vector<SecretUse>* secrets) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            return out;
        }
        auto close = text.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(text, pos, std::string::npos);
            return out;
        }
        out.append(text, pos, open - pos);
        std::string name = text.substr(open + 2, close - open - 2);
        auto it = manifest.placeholders.find(name);
        if (it == manifest.placeholders.end())
            throw GenerateError(GenerateError::Code::UnboundPlaceholder,
                                "placeholder '" + name + "' is not documented in the manifest");
        const PlaceholderSource& source = it->second;
        if (source.kind == PlaceholderSource::Kind::Builtin) {
            if (source.name == "component_id" || source.name == "host_group")
                out += component.id;
            else
                out += files_dir;
        } else {
            auto value = component.attribute(source.name);
            if (!value || value->empty())
                throw GenerateError(GenerateError::Code::UnboundPlaceholder,
                                    "placeholder '" + name + "' is unbound: component '" +
                                        component.id + "' has no attribute '" + source.name +
                                        "'");
            out += *value;
            if (secrets && secret_name(source.name))
                secrets->push_back(SecretUse{component.id, source.name});
        }
        pos = close + 2;
    }
}

std::string kind_token(ComponentKind kind) { return to_string(kind); }

void append_flag(std::ostringstream& os, const char* flag,
                 const std::optional<std::string>& value) {
    if (value) os << " \\\n  " << flag << " " << shell_quote(*value);
}

} // namespace

AppBinding app_binding(const ComponentNode& component) {
    AppBinding binding;
    switch (component.kind) {
    case ComponentKind::Web: {
        binding.engine = require_attr(component, "webengine");
        std::string language = require_attr(component, "language");
        binding.app_name = language + "-web";
        binding.apptype = language;
        break;
    }
    case ComponentKind::Database: {
        std::string db = require_attr(component, "dbengine");
        binding.engine = db;
        binding.app_name = db;
        binding.apptype = db;
        break;
    }
    case ComponentKind::DataAnalytics: {
        binding.engine = require_attr(component, "process_engine");
        binding.app_name = binding.engine;
        binding.apptype = require_attr(component, "language");
        break;
    }
    }
    return binding;
}

std::vector<std::string> platform_hosts(const PlatformNode& platform) {
    if (platform.provider == Provider::PreDeployed) return {*platform.address};
    std::vector<std::string> hosts;
    for (int i = 1; i <= platform.instance_count; ++i)
        hosts.push_back(platform.id + "-" + std::to_string(i));
    return hosts;
}

std::string generate_provision(const PlatformNode& platform) {
    if (platform.provider == Provider::PreDeployed)
        throw GenerateError(GenerateError::Code::MissingAttribute,
                            "pre-deployed platform '" + platform.id + "' needs no provisioning");
    if (platform.provider == Provider::OpenStack &&
        (!platform.image_name || platform.image_name->empty()))
        throw GenerateError(GenerateError::Code::MissingAttribute,
                            "platform '" + platform.id + "' is missing attribute 'image_name'");

    std::ostringstream os;
    os << "#!/bin/sh\n";
    os << "# Provisioning for platform '" << platform.id << "' (" << to_string(platform.provider)
       << ").\n";
    os << "set -eu\n\n";
    os << "cloudctl " << to_string(platform.provider) << " create-server \\\n  --name "
       << shell_quote(platform.id);
    os << " \\\n  --os " << shell_quote(to_string(platform.os_type) + " " + platform.os_version);
    append_flag(os, "--image", platform.image_name);
    append_flag(os, "--flavor", platform.flavor);
    append_flag(os, "--network", platform.network);
    append_flag(os, "--security-group", platform.security_group);
    append_flag(os, "--key-name", platform.key_name);
    os << " \\\n  --count " << platform.instance_count;
    os << "\n";
    return os.str();
}

std::string generate_terminate(const PlatformNode& platform) {
    if (platform.provider == Provider::PreDeployed)
        throw GenerateError(GenerateError::Code::MissingAttribute,
                            "pre-deployed platform '" + platform.id + "' cannot be terminated");
    std::ostringstream os;
    os << "#!/bin/sh\n";
    os << "# Termination for platform '" << platform.id << "' (" << to_string(platform.provider)
       << ").\n";
    os << "set -eu\n\n";
    os << "cloudctl " << to_string(platform.provider) << " delete-server --name "
       << shell_quote(platform.id) << "\n";
    return os.str();
}

Playbook generate_config(const ComponentNode& component, const std::string& os_type,
                         const std::string& os_version, const PackageResolution& resolution,
                         const TemplateLibrary& templates, std::vector<SecretUse>* secrets) {
    std::string kind = kind_token(component.kind);
    AppBinding binding = app_binding(component);
    const AppTemplate* tpl = templates.find(kind, binding.engine);
    if (tpl == nullptr)
        throw GenerateError(GenerateError::Code::NoTemplate,
                            "no template for (" + kind + ", " + binding.engine + ")");

    std::string files_dir = "../files/" + binding.engine;

    Playbook playbook;
    for (const Play& play : tpl->skeleton.plays) {
        Play out;
        out.name = substitute(play.name, component, tpl->manifest, files_dir, secrets);
        out.hosts = substitute(play.hosts, component, tpl->manifest, files_dir, secrets);
        out.become = play.become;
        auto fill_task = [&](const Task& task) {
            Task t;
            t.name = substitute(task.name, component, tpl->manifest, files_dir, secrets);
            t.module = task.module;
            for (const auto& [key, value] : task.args)
                t.args.emplace_back(key,
                                    substitute(value, component, tpl->manifest, files_dir, secrets));
            return t;
        };
        for (const Task& task : play.tasks) out.tasks.push_back(fill_task(task));
        for (const Task& task : play.handlers) out.handlers.push_back(fill_task(task));
        playbook.plays.push_back(std::move(out));
    }

    // Install tasks come first, then asset copies, then the template's own
    // configuration and service tasks.
    std::vector<Task> prologue;
    for (const PackageStep& step : resolution.steps) {
        Task t;
        t.name = "install " + step.pkg_name + " via " + step.pkg_mgr;
        t.module = install_module(step.pkg_mgr);
        t.args = {{"name", step.pkg_name}, {"state", "present"}};
        prologue.push_back(std::move(t));
    }
    for (const auto& [asset, dest] : tpl->manifest.files) {
        Task t;
        t.name = "copy " + asset;
        t.module = "copy";
        t.args = {{"src", files_dir + "/" + asset}, {"dest", dest}};
        prologue.push_back(std::move(t));
    }
    Play& first = playbook.plays.front();
    first.tasks.insert(first.tasks.begin(), prologue.begin(), prologue.end());

    // The play name records which OS the package closure was resolved for.
    first.name += " [" + os_type + " " + os_version + "]";
    return playbook;
}

IacBundle generate_bundle(const Topology& topology, const KnowledgeBase& kb,
                          const TemplateLibrary& templates) {
    IacBundle bundle;
    std::map<std::string, std::string> failures; // node id -> message

    std::map<std::string, const PlatformNode*> hosts; // component id -> platform
    for (const auto& c : topology.components) {
        try {
            const PlatformNode* p = hosting_platform(topology, c.id);
            if (p != nullptr) hosts.emplace(c.id, p);
        } catch (const Error& e) {
            failures.emplace(c.id, e.what());
        }
    }

    std::set<const PlatformNode*> used;
    for (const auto& [component_id, platform] : hosts) {
        const ComponentNode& c = *topology.find_component(component_id);
        try {
            AppBinding binding = app_binding(c);
            PackageResolution resolution =
                kb.resolve(binding.app_name, binding.apptype, to_string(platform->os_type),
                           platform->os_version);
            bundle.playbooks[c.id] = generate_config(c, to_string(platform->os_type),
                                                     platform->os_version, resolution, templates,
                                                     &bundle.secrets);
            bundle.inventory[c.id] = platform_hosts(*platform);
            const AppTemplate* tpl = templates.find(kind_token(c.kind), binding.engine);
            for (const auto& [asset, bytes] : tpl->assets)
                bundle.files["files/" + binding.engine + "/" + asset] = bytes;
            used.insert(platform);
        } catch (const Error& e) {
            failures.emplace(c.id, e.what());
        }
    }

    for (const PlatformNode* p : used) {
        if (p->provider == Provider::PreDeployed) continue;
        try {
            bundle.provision_scripts[p->id] = generate_provision(*p);
        } catch (const Error& e) {
            failures.emplace(p->id, e.what());
        }
    }

    for (const auto& rel : topology.relationships) {
        if (rel.kind != RelationKind::DeleteFrom) continue;
        const PlatformNode* p = topology.find_platform(rel.target);
        if (p == nullptr || p->provider == Provider::PreDeployed) continue;
        if (bundle.terminate_scripts.count(p->id)) continue;
        try {
            bundle.terminate_scripts[p->id] = generate_terminate(*p);
        } catch (const Error& e) {
            failures.emplace(p->id, e.what());
        }
    }

    if (!failures.empty()) {
        std::ostringstream os;
        bool first = true;
        for (const auto& [node, msg] : failures) {
            if (!first) os << "; ";
            os << node << ": " << msg;
            first = false;
        }
        throw GenerateError(GenerateError::Code::Aggregate, os.str());
    }

    std::sort(bundle.secrets.begin(), bundle.secrets.end());
    bundle.secrets.erase(std::unique(bundle.secrets.begin(), bundle.secrets.end()),
                         bundle.secrets.end());
    return bundle;
}

std::string render_inventory(const IacBundle& bundle) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [group, hosts] : bundle.inventory) {
        if (!first) os << "\n";
        os << "[" << group << "]\n";
        for (const auto& host : hosts) os << host << "\n";
        first = false;
    }
    return os.str();
}

std::string bundle_manifest_json(const IacBundle& bundle) {
    nlohmann::json manifest;
    manifest["playbooks"] = nlohmann::json::object();
    for (const auto& [id, playbook] : bundle.playbooks)
        manifest["playbooks"][id] = "playbooks/" + id + ".yml";
    manifest["provision"] = nlohmann::json::object();
    for (const auto& [id, script] : bundle.provision_scripts)
        manifest["provision"][id] = "provision/" + id + ".sh";
    manifest["terminate"] = nlohmann::json::object();
    for (const auto& [id, script] : bundle.terminate_scripts)
        manifest["terminate"][id] = "terminate/" + id + ".sh";
    manifest["files"] = nlohmann::json::array();
    for (const auto& [path, bytes] : bundle.files) manifest["files"].push_back(path);
    manifest["inventory_groups"] = nlohmann::json::array();
    for (const auto& [group, hosts] : bundle.inventory)
        manifest["inventory_groups"].push_back(group);
    manifest["secrets"] = nlohmann::json::array();
    for (const auto& secret : bundle.secrets)
        manifest["secrets"].push_back({{"node", secret.node}, {"attribute", secret.attribute}});
    return manifest.dump(2) + "\n";
}

std::vector<std::pair<std::string, std::string>> bundle_documents(const IacBundle& bundle) {
    std::vector<std::pair<std::string, std::string>> docs;
    docs.emplace_back("inventory", render_inventory(bundle));
    docs.emplace_back("manifest.json", bundle_manifest_json(bundle));
    for (const auto& [id, playbook] : bundle.playbooks)
        docs.emplace_back("playbooks/" + id + ".yml", render_yaml(playbook));
    for (const auto& [id, script] : bundle.provision_scripts)
        docs.emplace_back("provision/" + id + ".sh", script);
    for (const auto& [id, script] : bundle.terminate_scripts)
        docs.emplace_back("terminate/" + id + ".sh", script);
    for (const auto& [path, bytes] : bundle.files) docs.emplace_back(path, bytes);
    std::sort(docs.begin(), docs.end());
    return docs;
}

void write_bundle(const IacBundle& bundle, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::path parent = out_dir.has_parent_path() ? out_dir.parent_path() : fs::path(".");
    fs::create_directories(parent);

    fs::path staging = parent / (out_dir.filename().string() + ".staging");
    fs::remove_all(staging);
    fs::create_directories(staging);

    for (const auto& [rel_path, bytes] : bundle_documents(bundle)) {
        fs::path target = staging / rel_path;
        fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary);
        if (!out) throw Error("cannot write '" + target.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }

    fs::remove_all(out_dir);
    fs::rename(staging, out_dir);
}

} // namespace camp
