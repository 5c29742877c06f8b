#include "camp/playbook.hpp"

#include <yaml-cpp/yaml.h>

#include "camp/errors.hpp"

namespace camp {

namespace {

void emit_task(YAML::Emitter& out, const Task& task) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << task.name;
    out << YAML::Key << task.module << YAML::Value << YAML::BeginMap;
    for (const auto& [key, value] : task.args)
        out << YAML::Key << key << YAML::Value << value;
    out << YAML::EndMap;
    out << YAML::EndMap;
}

[[noreturn]] void bad(const std::string& origin, const std::string& msg) {
    throw GenerateError(GenerateError::Code::BadTemplate, origin + ": " + msg);
}

Task task_from_node(const YAML::Node& node, const std::string& origin) {
    if (!node.IsMap()) bad(origin, "each task must be a mapping");
    Task task;
    bool have_module = false;
    for (const auto& entry : node) {
        auto key = entry.first.as<std::string>();
        if (key == "name") {
            task.name = entry.second.as<std::string>();
            continue;
        }
        if (have_module) bad(origin, "task '" + task.name + "' has more than one module key");
        have_module = true;
        task.module = key;
        if (!entry.second.IsMap())
            bad(origin, "module '" + key + "' arguments must be a mapping of scalars");
        for (const auto& arg : entry.second) {
            if (!arg.second.IsScalar())
                bad(origin, "module '" + key + "' arguments must be scalars");
            task.args.emplace_back(arg.first.as<std::string>(), arg.second.as<std::string>());
        }
    }
    if (!have_module) bad(origin, "task '" + task.name + "' names no module");
    return task;
}

} // namespace

std::string render_yaml(const Playbook& playbook) {
    YAML::Emitter out;
    out << YAML::BeginSeq;
    for (const Play& play : playbook.plays) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << play.name;
        out << YAML::Key << "hosts" << YAML::Value << play.hosts;
        if (play.become) out << YAML::Key << "become" << YAML::Value << true;
        out << YAML::Key << "tasks" << YAML::Value << YAML::BeginSeq;
        for (const Task& task : play.tasks) emit_task(out, task);
        out << YAML::EndSeq;
        if (!play.handlers.empty()) {
            out << YAML::Key << "handlers" << YAML::Value << YAML::BeginSeq;
            for (const Task& task : play.handlers) emit_task(out, task);
            out << YAML::EndSeq;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    return std::string(out.c_str()) + "\n";
}

Playbook playbook_from_yaml(const std::string& text, const std::string& origin) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        bad(origin, std::string("invalid yaml: ") + e.what());
    }
    if (root.IsNull() || !root.IsDefined()) return Playbook{};
    if (!root.IsSequence()) bad(origin, "a playbook is a sequence of plays");

    Playbook playbook;
    for (const auto& play_node : root) {
        if (!play_node.IsMap()) bad(origin, "each play must be a mapping");
        Play play;
        if (play_node["name"]) play.name = play_node["name"].as<std::string>();
        if (!play_node["hosts"]) bad(origin, "play '" + play.name + "' is missing 'hosts'");
        play.hosts = play_node["hosts"].as<std::string>();
        if (play_node["become"]) play.become = play_node["become"].as<bool>();
        for (const auto& entry : play_node) {
            auto key = entry.first.as<std::string>();
            if (key == "name" || key == "hosts" || key == "become" || key == "tasks" ||
                key == "handlers")
                continue;
            bad(origin, "unsupported play key '" + key + "'");
        }
        if (play_node["tasks"]) {
            if (!play_node["tasks"].IsSequence()) bad(origin, "'tasks' must be a sequence");
            for (const auto& t : play_node["tasks"]) play.tasks.push_back(task_from_node(t, origin));
        }
        if (play_node["handlers"]) {
            if (!play_node["handlers"].IsSequence()) bad(origin, "'handlers' must be a sequence");
            for (const auto& t : play_node["handlers"])
                play.handlers.push_back(task_from_node(t, origin));
        }
        playbook.plays.push_back(std::move(play));
    }
    return playbook;
}

} // namespace camp
