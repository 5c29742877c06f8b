#include "camp/templates.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "camp/errors.hpp"

namespace camp {

namespace {

[[noreturn]] void bad(const std::string& origin, const std::string& msg) {
    throw GenerateError(GenerateError::Code::BadTemplate, origin + ": " + msg);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GenerateError(GenerateError::Code::BadTemplate,
                                 "cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Minimal TOML subset used by template manifests: [sections], quoted string
// values, optionally quoted keys, # comments.
class ManifestParser {
public:
    ManifestParser(const std::string& text, std::string origin)
        : origin_(std::move(origin)) {
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        std::string section;
        while (std::getline(in, line)) {
            ++line_no;
            strip(line);
            if (line.empty() || line[0] == '#') continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(line_no, "unterminated section header");
                section = line.substr(1, line.size() - 2);
                sections_.insert(section);
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) fail(line_no, "expected key = \"value\"");
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            strip(key);
            strip(value);
            key = unquote(key, line_no);
            if (value.size() < 2 || value.front() != '"' || value.back() != '"')
                fail(line_no, "values must be double-quoted strings");
            value = unquote(value, line_no);
            entries_[section].emplace_back(key, value);
        }
    }

    const std::vector<std::pair<std::string, std::string>>& section(const std::string& name) const {
        static const std::vector<std::pair<std::string, std::string>> empty;
        auto it = entries_.find(name);
        return it == entries_.end() ? empty : it->second;
    }

    std::string value(const std::string& section_name, const std::string& key,
                      const std::string& fallback = "") const {
        for (const auto& [k, v] : section(section_name))
            if (k == key) return v;
        return fallback;
    }

private:
    [[noreturn]] void fail(int line, const std::string& msg) const {
        bad(origin_ + ":" + std::to_string(line), msg);
    }

    static void strip(std::string& s) {
        auto not_space = [](unsigned char c) { return !std::isspace(c); };
        s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
        s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    }

    std::string unquote(const std::string& s, int line_no) const {
        if (s.empty()) fail(line_no, "empty key");
        if (s.front() != '"') return s;
        if (s.size() < 2 || s.back() != '"') fail(line_no, "unterminated string");
        std::string out;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == '\\' && i + 2 < s.size()) ++i;
            out.push_back(s[i]);
        }
        return out;
    }

    std::string origin_;
    std::set<std::string> sections_;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> entries_;
};

void scan_placeholders(const std::string& text, std::vector<std::string>& out) {
    std::size_t pos = 0;
    while ((pos = text.find("{{", pos)) != std::string::npos) {
        auto end = text.find("}}", pos + 2);
        if (end == std::string::npos) return;
        out.push_back(text.substr(pos + 2, end - pos - 2));
        pos = end + 2;
    }
}

TemplateManifest parse_manifest(const std::string& text, const std::string& origin) {
    ManifestParser toml(text, origin);
    TemplateManifest manifest;
    manifest.kind = toml.value("template", "kind");
    manifest.engine = toml.value("template", "engine");
    manifest.origin = toml.value("template", "origin");
    if (manifest.kind.empty() || manifest.engine.empty())
        bad(origin, "[template] must declare kind and engine");

    for (const auto& [name, source] : toml.section("placeholders")) {
        PlaceholderSource ps;
        if (source.rfind("attr:", 0) == 0) {
            ps.kind = PlaceholderSource::Kind::Attribute;
            ps.name = source.substr(5);
        } else if (source.rfind("builtin:", 0) == 0) {
            ps.kind = PlaceholderSource::Kind::Builtin;
            ps.name = source.substr(8);
            if (!is_builtin_placeholder(ps.name))
                bad(origin, "unknown builtin placeholder '" + ps.name + "'");
        } else {
            bad(origin, "placeholder '" + name + "' must map to attr:<name> or builtin:<name>");
        }
        if (ps.name.empty()) bad(origin, "placeholder '" + name + "' has an empty source");
        manifest.placeholders[name] = ps;
    }

    for (const auto& [asset, dest] : toml.section("files")) {
        if (dest.empty() || dest.front() != '/')
            bad(origin, "asset '" + asset + "' needs an absolute destination path");
        manifest.files[asset] = dest;
    }
    return manifest;
}

} // namespace

bool is_builtin_placeholder(const std::string& name) {
    return name == "component_id" || name == "host_group" || name == "files_dir";
}

std::vector<std::string> collect_placeholders(const Playbook& playbook) {
    std::vector<std::string> names;
    auto scan_task = [&](const Task& task) {
        scan_placeholders(task.name, names);
        for (const auto& [k, v] : task.args) scan_placeholders(v, names);
    };
    for (const Play& play : playbook.plays) {
        scan_placeholders(play.name, names);
        scan_placeholders(play.hosts, names);
        for (const Task& task : play.tasks) scan_task(task);
        for (const Task& task : play.handlers) scan_task(task);
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw GenerateError(GenerateError::Code::BadTemplate,
                            "template directory '" + dir.string() + "' does not exist");

    std::vector<std::filesystem::path> template_dirs;
    for (const auto& kind_entry : std::filesystem::directory_iterator(dir)) {
        if (!kind_entry.is_directory()) continue;
        for (const auto& engine_entry : std::filesystem::directory_iterator(kind_entry.path())) {
            if (!engine_entry.is_directory()) continue;
            template_dirs.push_back(engine_entry.path());
        }
    }
    std::sort(template_dirs.begin(), template_dirs.end());

    TemplateLibrary library;
    for (const auto& tdir : template_dirs) {
        std::string origin = tdir.string();
        AppTemplate tpl;
        tpl.manifest = parse_manifest(read_file(tdir / "manifest.toml"), origin + "/manifest.toml");

        std::string expected_kind = tdir.parent_path().filename().string();
        std::string expected_engine = tdir.filename().string();
        if (tpl.manifest.kind != expected_kind || tpl.manifest.engine != expected_engine)
            bad(origin, "manifest (kind, engine) must match the directory layout");

        tpl.skeleton = playbook_from_yaml(read_file(tdir / "template.yml"), origin + "/template.yml");
        if (tpl.skeleton.plays.empty()) bad(origin, "template.yml declares no plays");

        for (const std::string& name : collect_placeholders(tpl.skeleton))
            if (!tpl.manifest.placeholders.count(name))
                bad(origin, "placeholder '{{" + name + "}}' is not documented in manifest.toml");

        for (const auto& [asset, dest] : tpl.manifest.files) {
            auto path = tdir / "files" / asset;
            if (!std::filesystem::exists(path))
                bad(origin, "manifest lists asset '" + asset + "' but files/" + asset +
                                " is missing");
            tpl.assets[asset] = read_file(path);
        }

        library.templates_.emplace(std::make_pair(tpl.manifest.kind, tpl.manifest.engine),
                                   std::move(tpl));
    }
    return library;
}

const AppTemplate* TemplateLibrary::find(const std::string& kind,
                                         const std::string& engine) const {
    auto it = templates_.find(std::make_pair(kind, engine));
    return it == templates_.end() ? nullptr : &it->second;
}

} // namespace camp
