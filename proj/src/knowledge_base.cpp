#include "camp/knowledge_base.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace camp {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

class TableReader {
public:
    TableReader(const std::filesystem::path& dir, const std::string& name,
                const std::vector<std::string>& columns)
        : name_(name) {
        auto path = dir / (name + ".tsv");
        if (!std::filesystem::exists(path))
            throw KbError(KbError::Code::MissingTable, "missing table file '" + name + ".tsv'");
        in_.open(path);
        if (!in_)
            throw KbError(KbError::Code::Parse, "cannot read table file '" + name + ".tsv'");

        std::string header;
        if (!std::getline(in_, header))
            throw KbError(KbError::Code::Parse, name + ".tsv:1: missing header row");
        strip_cr(header);
        ++line_no_;
        if (split_tabs(header) != columns)
            throw KbError(KbError::Code::Parse, name + ".tsv:1: header must be the column names "
                                                "of the " + name + " table, tab-separated");
        columns_ = columns.size();
    }

    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            strip_cr(line);
            ++line_no_;
            if (line.empty()) continue;
            fields = split_tabs(line);
            if (fields.size() != columns_)
                throw KbError(KbError::Code::Parse,
                              name_ + ".tsv:" + std::to_string(line_no_) + ": expected " +
                                  std::to_string(columns_) + " fields, found " +
                                  std::to_string(fields.size()));
            return true;
        }
        return false;
    }

    int to_int(const std::string& field, const char* column) const {
        try {
            std::size_t used = 0;
            int value = std::stoi(field, &used);
            if (used == field.size()) return value;
        } catch (const std::exception&) {
        }
        throw KbError(KbError::Code::Parse, name_ + ".tsv:" + std::to_string(line_no_) + ": '" +
                                                field + "' is not an integer (" + column + ")");
    }

private:
    static void strip_cr(std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    }

    std::string name_;
    std::ifstream in_;
    std::size_t columns_ = 0;
    int line_no_ = 0;
};

[[noreturn]] void integrity(const std::string& msg) {
    throw KbError(KbError::Code::Integrity, msg);
}

void check_integrity(const std::vector<OsPkgMgrRow>& os_rows,
                     const std::vector<SwDependencyRow>& apps,
                     const std::vector<PackageRow>& packages,
                     const std::vector<OsDependencyRow>& os_deps) {
    std::set<int> os_ids;
    std::set<std::tuple<std::string, std::string, std::string>> os_keys;
    for (const auto& r : os_rows) {
        if (!os_ids.insert(r.id).second)
            integrity("os_pkg_mgr id " + std::to_string(r.id) + " is not unique");
        if (!os_keys.insert({r.os_type, r.os_version, r.pkg_mgr}).second)
            integrity("duplicate os_pkg_mgr entry for (" + r.os_type + ", " + r.os_version +
                      ", " + r.pkg_mgr + ")");
    }

    std::set<int> app_ids;
    std::set<std::string> app_names;
    for (const auto& r : apps) {
        if (!app_ids.insert(r.id).second)
            integrity("swdependency id " + std::to_string(r.id) + " is not unique");
        if (!app_names.insert(r.app_name).second)
            integrity("swdependency app_name '" + r.app_name + "' is not unique");
    }

    std::set<int> pkg_ids;
    std::set<std::tuple<int, int, int>> orders;
    for (const auto& r : packages) {
        if (!pkg_ids.insert(r.id).second)
            integrity("packages id " + std::to_string(r.id) + " is not unique");
        if (!app_ids.count(r.app_id))
            integrity("packages row " + std::to_string(r.id) + " references app_id " +
                      std::to_string(r.app_id) + " which has no swdependency row");
        if (r.pkg_name.empty())
            integrity("packages row " + std::to_string(r.id) + " has an empty pkg_name");
        if (!orders.insert({r.app_id, r.sw_id, r.install_order}).second)
            integrity("packages row " + std::to_string(r.id) +
                      " repeats install_order " + std::to_string(r.install_order) +
                      " within its (app_id, sw_id) group");
    }

    std::set<std::pair<int, int>> dep_keys;
    for (const auto& r : os_deps) {
        if (!os_ids.count(r.os_id))
            integrity("os_dependency references os_id " + std::to_string(r.os_id) +
                      " which has no os_pkg_mgr row");
        if (!dep_keys.insert({r.os_id, r.app_sw_id}).second)
            integrity("duplicate os_dependency entry (" + std::to_string(r.os_id) + ", " +
                      std::to_string(r.app_sw_id) + ")");
    }
}

} // namespace

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& dir) {
    KnowledgeBase kb;
    std::vector<std::string> fields;

    {
        TableReader reader(dir, "os_pkg_mgr", {"id", "os_type", "os_version", "pkg_mgr"});
        while (reader.next(fields))
            kb.os_pkg_mgr_.push_back(OsPkgMgrRow{reader.to_int(fields[0], "id"), fields[1],
                                                 fields[2], fields[3]});
    }
    {
        TableReader reader(dir, "swdependency", {"id", "app_name"});
        while (reader.next(fields))
            kb.swdependency_.push_back(SwDependencyRow{reader.to_int(fields[0], "id"), fields[1]});
    }
    {
        TableReader reader(dir, "packages", {"id", "app_id", "sw_id", "apptype", "pkg_name",
                                             "pkg_mgr", "install_order"});
        while (reader.next(fields))
            kb.packages_.push_back(PackageRow{
                reader.to_int(fields[0], "id"), reader.to_int(fields[1], "app_id"),
                reader.to_int(fields[2], "sw_id"), fields[3], fields[4], fields[5],
                reader.to_int(fields[6], "install_order")});
    }
    {
        TableReader reader(dir, "os_dependency", {"os_id", "app_sw_id"});
        while (reader.next(fields))
            kb.os_dependency_.push_back(OsDependencyRow{reader.to_int(fields[0], "os_id"),
                                                        reader.to_int(fields[1], "app_sw_id")});
    }

    check_integrity(kb.os_pkg_mgr_, kb.swdependency_, kb.packages_, kb.os_dependency_);
    return kb;
}

PackageResolution KnowledgeBase::resolve(const std::string& app_name, const std::string& apptype,
                                         const std::string& os_type,
                                         const std::string& os_version) const {
    const SwDependencyRow* app = nullptr;
    for (const auto& row : swdependency_)
        if (row.app_name == app_name) app = &row;
    if (app == nullptr)
        throw KbError(KbError::Code::UnknownApplicationType,
                      "unknown application type '" + app_name + "'");

    std::set<int> os_ids;
    for (const auto& row : os_pkg_mgr_)
        if (row.os_type == os_type && row.os_version == os_version) os_ids.insert(row.id);
    if (os_ids.empty())
        throw KbError(KbError::Code::UnsupportedOs,
                      "no package manager known for " + os_type + " " + os_version);

    std::set<int> sw_ids;
    for (const auto& row : os_dependency_)
        if (os_ids.count(row.os_id)) sw_ids.insert(row.app_sw_id);

    std::vector<const PackageRow*> matched;
    for (const auto& row : packages_)
        if (row.app_id == app->id && row.apptype == apptype && sw_ids.count(row.sw_id))
            matched.push_back(&row);
    if (matched.empty())
        throw KbError(KbError::Code::EmptyResolution,
                      "knowledge base has no packages for '" + app_name + "' (" + apptype +
                          ") on " + os_type + " " + os_version);

    std::sort(matched.begin(), matched.end(), [](const PackageRow* a, const PackageRow* b) {
        return std::tie(a->install_order, a->id) < std::tie(b->install_order, b->id);
    });

    PackageResolution resolution;
    for (const PackageRow* row : matched)
        resolution.steps.push_back(PackageStep{row->pkg_mgr, row->pkg_name});
    return resolution;
}

std::map<std::pair<std::string, std::string>, PackageResolution>
KnowledgeBase::os_variants(const std::string& app_name) const {
    const SwDependencyRow* app = nullptr;
    for (const auto& row : swdependency_)
        if (row.app_name == app_name) app = &row;
    if (app == nullptr)
        throw KbError(KbError::Code::UnknownApplicationType,
                      "unknown application type '" + app_name + "'");

    std::set<std::pair<std::string, std::string>> os_keys;
    for (const auto& row : os_pkg_mgr_) os_keys.insert({row.os_type, row.os_version});

    std::map<std::pair<std::string, std::string>, PackageResolution> variants;
    for (const auto& key : os_keys) {
        std::set<int> os_ids;
        for (const auto& row : os_pkg_mgr_)
            if (row.os_type == key.first && row.os_version == key.second) os_ids.insert(row.id);
        std::set<int> sw_ids;
        for (const auto& row : os_dependency_)
            if (os_ids.count(row.os_id)) sw_ids.insert(row.app_sw_id);

        std::vector<const PackageRow*> matched;
        for (const auto& row : packages_)
            if (row.app_id == app->id && sw_ids.count(row.sw_id)) matched.push_back(&row);
        if (matched.empty()) continue;

        std::sort(matched.begin(), matched.end(), [](const PackageRow* a, const PackageRow* b) {
            return std::tie(a->install_order, a->id) < std::tie(b->install_order, b->id);
        });
        PackageResolution resolution;
        for (const PackageRow* row : matched)
            resolution.steps.push_back(PackageStep{row->pkg_mgr, row->pkg_name});
        variants.emplace(key, std::move(resolution));
    }
    return variants;
}

} // namespace camp
