#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "camp/errors.hpp"

namespace camp {

struct OsPkgMgrRow {
    int id = 0;
    std::string os_type;
    std::string os_version;
    std::string pkg_mgr;
};

struct SwDependencyRow {
    int id = 0;
    std::string app_name;
};

struct PackageRow {
    int id = 0;
    int app_id = 0; // -> SwDependencyRow.id
    int sw_id = 0;  // group key joined against os_dependency.app_sw_id
    std::string apptype;
    std::string pkg_name;
    std::string pkg_mgr;
    int install_order = 0;
};

struct OsDependencyRow {
    int os_id = 0;     // -> OsPkgMgrRow.id
    int app_sw_id = 0; // matches PackageRow.sw_id
};

struct PackageStep {
    std::string pkg_mgr;
    std::string pkg_name;

    friend bool operator==(const PackageStep&, const PackageStep&) = default;
};

/// Ordered (package-manager, package) list for one component on one OS.
struct PackageResolution {
    std::vector<PackageStep> steps;

    friend bool operator==(const PackageResolution&, const PackageResolution&) = default;
};

/// File-backed four-table dependency store. Immutable after load; concurrent
/// queries are safe.
class KnowledgeBase {
public:
    /// Loads the four tab-separated table files from a directory and checks
    /// referential integrity. Throws KbError{MissingTable, Parse, Integrity}.
    static KnowledgeBase load(const std::filesystem::path& dir);

    /// Expands an application type into the ordered package closure for one
    /// OS: packages of the named app, with a matching apptype, restricted to
    /// the sw groups mapped to the (os_type, os_version) package managers,
    /// sorted by install_order.
    PackageResolution resolve(const std::string& app_name, const std::string& apptype,
                              const std::string& os_type, const std::string& os_version) const;

    /// Per-OS resolutions of one application across every OS in the store.
    /// Entries whose join is empty are omitted; the apptype filter is not
    /// applied, which for a single-apptype application matches resolve().
    std::map<std::pair<std::string, std::string>, PackageResolution>
    os_variants(const std::string& app_name) const;

    const std::vector<OsPkgMgrRow>& os_pkg_mgr() const { return os_pkg_mgr_; }
    const std::vector<SwDependencyRow>& swdependency() const { return swdependency_; }
    const std::vector<PackageRow>& packages() const { return packages_; }
    const std::vector<OsDependencyRow>& os_dependency() const { return os_dependency_; }

private:
    std::vector<OsPkgMgrRow> os_pkg_mgr_;
    std::vector<SwDependencyRow> swdependency_;
    std::vector<PackageRow> packages_;
    std::vector<OsDependencyRow> os_dependency_;
};

} // namespace camp
