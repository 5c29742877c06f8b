#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "camp/topology.hpp"

namespace camp {

/// One constraint violation. Codes are stable identifiers drawn from the
/// closed set documented in docs/formats.md.
struct Diagnostic {
    enum class Severity { Error, Warning };

    std::string code;
    Severity severity = Severity::Error;
    std::string subject; // node id, or "source->target" for a relationship
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string to_string(Diagnostic::Severity s);

/// A provider-compatibility rule: components carrying an attribute with this
/// value may only connect to components hosted on the given provider.
struct BindRule {
    std::string attribute_value;
    Provider provider = Provider::Amazon;

    friend bool operator==(const BindRule&, const BindRule&) = default;
};

/// The structural checks are built in; bind rules are data loaded from a
/// rules file.
struct RuleSet {
    std::vector<BindRule> binds;
};

/// Built-in structural rules only, no compatibility bindings.
RuleSet default_rules();

/// Loads a rules file: one `bind <attribute-value> to <provider>` per line,
/// `#` comments. Throws RuleParseError with the offending line number.
RuleSet rule_set_from_file(const std::filesystem::path& path);

/// Checks the topology against every rule and returns all violations,
/// sorted by (subject, code). An empty result means the topology is
/// deployable.
std::vector<Diagnostic> validate(const Topology& t, const RuleSet& rules);

/// True when the diagnostics contain no Error-severity entries.
bool deployable(const std::vector<Diagnostic>& diagnostics);

} // namespace camp
