#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "camp/topology.hpp"

namespace camp {

/// Parses the declarative topology text format (`.camp`) into a Topology.
///
/// A document is a sequence of declarations:
///
///     component <id> { <key> = <value>; ... }
///     platform  <id> { <key> = <value>; ... }
///     <id> <verb> <id> [with <key>=<value> ...];
///
/// with verb one of hostedOn, connectsTo, deleteFrom, migrateTo. Values are
/// bare words or double-quoted strings; `#` starts a line comment. The `os`
/// platform key takes a two-token value (`os = ubuntu 16.04`). Forward
/// references to nodes declared later in the file are allowed.
///
/// Throws ParseError on grammar violations, duplicate ids, references to
/// undeclared nodes, and unknown block types or relation verbs.
Topology parse(std::string_view text, const std::string& file_name = "<string>");

/// Reads and parses a model file. Throws Error when unreadable.
Topology parse_file(const std::filesystem::path& path);

/// Serializes a Topology back to canonical text: platforms then components,
/// each sorted by id, relationships in original order, LF line endings.
/// parse(serialize(t)) is structurally equal to t.
std::string serialize(const Topology& t);

} // namespace camp
