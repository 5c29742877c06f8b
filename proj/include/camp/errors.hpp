#pragma once

#include <stdexcept>
#include <string>

namespace camp {

/// Position of a token inside a model file. Lines and columns are 1-based.
struct SourceSpan {
    std::string file;
    int line = 1;
    int column = 1;
};

std::string to_string(const SourceSpan& span);

/// Base class for all domain errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised by the model-text parser. Carries a stable code and the span of the
/// offending token.
class ParseError : public Error {
public:
    enum class Code { Syntax, DuplicateId, UnknownNodeRef, UnknownKeyword };

    ParseError(Code code, SourceSpan span, const std::string& msg);

    Code code() const { return code_; }
    const SourceSpan& span() const { return span_; }

private:
    Code code_;
    SourceSpan span_;
};

/// Raised by graph accessors on the in-memory topology.
class ModelError : public Error {
public:
    enum class Code { AmbiguousHosting, UnknownNode };

    ModelError(Code code, const std::string& msg) : Error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Raised when a compatibility-rules file cannot be parsed.
class RuleParseError : public Error {
public:
    RuleParseError(int line, const std::string& msg);
    int line() const { return line_; }

private:
    int line_;
};

/// Raised by the knowledge base on load or query failure.
class KbError : public Error {
public:
    enum class Code {
        MissingTable,
        Integrity,
        Parse,
        UnknownApplicationType,
        UnsupportedOs,
        EmptyResolution,
    };

    KbError(Code code, const std::string& msg) : Error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Raised by template loading and document generation.
class GenerateError : public Error {
public:
    enum class Code {
        NoTemplate,
        UnboundPlaceholder,
        MissingAttribute,
        BadTemplate,
        Aggregate,
    };

    GenerateError(Code code, const std::string& msg) : Error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Raised by the planners and the simulator.
class PlanError : public Error {
public:
    enum class Code { NoMigrationPair, UnsupportedDelta, CyclicPlan };

    PlanError(Code code, const std::string& msg) : Error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

} // namespace camp
