#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "camp/plan.hpp"

namespace camp {

/// Inclusive tick range a simulated duration is drawn from.
struct LatencyRange {
    long min = 0;
    long max = 0;
};

/// Injected failure: pattern is a step id, optionally with `*` wildcards.
/// SshTimeout only fires on waitssh steps; TaskFail fires on any match.
struct FailureInjection {
    enum class Mode { SshTimeout, TaskFail };

    std::string pattern;
    Mode mode = Mode::TaskFail;
};

struct SimConfig {
    std::uint64_t seed = 0;
    LatencyRange provision_latency{5, 15};
    LatencyRange ssh_ready_latency{2, 8};
    LatencyRange task_latency{1, 5};
    std::vector<FailureInjection> failures;

    /// Reads a key-value config file (see docs/formats.md). Throws Error
    /// with the offending line.
    static SimConfig from_file(const std::filesystem::path& path);
};

enum class Phase { Begin, End, Fail };

std::string to_string(Phase p);

struct TraceEvent {
    long tick = 0;
    std::string step;
    Phase phase = Phase::Begin;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Timestamped execution record. Logical time is integer ticks; wall clock
/// never enters the simulation.
struct EventTrace {
    enum class Status { Succeeded, Failed };

    std::vector<TraceEvent> events;
    Status status = Status::Succeeded;

    /// Line format: `<tick>\t<step>\t<phase>`, then a status footer.
    std::string to_text() const;
};

/// Runs the plan on simulated infrastructure. A step begins only after all
/// its predecessors ended; unordered steps overlap in logical time. When a
/// step fails, its transitive successors are skipped (they never begin) and
/// the run is Failed. Identical (plan, config) inputs produce identical
/// traces. Throws PlanError{CyclicPlan} on a cyclic plan.
EventTrace simulate(const Plan& plan, const SimConfig& config);

/// Independent trace checker: verifies every plan edge, the failure skip
/// rule, and per-step phase consistency. Empty result means the trace is
/// valid for the plan.
std::vector<std::string> check_trace(const EventTrace& trace, const Plan& plan);

/// Shell-style match where `*` spans any substring.
bool glob_match(std::string_view pattern, std::string_view text);

} // namespace camp
