#include "camp/simulate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace camp {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Draws the step duration from a generator keyed on (seed, step id), so the
// sample does not depend on event interleaving.
long draw_duration(const LatencyRange& range, std::uint64_t seed, const std::string& step_id) {
    if (range.max <= range.min) return range.min;
    std::uint64_t r = splitmix64(seed ^ fnv1a(step_id));
    auto width = static_cast<std::uint64_t>(range.max - range.min + 1);
    return range.min + static_cast<long>(r % width);
}

const LatencyRange& range_for(const SimConfig& config, Action action) {
    switch (action) {
    case Action::Provision: return config.provision_latency;
    case Action::WaitSsh: return config.ssh_ready_latency;
    default: return config.task_latency;
    }
}

bool injection_applies(const FailureInjection& injection, const Step& step) {
    if (!glob_match(injection.pattern, step.id)) return false;
    if (injection.mode == FailureInjection::Mode::SshTimeout)
        return step.action == Action::WaitSsh;
    return true;
}

struct QueueEvent {
    long tick = 0;
    int order = 0; // terminal events drain before begins at the same tick
    std::string step;
    Phase phase = Phase::Begin;

    bool operator>(const QueueEvent& other) const {
        return std::tie(tick, order, step) > std::tie(other.tick, other.order, other.step);
    }
};

LatencyRange parse_range(const std::string& value, int line_no) {
    auto bad = [&]() -> LatencyRange {
        throw Error("sim config:" + std::to_string(line_no) + ": expected '<min>..<max>' or '<n>'");
    };
    try {
        auto dots = value.find("..");
        if (dots == std::string::npos) {
            long n = std::stol(value);
            if (n < 0) return bad();
            return LatencyRange{n, n};
        }
        long lo = std::stol(value.substr(0, dots));
        long hi = std::stol(value.substr(dots + 2));
        if (lo < 0 || hi < lo) return bad();
        return LatencyRange{lo, hi};
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        return bad();
    }
}

} // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::string to_string(Phase p) {
    switch (p) {
    case Phase::Begin: return "Begin";
    case Phase::End: return "End";
    case Phase::Fail: return "Fail";
    }
    return "?";
}

SimConfig SimConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open sim config '" + path.string() + "'");

    SimConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) continue;
        std::string eq;
        if (!(fields >> eq) || eq != "=")
            throw Error("sim config:" + std::to_string(line_no) + ": expected '<key> = <value>'");
        if (key == "seed") {
            std::string value;
            if (!(fields >> value))
                throw Error("sim config:" + std::to_string(line_no) + ": missing seed value");
            try {
                config.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw Error("sim config:" + std::to_string(line_no) + ": seed must be an integer");
            }
        } else if (key == "provision_latency" || key == "ssh_ready_latency" ||
                   key == "task_latency") {
            std::string value;
            if (!(fields >> value))
                throw Error("sim config:" + std::to_string(line_no) + ": missing range value");
            LatencyRange range = parse_range(value, line_no);
            if (key == "provision_latency")
                config.provision_latency = range;
            else if (key == "ssh_ready_latency")
                config.ssh_ready_latency = range;
            else
                config.task_latency = range;
        } else if (key == "fail") {
            std::string pattern, mode;
            if (!(fields >> pattern >> mode))
                throw Error("sim config:" + std::to_string(line_no) +
                            ": expected 'fail = <pattern> <SshTimeout|TaskFail>'");
            FailureInjection injection;
            injection.pattern = pattern;
            if (mode == "SshTimeout")
                injection.mode = FailureInjection::Mode::SshTimeout;
            else if (mode == "TaskFail")
                injection.mode = FailureInjection::Mode::TaskFail;
            else
                throw Error("sim config:" + std::to_string(line_no) + ": unknown failure mode '" +
                            mode + "'");
            config.failures.push_back(std::move(injection));
        } else {
            throw Error("sim config:" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return config;
}

std::string EventTrace::to_text() const {
    std::ostringstream os;
    for (const auto& event : events)
        os << event.tick << "\t" << event.step << "\t" << to_string(event.phase) << "\n";
    os << "# status " << (status == Status::Succeeded ? "Succeeded" : "Failed") << "\n";
    return os.str();
}

EventTrace simulate(const Plan& plan, const SimConfig& config) {
    ensure_acyclic(plan);

    std::map<std::string, const Step*> steps;
    std::map<std::string, int> pending; // unfinished predecessor count
    std::map<std::string, std::vector<std::string>> successors;
    for (const auto& step : plan.steps) {
        steps[step.id] = &step;
        pending[step.id] = 0;
    }
    for (const auto& [before, after] : plan.edges) {
        successors[before].push_back(after);
        ++pending[after];
    }

    std::priority_queue<QueueEvent, std::vector<QueueEvent>, std::greater<QueueEvent>> queue;
    for (const auto& [id, count] : pending)
        if (count == 0) queue.push(QueueEvent{0, 1, id, Phase::Begin});

    std::set<std::string> skipped;
    auto skip_successors = [&](const std::string& root) {
        std::vector<std::string> frontier{root};
        while (!frontier.empty()) {
            std::string id = frontier.back();
            frontier.pop_back();
            for (const std::string& next : successors[id])
                if (skipped.insert(next).second) frontier.push_back(next);
        }
    };

    EventTrace trace;
    while (!queue.empty()) {
        QueueEvent event = queue.top();
        queue.pop();
        if (event.phase == Phase::Begin) {
            if (skipped.count(event.step)) continue;
            trace.events.push_back(TraceEvent{event.tick, event.step, Phase::Begin});
            const Step& step = *steps.at(event.step);
            long duration =
                step.already_satisfied
                    ? 0
                    : draw_duration(range_for(config, step.action), config.seed, step.id);
            Phase terminal = Phase::End;
            if (!step.already_satisfied) {
                for (const auto& injection : config.failures) {
                    if (injection_applies(injection, step)) {
                        terminal = Phase::Fail;
                        break;
                    }
                }
            }
            queue.push(QueueEvent{event.tick + duration, 0, event.step, terminal});
        } else if (event.phase == Phase::End) {
            trace.events.push_back(TraceEvent{event.tick, event.step, Phase::End});
            for (const std::string& next : successors[event.step]) {
                if (--pending[next] == 0 && !skipped.count(next))
                    queue.push(QueueEvent{event.tick, 1, next, Phase::Begin});
            }
        } else {
            trace.events.push_back(TraceEvent{event.tick, event.step, Phase::Fail});
            trace.status = EventTrace::Status::Failed;
            skip_successors(event.step);
        }
    }
    return trace;
}

std::vector<std::string> check_trace(const EventTrace& trace, const Plan& plan) {
    std::vector<std::string> violations;

    std::map<std::string, const Step*> steps;
    for (const auto& step : plan.steps) steps[step.id] = &step;

    std::map<std::string, std::size_t> begin_at, end_at, fail_at;
    long last_tick = 0;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const TraceEvent& event = trace.events[i];
        if (!steps.count(event.step)) {
            violations.push_back("trace mentions unknown step '" + event.step + "'");
            continue;
        }
        if (event.tick < last_tick)
            violations.push_back("tick order regresses at '" + event.step + "'");
        last_tick = event.tick;
        switch (event.phase) {
        case Phase::Begin:
            if (!begin_at.emplace(event.step, i).second)
                violations.push_back("step '" + event.step + "' begins twice");
            break;
        case Phase::End:
        case Phase::Fail: {
            auto& slot = event.phase == Phase::End ? end_at : fail_at;
            if (!slot.emplace(event.step, i).second ||
                (event.phase == Phase::End ? fail_at.count(event.step)
                                           : end_at.count(event.step)))
                violations.push_back("step '" + event.step + "' has two terminal events");
            if (!begin_at.count(event.step))
                violations.push_back("step '" + event.step + "' finishes without beginning");
            break;
        }
        }
    }

    for (const auto& [before, after] : plan.edges) {
        auto begun = begin_at.find(after);
        if (begun == begin_at.end()) continue;
        auto ended = end_at.find(before);
        if (ended == end_at.end()) {
            violations.push_back("edge (" + before + ", " + after + "): '" + after +
                                 "' began but '" + before + "' never ended");
        } else if (ended->second > begun->second) {
            violations.push_back("edge (" + before + ", " + after + "): '" + after +
                                 "' began before '" + before + "' ended");
        }
    }

    // skip rule: nothing downstream of a failure may run
    std::map<std::string, std::vector<std::string>> successors;
    for (const auto& [before, after] : plan.edges) successors[before].push_back(after);
    for (const auto& [failed, index] : fail_at) {
        std::vector<std::string> frontier{failed};
        std::set<std::string> seen;
        while (!frontier.empty()) {
            std::string id = frontier.back();
            frontier.pop_back();
            for (const std::string& next : successors[id]) {
                if (!seen.insert(next).second) continue;
                if (begin_at.count(next))
                    violations.push_back("step '" + next + "' ran although '" + failed +
                                         "' failed upstream");
                frontier.push_back(next);
            }
        }
    }

    bool any_fail = !fail_at.empty();
    if (any_fail && trace.status == EventTrace::Status::Succeeded)
        violations.push_back("trace contains a failure but reports Succeeded");
    if (!any_fail && trace.status == EventTrace::Status::Failed)
        violations.push_back("trace reports Failed without a failure event");

    return violations;
}

} // namespace camp
