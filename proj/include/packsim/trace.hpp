#pragma once

// Task-trace ingestion. CSV schema: header `arrival_time,duration,<res...>,priority`
// with one or more resource columns (fractions of one server). Tasks map to
// VM types by rounding the largest requested resource up to the nearest
// power of 1/2; reward = size x {1,3,9} by priority; tasks sharing
// (size, priority) share a type. The resulting one-dimensional profile uses
// a binary scale (2^20 units per server) so power-of-1/2 sizes stay exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "packsim/errors.hpp"
#include "packsim/profile.hpp"
#include "packsim/rng.hpp"
#include "packsim/sim.hpp"

namespace packsim {

struct RawTask {
    double arrival_time = 0;
    double duration = 0;
    std::vector<double> resources;  // fractions of a server, in [0, 1]
    int priority = 0;
};

struct TraceIssue {
    long line = 0;
    std::string what;
};

struct TraceParseResult {
    std::vector<RawTask> tasks;       // sorted by arrival time
    std::vector<TraceIssue> skipped;  // lenient mode only
    std::vector<std::string> resource_columns;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace detail

inline TraceParseResult parse_trace(std::istream& in, bool strict = true) {
    TraceParseResult result;
    std::string line;
    long lineno = 0;

    auto fail = [&](const std::string& what) {
        if (strict) throw InputError("trace line " + std::to_string(lineno) + ": " + what);
        result.skipped.push_back({lineno, what});
    };

    // Header row.
    for (;;) {
        if (!std::getline(in, line)) throw InputError("trace file is empty");
        ++lineno;
        if (!line.empty() && line[0] != '#') break;  // leading comments carry units
    }
    std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() < 4 || header[0] != "arrival_time" || header[1] != "duration" ||
        header.back() != "priority")
        throw InputError("trace header must be arrival_time,duration,<resources...>,priority");
    result.resource_columns.assign(header.begin() + 2, header.end() - 1);

    const std::size_t want = header.size();
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() != want) {
            fail("expected " + std::to_string(want) + " fields, got " +
                 std::to_string(fields.size()));
            continue;
        }
        RawTask task;
        try {
            task.arrival_time = std::stod(fields[0]);
            task.duration = std::stod(fields[1]);
            for (std::size_t i = 2; i + 1 < fields.size(); ++i)
                task.resources.push_back(std::stod(fields[i]));
            task.priority = std::stoi(fields.back());
        } catch (const std::exception&) {
            fail("unparsable numeric field");
            continue;
        }
        if (task.duration <= 0) {
            fail("duration must be positive");
            continue;
        }
        if (task.arrival_time < 0) {
            fail("negative arrival time");
            continue;
        }
        if (task.priority < 0 || task.priority > 2) {
            fail("priority must be 0, 1 or 2");
            continue;
        }
        bool bad = false, any = false;
        for (double r : task.resources) {
            if (r < 0) bad = true;
            if (r > 0) any = true;
        }
        if (bad || !any) {
            fail(bad ? "negative resource request" : "all-zero resource request");
            continue;
        }
        result.tasks.push_back(std::move(task));
    }
    std::stable_sort(result.tasks.begin(), result.tasks.end(),
                     [](const RawTask& a, const RawTask& b) {
                         return a.arrival_time < b.arrival_time;
                     });
    return result;
}

inline TraceParseResult parse_trace(const std::string& path, bool strict = true) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace file: " + path);
    return parse_trace(in, strict);
}

struct MappedType {
    double size = 1.0;  // power of 1/2 in (0, 1]
    int priority = 0;
    double reward = 1.0;  // size x factor
    bool clamped = false;
};

inline int priority_factor(int priority) {
    static const int factors[3] = {1, 3, 9};
    return factors[priority];
}

// Smallest power of 1/2 that covers the largest requested resource.
inline MappedType map_task_to_type(const RawTask& task) {
    MappedType m;
    m.priority = task.priority;
    double peak = 0;
    for (double r : task.resources) peak = std::max(peak, r);
    if (peak > 1.0) {
        peak = 1.0;
        m.clamped = true;
    }
    double size = 1.0;
    while (size / 2 >= peak) size /= 2;
    m.size = size;
    m.reward = size * priority_factor(task.priority);
    return m;
}

struct TraceWorkload {
    CloudProfile profile;
    std::vector<TraceJob> jobs;  // ordered by arrival time; type indexes the profile
    long clamped = 0;
};

inline constexpr long long kTraceScale = 1 << 20;  // server capacity in trace units

// Deduplicates mapped (size, priority) pairs into VM types and converts the
// tasks into engine events. Sizes below 2^-20 are rejected.
inline TraceWorkload build_trace_workload(const std::vector<RawTask>& tasks) {
    std::map<std::pair<long long, int>, int> type_of;  // (scaled size, priority) -> type index
    std::vector<VMType> types;
    std::vector<std::pair<double, int>> raw_types;  // (size, priority) by type index
    std::vector<std::pair<int, double>> mapped;     // (type index, duration) per task
    long clamped = 0;

    for (const RawTask& task : tasks) {
        MappedType m = map_task_to_type(task);
        if (m.clamped) ++clamped;
        double scaled = m.size * static_cast<double>(kTraceScale);
        if (scaled < 1.0 || scaled != std::floor(scaled))
            throw InputError("task size " + std::to_string(m.size) +
                             " is below the 2^-20 trace resolution");
        auto key = std::make_pair(static_cast<long long>(scaled), m.priority);
        auto it = type_of.find(key);
        int idx;
        if (it == type_of.end()) {
            idx = static_cast<int>(types.size());
            type_of.emplace(key, idx);
            VMType t;
            t.name = "s" + std::to_string(m.size) + "p" + std::to_string(m.priority);
            t.demand = {key.first};
            t.reward_rate = Rational(m.reward);  // exact: power of 1/2 times a small integer
            t.arrival_rate = 0;
            t.service_rate = 1;
            t.priority = m.priority;
            t.size = Rational(m.size);
            types.push_back(std::move(t));
            raw_types.emplace_back(m.size, m.priority);
        } else {
            idx = it->second;
        }
        mapped.emplace_back(idx, task.duration);
    }
    if (types.empty()) throw InputError("trace contains no usable tasks");

    TraceWorkload w{make_profile({kTraceScale}, std::move(types),
                                 ProfileOptions{.resource_names = {"share"}}),
                    {},
                    clamped};
    w.jobs.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i)
        w.jobs.push_back({tasks[i].arrival_time, mapped[i].first, mapped[i].second});
    return w;
}

// Serializes tasks back to the CSV schema (round-trip fixture support).
inline void write_trace(std::ostream& out, const std::vector<RawTask>& tasks,
                        const std::vector<std::string>& resource_columns) {
    out << "arrival_time,duration";
    for (const auto& c : resource_columns) out << ',' << c;
    out << ",priority\n";
    for (const RawTask& t : tasks) {
        out << t.arrival_time << ',' << t.duration;
        for (double r : t.resources) out << ',' << r;
        out << ',' << t.priority << '\n';
    }
}

struct SpikeTraceOptions {
    double horizon = 200.0;
    double base_rate = 40.0;   // background priority-0 arrivals per unit time
    double spike_rate = 220.0; // arrivals per unit time inside each surge
    double spike0_start = 20.0, spike0_end = 60.0;   // priority-0 surge
    double spike1_start = 80.0, spike1_end = 130.0;  // priority-1/2 surge
};

// Synthetic fixture mirroring the trace experiment's stress pattern: a surge
// of low-priority jobs grabs the cluster, then a surge of high-priority jobs
// arrives while the low-priority ones are still running.
inline std::vector<RawTask> make_spike_trace(std::uint64_t seed,
                                             const SpikeTraceOptions& opt = {}) {
    RngStream rng(seed, StreamKind::Instance, 17);
    std::vector<RawTask> tasks;
    auto emit = [&](double t, double dur, double size, int priority) {
        RawTask task;
        task.arrival_time = t;
        task.duration = dur;
        task.resources = {size, size / 2};
        task.priority = priority;
        tasks.push_back(std::move(task));
    };
    const double sizes[3] = {0.25, 0.125, 0.0625};

    double t = 0;
    while (t < opt.horizon) {
        t += rng.exponential(opt.base_rate);
        if (t >= opt.horizon) break;
        emit(t, 4 + rng.exponential(0.5), sizes[rng.below(3)], 0);
    }
    t = opt.spike0_start;
    while (t < opt.spike0_end) {
        t += rng.exponential(opt.spike_rate);
        if (t >= opt.spike0_end) break;
        emit(t, 30 + rng.exponential(0.05), sizes[rng.below(2)], 0);
    }
    t = opt.spike1_start;
    while (t < opt.spike1_end) {
        t += rng.exponential(opt.spike_rate);
        if (t >= opt.spike1_end) break;
        emit(t, 15 + rng.exponential(0.1), 0.25, rng.below(4) == 0 ? 2 : 1);
    }
    std::stable_sort(tasks.begin(), tasks.end(), [](const RawTask& a, const RawTask& b) {
        return a.arrival_time < b.arrival_time;
    });
    return tasks;
}

}  // namespace packsim
