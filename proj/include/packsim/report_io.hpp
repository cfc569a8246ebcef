#pragma once

// Report serialization: JSON aggregates and CSV time series. Every CSV
// starts with a schema-version comment line.

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "packsim/errors.hpp"
#include "packsim/sim.hpp"

namespace packsim {

inline constexpr const char* kSeriesSchema = "# schema: packsim.series.v1";
inline constexpr const char* kSweepSchema = "# schema: packsim.sweep.v1";

inline void write_series_csv(std::ostream& out, const SimReport& rep) {
    out << kSeriesSchema << '\n';
    out << "t,reward_rate";
    for (std::size_t j = 0; j < (rep.series.empty() ? 0 : rep.series.front().y.size()); ++j)
        out << ",Y_" << (j + 1);
    out << ",q_max,V,admissions,rejections,migrations,preemptions\n";
    out << std::setprecision(12);
    for (const Sample& s : rep.series) {
        out << s.t << ',' << s.reward_rate;
        for (long long y : s.y) out << ',' << y;
        out << ',';
        if (s.q_max) out << *s.q_max;
        out << ',';
        if (s.lyapunov) out << *s.lyapunov;
        out << ',' << s.counters.admissions << ',' << s.counters.rejections << ','
            << s.counters.migrations << ',' << s.counters.preemptions << '\n';
    }
}

inline nlohmann::json report_to_json(const SimReport& rep) {
    nlohmann::json j;
    j["policy"] = rep.policy;
    j["L"] = rep.L;
    j["horizon"] = rep.horizon;
    j["seed"] = rep.seed;
    j["sample_dt"] = rep.sample_dt;
    j["time_avg_reward"] = rep.time_avg_reward;
    j["second_half_avg_reward"] = rep.second_half_avg_reward;
    j["final_reward_rate"] = rep.final_reward_rate;
    j["admissions"] = rep.counters.admissions;
    j["rejections"] = rep.counters.rejections;
    j["departures"] = rep.counters.departures;
    j["migrations"] = rep.counters.migrations;
    j["preemptions"] = rep.counters.preemptions;
    j["reassignments"] = rep.counters.reassignments;
    std::ostringstream h;
    h << std::hex << rep.hash;
    j["report_hash"] = h.str();
    return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write: " + path);
    out << contents;
}

}  // namespace packsim
