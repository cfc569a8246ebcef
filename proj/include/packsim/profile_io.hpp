#pragma once

// Profile file format (JSON):
//   {
//     "resources": ["cpu", "mem"],
//     "capacity": [80, 640],
//     "types": [
//       {"name": "c2m2", "cpu": 2, "mem": 2, "reward": 18, "lambda": 2, "mu": 1,
//        "priority": 0}
//     ]
//   }
// Resource quantities are abstract units stored as micro-units (10^6 per
// unit) internally; time is abstract seconds. Numeric fields accept exact
// rational strings ("4/3", "0.5") as well as plain numbers.

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "packsim/errors.hpp"
#include "packsim/profile.hpp"
#include "packsim/rational.hpp"
#include "packsim/rng.hpp"

namespace packsim {

inline constexpr long long kMicro = 1'000'000;

// Exact conversion of an abstract resource quantity to micro-units.
inline long long resource_to_micro(const Rational& amount) {
    Rational scaled = amount * static_cast<long>(kMicro);
    if (scaled.get_den() != 1)
        throw InputError("resource quantity " + amount.get_str() +
                         " is not representable in micro-units");
    if (!scaled.get_num().fits_slong_p())
        throw InputError("resource quantity " + amount.get_str() + " is out of range");
    return scaled.get_num().get_si();
}

inline CloudProfile load_profile(const nlohmann::json& doc, ProfileOptions opts = {}) {
    if (!doc.contains("resources") || !doc.contains("capacity") || !doc.contains("types"))
        throw InputError("profile needs 'resources', 'capacity' and 'types'");
    std::vector<std::string> names = doc.at("resources").get<std::vector<std::string>>();
    const auto& cap_json = doc.at("capacity");
    if (cap_json.size() != names.size())
        throw InputError("capacity length does not match resources");
    std::vector<long long> capacity;
    for (const auto& c : cap_json) capacity.push_back(resource_to_micro(rational_from_json(c)));

    std::vector<VMType> types;
    for (const auto& tj : doc.at("types")) {
        VMType t;
        if (tj.contains("name")) t.name = tj.at("name").get<std::string>();
        for (const auto& rn : names) {
            if (!tj.contains(rn))
                throw InputError("type is missing resource field '" + rn + "'");
            t.demand.push_back(resource_to_micro(rational_from_json(tj.at(rn))));
        }
        t.reward_rate = rational_from_json(tj.at("reward"));
        t.arrival_rate = tj.contains("lambda") ? rational_from_json(tj.at("lambda")) : Rational(0);
        t.service_rate = tj.contains("mu") ? rational_from_json(tj.at("mu")) : Rational(1);
        if (tj.contains("priority")) t.priority = tj.at("priority").get<int>();
        if (tj.contains("size")) t.size = rational_from_json(tj.at("size"));
        types.push_back(std::move(t));
    }
    opts.resource_names = names;
    return make_profile(std::move(capacity), std::move(types), std::move(opts));
}

inline CloudProfile load_profile_file(const std::string& path, ProfileOptions opts = {}) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open profile: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("profile " + path + ": " + e.what());
    }
    return load_profile(doc, std::move(opts));
}

inline nlohmann::json profile_to_json(const CloudProfile& p) {
    nlohmann::json doc;
    doc["resources"] = p.resource_names;
    nlohmann::json cap = nlohmann::json::array();
    for (long long c : p.capacity) cap.push_back(ratio(c, kMicro).get_str());
    doc["capacity"] = cap;
    nlohmann::json types = nlohmann::json::array();
    for (const auto& t : p.types) {
        nlohmann::json tj;
        if (!t.name.empty()) tj["name"] = t.name;
        for (int d = 0; d < p.resource_count(); ++d)
            tj[p.resource_names[d]] = ratio(t.demand[d], kMicro).get_str();
        tj["reward"] = t.reward_rate.get_str();
        tj["lambda"] = t.arrival_rate.get_str();
        tj["mu"] = t.service_rate.get_str();
        if (t.priority != 0) tj["priority"] = t.priority;
        types.push_back(std::move(tj));
    }
    doc["types"] = types;
    return doc;
}

// The experiment family behind the approximation-ratio statistics: three
// small and three large instances off the vCPU x memory grid, server
// (80 vCPU, 640 GB), reward 8 per vCPU + 1 per GB, workloads uniform on
// [0.2, 2] (hundredths). Types that cannot fit the server are redrawn.
inline std::pair<CloudProfile, std::vector<Rational>> random_instance(std::uint64_t seed) {
    RngStream rng(seed, StreamKind::Instance, 0);
    static const long small_cpu[] = {2, 4, 8};
    static const long large_cpu[] = {32, 64};
    static const long gb_per_cpu[] = {1, 2, 4, 8, 16};

    std::vector<VMType> types;
    for (int i = 0; i < 6; ++i) {
        for (;;) {
            long cpu = i < 3 ? small_cpu[rng.below(3)] : large_cpu[rng.below(2)];
            long mem = cpu * gb_per_cpu[rng.below(5)];
            if (cpu > 80 || mem > 640) continue;
            VMType t;
            t.name = "c" + std::to_string(cpu) + "m" + std::to_string(mem);
            t.demand = {cpu * kMicro, mem * kMicro};
            t.reward_rate = 8 * cpu + mem;
            t.arrival_rate = 1;
            t.service_rate = 1;
            types.push_back(std::move(t));
            break;
        }
    }
    std::vector<Rational> rho;
    for (int i = 0; i < 6; ++i) rho.push_back(ratio(rng.uniform_int(20, 200), 100));
    for (int i = 0; i < 6; ++i) types[i].arrival_rate = rho[i];

    ProfileOptions opts;
    opts.resource_names = {"cpu", "mem"};
    return {make_profile({80 * kMicro, 640 * kMicro}, std::move(types), std::move(opts)), rho};
}

// The worst-case instance used throughout the experiments: types
// (2,2), (8,32), (4,64), (64,512) against an (80, 640) server with
// rho = (2, 1/2, 4/3, 1).
inline CloudProfile worst_case_profile() {
    auto mk = [](const char* name, long cpu, long mem, long num, long den) {
        VMType t;
        t.name = name;
        t.demand = {cpu * kMicro, mem * kMicro};
        t.reward_rate = 8 * cpu + mem;
        t.arrival_rate = make_rational(num, den);
        t.service_rate = 1;
        return t;
    };
    std::vector<VMType> types;
    types.push_back(mk("c2m2", 2, 2, 2, 1));
    types.push_back(mk("c8m32", 8, 32, 1, 2));
    types.push_back(mk("c4m64", 4, 64, 4, 3));
    types.push_back(mk("c64m512", 64, 512, 1, 1));
    ProfileOptions opts;
    opts.resource_names = {"cpu", "mem"};
    return make_profile({80 * kMicro, 640 * kMicro}, std::move(types), std::move(opts));
}

}  // namespace packsim
