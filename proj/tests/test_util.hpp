#pragma once

// Shared fixtures and brute-force oracles for the unit suites.

#include <set>
#include <vector>

#include "packsim/profile.hpp"
#include "packsim/profile_io.hpp"

namespace packsim::testing {

inline VMType mk_type(std::vector<long long> demand_micro, long reward, long lambda_num = 1,
                      long lambda_den = 1, long mu = 1) {
    VMType t;
    t.demand = std::move(demand_micro);
    t.reward_rate = reward;
    t.arrival_rate = make_rational(lambda_num, lambda_den);
    t.service_rate = mu;
    return t;
}

// The introduction's three-type instance: (0.6,0.6) reward 4, (0.7,0.1) and
// (0.1,0.7) reward 3 each, unit-capacity server.
inline CloudProfile intro_profile() {
    std::vector<VMType> types;
    types.push_back(mk_type({600'000, 600'000}, 4));
    types.push_back(mk_type({700'000, 100'000}, 3));
    types.push_back(mk_type({100'000, 700'000}, 3));
    return make_profile({1'000'000, 1'000'000}, std::move(types));
}

// Exhaustive grid oracle for configuration enumeration (additive model).
inline std::set<Config> grid_enumerate(const std::vector<long long>& capacity,
                                       const std::vector<VMType>& types) {
    const int J = static_cast<int>(types.size());
    std::vector<int> maxc(J, 0);
    for (int j = 0; j < J; ++j) {
        long long m = -1;
        for (std::size_t d = 0; d < capacity.size(); ++d) {
            if (types[j].demand[d] == 0) continue;
            long long fit = capacity[d] / types[j].demand[d];
            m = m < 0 ? fit : std::min(m, fit);
        }
        maxc[j] = static_cast<int>(m);
    }
    std::set<Config> out;
    Config counts(J, 0);
    for (;;) {
        bool ok = true;
        for (std::size_t d = 0; d < capacity.size() && ok; ++d) {
            long long used = 0;
            for (int j = 0; j < J; ++j) used += static_cast<long long>(counts[j]) * types[j].demand[d];
            ok = used <= capacity[d];
        }
        if (ok) out.insert(counts);
        int j = 0;
        while (j < J && ++counts[j] > maxc[j]) counts[j++] = 0;
        if (j == J) break;
    }
    return out;
}

}  // namespace packsim::testing
