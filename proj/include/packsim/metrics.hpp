#pragma once

// State-derived diagnostics: effective server counts X^(e), the q surplus
// process over greedy-configuration prefixes, and the LP-shaped Lyapunov
// value V. Pure reads over a state snapshot plus the most recent GPA output.

#include <string>
#include <vector>

#include "packsim/errors.hpp"
#include "packsim/planner.hpp"
#include "packsim/state.hpp"

namespace packsim {

// X^(e)_k = min(X_k, Xhat_k) for k in the greedy set (zero elsewhere since
// GPA never assigns other configurations). Returned aligned with greedy_set.
inline std::vector<long long> effective_counts(const SystemState& state,
                                               const GpaResult& last_gpa,
                                               const std::vector<int>& greedy_set) {
    std::vector<long long> out;
    out.reserve(greedy_set.size());
    const auto& configs = state.profile().config_set;
    for (int idx : greedy_set) {
        long long want = last_gpa.count_for(idx);
        long long have = state.config_count(configs[idx]);
        out.push_back(std::min(want, have));
    }
    return out;
}

struct QSnapshot {
    // values[i][j] over greedy-set prefixes i and types j.
    std::vector<std::vector<long long>> values;
    long long max_value = 0;
    long long min_value = 0;
};

inline QSnapshot q_values(const SystemState& state, const GpaResult& last_gpa,
                          const std::vector<int>& greedy_set, long long g) {
    const int J = state.profile().type_count();
    std::vector<long long> eff = effective_counts(state, last_gpa, greedy_set);
    QSnapshot snap;
    snap.values.assign(greedy_set.size(), std::vector<long long>(J, 0));
    std::vector<long long> slots(J, 0);
    bool first = true;
    for (std::size_t i = 0; i < greedy_set.size(); ++i) {
        const Config& k = state.profile().config_set[greedy_set[i]];
        for (int j = 0; j < J; ++j) {
            slots[j] += eff[i] * k[j];
            long long q = slots[j] - state.jobs_by_type()[j] - g;
            snap.values[i][j] = q;
            if (first || q > snap.max_value) snap.max_value = q;
            if (first || q < snap.min_value) snap.min_value = q;
            first = false;
        }
    }
    return snap;
}

// Throws if the prefix monotonicity q[i2][j] >= q[i1][j], i2 >= i1, fails.
inline void check_q_monotone(const QSnapshot& snap) {
    for (std::size_t i = 1; i < snap.values.size(); ++i)
        for (std::size_t j = 0; j < snap.values[i].size(); ++j)
            if (snap.values[i][j] < snap.values[i - 1][j])
                throw InvariantError("q process not monotone in the prefix index");
}

struct LyapunovConfig {
    Rational xi;      // > 2 Kmax + 1; defaulted from the profile
    Rational z_base;  // Z_{g_bar}
    Rational z_big;   // Z, > 4 Z_1

    static LyapunovConfig defaults(const CloudProfile& profile, const GreedyPlan& plan) {
        LyapunovConfig cfg;
        cfg.xi = 2 * profile.kmax + 2;
        cfg.z_base = 1;
        Rational z1 = 1;
        for (int i = 1; i < plan.g_bar; ++i) z1 *= cfg.xi;  // xi^(g_bar - 1)
        cfg.z_big = 4 * z1 + 1;
        return cfg;
    }
};

// V = sum_{i<=g_bar} Z_i (x_g(kbar^i) - X^(e)_{kbar^i}/L) + Z sum_j (Y_j/L - rho_j)^+,
// with Z_i = xi^(g_bar-i) z_base.
inline Rational lyapunov(const SystemState& state, const GreedyPlan& plan,
                         const GpaResult& last_gpa, const LyapunovConfig& cfg) {
    const long long L = state.server_count();
    std::vector<long long> eff = effective_counts(state, last_gpa, plan.greedy_set);
    Rational v = 0;
    Rational zi = cfg.z_base;
    for (int i = plan.g_bar; i >= 1; --i) {
        Rational gap = plan.x_g_of(plan.greedy_set[i - 1]) - ratio(eff[i - 1], L);
        v += zi * gap;
        zi *= cfg.xi;
    }
    const auto rho = plan.rho;
    for (int j = 0; j < state.profile().type_count(); ++j) {
        Rational over = ratio(state.jobs_by_type()[j], L) - rho[j];
        if (over > 0) v += cfg.z_big * over;
    }
    return v;
}

}  // namespace packsim
