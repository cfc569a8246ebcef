#pragma once

// VM types, server capacity, feasible-configuration enumeration, the
// Definition-2 configuration ordering, and the MaxReward table.
//
// Resources are fixed-point integers (the JSON loader uses micro-units,
// 10^6 per abstract unit) so feasibility comparisons are exact. Feasibility
// is a pluggable monotone predicate; the default is additive demand vs
// capacity. Everything here is immutable after make_profile() and safe to
// share across threads.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "packsim/errors.hpp"
#include "packsim/rational.hpp"

namespace packsim {

// Slot counts per type packed into one server (k in the model).
using Config = std::vector<int>;

struct VMType {
    int id = 0;  // 1-based position within the profile
    std::string name;
    std::vector<long long> demand;  // fixed-point resource units
    Rational reward_rate;           // u_j, reward per unit time per running job
    Rational arrival_rate;          // lambda_j, arrivals per unit time per unit scale
    Rational service_rate;          // mu_j, 1 / mean duration
    int priority = 0;               // 0..2; only the preemption policy reads this
    Rational size;                  // scalar job size s_j; defaults to max normalized demand
};

using FeasibilityFn = std::function<bool(const Config&)>;

struct ProfileOptions {
    std::size_t enumeration_cap = 5'000'000;
    FeasibilityFn feasibility;  // empty -> additive default
    std::vector<std::string> resource_names;
};

inline Rational config_reward(const Config& k, const std::vector<VMType>& types) {
    Rational u = 0;
    for (std::size_t j = 0; j < k.size(); ++j)
        if (k[j] != 0) u += types[j].reward_rate * k[j];
    return u;
}

namespace detail {

// Definition-2 tie rule given precomputed rewards: higher reward wins, then
// the larger count at the smallest differing index.
inline int cmp_with_rewards(const Config& a, const Rational& ua, const Config& b,
                            const Rational& ub) {
    int c = cmp(ua, ub);
    if (c != 0) return c;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] != b[j]) return a[j] > b[j] ? 1 : -1;
    }
    return 0;
}

}  // namespace detail

// Returns +1 if a comes before b in the Definition-2 order (a is "greater"),
// -1 for the reverse, 0 only for identical configurations.
inline int config_cmp(const Config& a, const Config& b, const std::vector<VMType>& types) {
    if (a.size() != b.size() || a.size() != types.size())
        throw InputError("config_cmp: dimension mismatch");
    return detail::cmp_with_rewards(a, config_reward(a, types), b, config_reward(b, types));
}

struct CloudProfile {
    std::vector<long long> capacity;
    std::vector<std::string> resource_names;
    std::vector<VMType> types;
    FeasibilityFn feasible;

    // All feasible configurations, sorted descending by the Definition-2
    // ordering; the zero configuration is always last.
    std::vector<Config> config_set;
    std::vector<Rational> config_rewards;  // U(k), aligned with config_set
    std::vector<char> config_maximal;      // aligned; no feasible componentwise superset
    int kmax = 0;                          // max total jobs per server over config_set

    // MaxReward per type-subset mask; present when J <= 20. Values index
    // config_set.
    std::vector<int> max_reward_idx;

    int type_count() const { return static_cast<int>(types.size()); }
    int resource_count() const { return static_cast<int>(capacity.size()); }

    std::vector<Rational> rho() const {
        std::vector<Rational> r;
        r.reserve(types.size());
        for (const auto& t : types) r.push_back(t.arrival_rate / t.service_rate);
        return r;
    }

    const Config& zero_config() const { return config_set.back(); }

    int max_reward_index(std::uint32_t mask) const;
    const Config& max_reward(std::uint32_t mask) const { return config_set[max_reward_index(mask)]; }
};

inline bool is_feasible(const Config& counts, const CloudProfile& profile) {
    if (counts.size() != profile.types.size())
        throw InputError("is_feasible: counts length != number of types");
    for (int c : counts)
        if (c < 0) throw InputError("is_feasible: negative count");
    return profile.feasible(counts);
}

namespace detail {

inline FeasibilityFn additive_feasibility(const std::vector<long long>& capacity,
                                          const std::vector<VMType>& types) {
    return [capacity, &types](const Config& counts) {
        for (std::size_t d = 0; d < capacity.size(); ++d) {
            long long used = 0;
            for (std::size_t j = 0; j < counts.size(); ++j) used += counts[j] * types[j].demand[d];
            if (used > capacity[d]) return false;
        }
        return true;
    };
}

inline void enumerate_rec(Config& counts, std::size_t j, const FeasibilityFn& feasible,
                          std::size_t cap, std::vector<Config>& out) {
    if (j == counts.size()) {
        if (out.size() >= cap)
            throw InputError("configuration enumeration exceeded cap of " + std::to_string(cap) +
                             " (at least " + std::to_string(out.size() + 1) +
                             " feasible configurations); raise enumeration_cap if intended");
        out.push_back(counts);
        return;
    }
    // Monotonicity lets us stop at the first infeasible count for type j.
    for (;; ++counts[j]) {
        if (!feasible(counts)) break;
        enumerate_rec(counts, j + 1, feasible, cap, out);
    }
    counts[j] = 0;
}

}  // namespace detail

// Every feasible configuration exactly once, descending Definition-2 order,
// zero configuration included (and last).
inline std::vector<Config> enumerate_configs(const std::vector<VMType>& types,
                                             const FeasibilityFn& feasible,
                                             std::size_t cap = 5'000'000) {
    std::vector<Config> out;
    Config counts(types.size(), 0);
    detail::enumerate_rec(counts, 0, feasible, cap, out);

    std::vector<Rational> rewards;
    rewards.reserve(out.size());
    for (const auto& k : out) rewards.push_back(config_reward(k, types));
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detail::cmp_with_rewards(out[a], rewards[a], out[b], rewards[b]) > 0;
    });
    std::vector<Config> sorted;
    sorted.reserve(out.size());
    for (std::size_t i : order) sorted.push_back(std::move(out[i]));
    return sorted;
}

inline int CloudProfile::max_reward_index(std::uint32_t mask) const {
    if (!max_reward_idx.empty()) return max_reward_idx[mask];
    // Fallback scan for J > 20 (no precomputed table).
    int best = static_cast<int>(config_set.size()) - 1;  // zero config
    for (std::size_t i = 0; i < config_set.size(); ++i) {
        const Config& k = config_set[i];
        bool ok = true;
        for (std::size_t j = 0; j < k.size() && ok; ++j)
            if (k[j] != 0 && !(mask & (1u << j))) ok = false;
        if (!ok) continue;
        // config_set is sorted descending, so the first hit is the argmax.
        best = static_cast<int>(i);
        break;
    }
    return best;
}

inline CloudProfile make_profile(std::vector<long long> capacity, std::vector<VMType> types,
                                 ProfileOptions opts = {}) {
    if (capacity.empty()) throw InputError("profile needs at least one resource");
    if (types.empty()) throw InputError("profile needs at least one VM type");
    if (types.size() > 31) throw InputError("more than 31 VM types is unsupported");

    CloudProfile p;
    p.capacity = std::move(capacity);
    p.resource_names = opts.resource_names;
    if (p.resource_names.empty())
        for (std::size_t d = 0; d < p.capacity.size(); ++d)
            p.resource_names.push_back("r" + std::to_string(d));
    p.types = std::move(types);
    const std::size_t n = p.capacity.size();
    const int J = p.type_count();
    for (int j = 0; j < J; ++j) {
        VMType& t = p.types[j];
        t.id = j + 1;
        if (t.demand.size() != n)
            throw InputError("type " + std::to_string(t.id) + ": demand has " +
                             std::to_string(t.demand.size()) + " components, expected " +
                             std::to_string(n));
        bool any = false;
        for (long long d : t.demand) {
            if (d < 0) throw InputError("type " + std::to_string(t.id) + ": negative demand");
            any = any || d > 0;
        }
        if (!any) throw InputError("type " + std::to_string(t.id) + ": all-zero demand");
        if (!(t.service_rate > 0))
            throw InputError("type " + std::to_string(t.id) + ": service rate must be > 0");
        if (t.reward_rate < 0 || t.arrival_rate < 0)
            throw InputError("type " + std::to_string(t.id) + ": negative rate");
        if (t.priority < 0 || t.priority > 2)
            throw InputError("type " + std::to_string(t.id) + ": priority must be 0..2");
        if (t.size == 0) {
            // Default scalar size: largest demand fraction of one server.
            for (std::size_t d = 0; d < n; ++d) {
                if (p.capacity[d] <= 0) continue;
                Rational f = ratio(t.demand[d], p.capacity[d]);
                if (f > t.size) t.size = f;
            }
        }
    }

    p.feasible = opts.feasibility ? std::move(opts.feasibility)
                                  : detail::additive_feasibility(p.capacity, p.types);

    // Each type must fit alone in an empty server.
    for (int j = 0; j < J; ++j) {
        Config e(J, 0);
        e[j] = 1;
        if (!p.feasible(e))
            throw InputError("type " + std::to_string(j + 1) +
                             " does not fit in an empty server");
    }

    p.config_set = enumerate_configs(p.types, p.feasible, opts.enumeration_cap);
    p.config_rewards.reserve(p.config_set.size());
    for (const auto& k : p.config_set) p.config_rewards.push_back(config_reward(k, p.types));

    p.kmax = 0;
    for (const auto& k : p.config_set)
        p.kmax = std::max(p.kmax, std::accumulate(k.begin(), k.end(), 0));

    p.config_maximal.assign(p.config_set.size(), 0);
    for (std::size_t i = 0; i < p.config_set.size(); ++i) {
        Config k = p.config_set[i];
        bool maximal = true;
        for (int j = 0; j < J && maximal; ++j) {
            ++k[j];
            if (p.feasible(k)) maximal = false;
            --k[j];
        }
        p.config_maximal[i] = maximal ? 1 : 0;
    }

    if (J <= 20) {
        // Subset-sum DP: best over support-subsets of each mask.
        const std::uint32_t nmask = 1u << J;
        p.max_reward_idx.assign(nmask, static_cast<int>(p.config_set.size()) - 1);
        for (std::size_t i = 0; i < p.config_set.size(); ++i) {
            std::uint32_t m = 0;
            for (int j = 0; j < J; ++j)
                if (p.config_set[i][j] != 0) m |= 1u << j;
            int& slot = p.max_reward_idx[m];
            // Descending enumeration order: keep the earliest (greatest) index.
            if (static_cast<std::size_t>(slot) > i) slot = static_cast<int>(i);
        }
        for (std::uint32_t m = 1; m < nmask; ++m) {
            for (int j = 0; j < J; ++j) {
                if (!(m & (1u << j))) continue;
                int cand = p.max_reward_idx[m ^ (1u << j)];
                if (cand < p.max_reward_idx[m]) p.max_reward_idx[m] = cand;
            }
        }
    }
    return p;
}

// Indices of maximal configurations (no feasible componentwise superset).
// Dominance-reduced LP column sets are built from these.
inline std::vector<int> maximal_config_indices(const CloudProfile& p) {
    std::vector<int> out;
    for (std::size_t i = 0; i < p.config_set.size(); ++i)
        if (p.config_maximal[i]) out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace packsim
