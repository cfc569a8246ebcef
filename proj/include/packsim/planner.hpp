#pragma once

// Greedy packing machinery: GPA (the iterative MaxReward placement over a
// shrinking type set), the Global Greedy Assignment built from the amin/assgn
// recursion, the workload-agnostic greedy configuration set, the adversarial
// instance family, and the monotone-greedy sampling probe. All arithmetic is
// exact rational: the defining equalities rho_j = sum_l k_j^(l) z^(l) and the
// ordering tie rules are brittle under floating point.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "packsim/errors.hpp"
#include "packsim/profile.hpp"
#include "packsim/rational.hpp"
#include "packsim/rng.hpp"

namespace packsim {

struct GpaResult {
    // One entry per iteration, in iteration order: (config_set index, servers).
    std::vector<std::pair<int, long long>> chosen;
    long long assigned_total = 0;

    long long count_for(int config_index) const {
        long long c = 0;
        for (const auto& [idx, n] : chosen)
            if (idx == config_index) c += n;
        return c;
    }
};

namespace detail {

inline long long ceil_div(long long a, long long b) {
    // b > 0; rounds toward +infinity.
    return a > 0 ? (a + b - 1) / b : a / b;
}

}  // namespace detail

// Algorithm-1 greedy placement. Ties in the argmin are broken by smallest
// type id; counts are clamped at zero (a type can be overshot below zero
// before it becomes the argmin, and a negative server count is meaningless).
inline GpaResult gpa(const std::vector<long long>& reference, long long total_servers,
                     const CloudProfile& profile) {
    const int J = profile.type_count();
    if (static_cast<int>(reference.size()) != J)
        throw InputError("gpa: reference vector has wrong length");
    if (total_servers < 0) throw InputError("gpa: negative server count");

    std::vector<long long> r = reference;
    long long n_left = total_servers;
    std::uint32_t mask = (J >= 31) ? 0x7fffffffu : ((1u << J) - 1);

    GpaResult out;
    out.chosen.reserve(J);
    while (mask != 0) {
        int ci = profile.max_reward_index(mask);
        const Config& k = profile.config_set[ci];
        int jstar = -1;
        long long best = 0;
        for (int j = 0; j < J; ++j) {
            if (k[j] <= 0) continue;
            long long q = detail::ceil_div(r[j], k[j]);
            if (jstar < 0 || q < best) {
                jstar = j;
                best = q;
            }
        }
        if (jstar < 0)
            throw InvariantError("gpa: MaxReward configuration has empty support");
        long long x = std::min(std::max(best, 0LL), n_left);
        out.chosen.emplace_back(ci, x);
        if (x > 0) {
            for (int j = 0; j < J; ++j) r[j] -= x * static_cast<long long>(k[j]);
            n_left -= x;
            out.assigned_total += x;
        }
        mask &= ~(1u << jstar);
    }
    return out;
}

struct GreedyPlan {
    std::vector<Rational> rho;
    std::vector<int> sigma;       // permutation of type indices (0-based), length J
    std::vector<int> config_idx;  // k^(1..J+1) as config_set indices; last entry is the zero config
    std::vector<Rational> z;      // z^(1..J)
    int i_g = 0;                  // saturation index, 1..J+1
    std::vector<std::pair<int, Rational>> x_g;  // nonzero entries only, (config_set index, fraction)
    std::vector<int> greedy_set;  // kbar^(1..c_g) as config_set indices, Definition-2 descending
    std::vector<int> m;           // m[j] = 1-based greedy_set position of k^(j+1), j = 0..J
    int g_bar = 0;                // m(i_g)
    Rational u_greedy;            // eq-13 objective of x_g

    Rational x_g_of(int config_index) const {
        for (const auto& [idx, v] : x_g)
            if (idx == config_index) return v;
        return Rational(0);
    }
};

// Definition-7 set: every MaxReward output over every nonempty type subset,
// plus the zero configuration; descending Definition-2 order. Because
// config_set is itself sorted descending, ascending indices give the order.
inline std::vector<int> greedy_config_set(const CloudProfile& profile) {
    const int J = profile.type_count();
    if (J > 20) throw InputError("greedy configuration set requires J <= 20");
    std::vector<int> idxs;
    for (std::uint32_t mask = 1; mask < (1u << J); ++mask)
        idxs.push_back(profile.max_reward_index(mask));
    idxs.push_back(static_cast<int>(profile.config_set.size()) - 1);  // zero config
    std::sort(idxs.begin(), idxs.end());
    idxs.erase(std::unique(idxs.begin(), idxs.end()), idxs.end());
    return idxs;
}

// Appendix-A recursion: sigma(j) = amin(j), z^(j) = assgn(j), with ties going
// to the lowest type index. Verifies the Proposition-1 equalities exactly.
inline GreedyPlan global_greedy(const std::vector<Rational>& rho, const CloudProfile& profile) {
    const int J = profile.type_count();
    if (static_cast<int>(rho.size()) != J) throw InputError("global_greedy: rho length mismatch");
    for (const auto& v : rho)
        if (v < 0) throw InputError("global_greedy: negative workload");

    GreedyPlan plan;
    plan.rho = rho;
    std::uint32_t mask = (1u << J) - 1;
    for (int step = 0; step < J; ++step) {
        int ci = profile.max_reward_index(mask);
        const Config& k = profile.config_set[ci];
        int amin = -1;
        Rational best;
        for (int i = 0; i < J; ++i) {
            if (!(mask & (1u << i)) || k[i] <= 0) continue;
            Rational d = rho[i];
            for (int l = 0; l < step; ++l) {
                int kl = profile.config_set[plan.config_idx[l]][i];
                if (kl != 0) d -= plan.z[l] * kl;
            }
            d /= k[i];
            if (amin < 0 || d < best) {
                amin = i;
                best = d;
            }
        }
        if (amin < 0) throw InvariantError("global_greedy: empty MaxReward support");
        if (best < 0) throw InvariantError("global_greedy: negative assignment z");
        plan.config_idx.push_back(ci);
        plan.sigma.push_back(amin);
        plan.z.push_back(best);
        mask &= ~(1u << amin);
    }
    plan.config_idx.push_back(static_cast<int>(profile.config_set.size()) - 1);  // k^(J+1) = 0

    // Proposition-1 condition (1), exact: rho_{sigma(j)} = sum_{l<=j} k^(l) z^(l).
    for (int j = 0; j < J; ++j) {
        Rational s = 0;
        for (int l = 0; l <= j; ++l) {
            int kl = profile.config_set[plan.config_idx[l]][plan.sigma[j]];
            if (kl != 0) s += plan.z[l] * kl;
        }
        if (s != rho[plan.sigma[j]])
            throw InvariantError("global_greedy: Proposition-1 equality failed for type " +
                                 std::to_string(plan.sigma[j] + 1));
    }
    // Condition (2) on the produced permutation, over pairs the amin domain
    // actually compared: if sigma(j') was already exactly covered when
    // sigma(j) was chosen and was a candidate there, the lower id must have
    // been picked first.
    for (int j = 0; j < J; ++j) {
        for (int jp = j + 1; jp < J; ++jp) {
            int t = plan.sigma[jp];
            if (profile.config_set[plan.config_idx[j]][t] <= 0) continue;
            Rational s = 0;
            for (int l = 0; l <= j; ++l) {
                int kl = profile.config_set[plan.config_idx[l]][t];
                if (kl != 0) s += plan.z[l] * kl;
            }
            if (s == rho[t] && plan.sigma[j] > t)
                throw InvariantError("global_greedy: Proposition-1 ordering condition failed");
        }
    }

    // Definition 6: saturation index and the normalized assignment.
    Rational total = 0;
    plan.i_g = J + 1;
    for (int i = 0; i < J; ++i) {
        if (total + plan.z[i] >= 1) {
            plan.i_g = i + 1;
            break;
        }
        total += plan.z[i];
    }
    Rational acc = 0;
    for (int i = 1; i <= plan.i_g; ++i) {
        Rational v = (i < plan.i_g) ? plan.z[i - 1] : Rational(1 - acc);
        acc += v;
        if (v != 0) plan.x_g.emplace_back(plan.config_idx[i - 1], v);
    }

    plan.greedy_set = greedy_config_set(profile);
    plan.m.resize(J + 1);
    for (int j = 0; j <= J; ++j) {
        auto it = std::lower_bound(plan.greedy_set.begin(), plan.greedy_set.end(),
                                   plan.config_idx[j]);
        if (it == plan.greedy_set.end() || *it != plan.config_idx[j])
            throw InvariantError("global_greedy: configuration missing from the greedy set");
        plan.m[j] = static_cast<int>(it - plan.greedy_set.begin()) + 1;
    }
    plan.g_bar = plan.m[plan.i_g - 1];

    plan.u_greedy = 0;
    for (const auto& [idx, v] : plan.x_g) plan.u_greedy += v * profile.config_rewards[idx];
    return plan;
}

// eq-13 objective of the plan's normalized assignment.
inline Rational greedy_reward(const GreedyPlan& plan, const CloudProfile& profile) {
    Rational u = 0;
    for (const auto& [idx, v] : plan.x_g) u += v * profile.config_rewards[idx];
    return u;
}

struct AdversarialInstance {
    CloudProfile profile;
    std::vector<Rational> rho;
    Rational u_greedy_closed;  // (1 - (1-1/J)^J) u
    Rational u_star_closed;    // (1 - p + N/(N+1) p) u,  p = (1-1/J)^(J-1)
};

// Appendix-C family: J types over J+1 resources. Type i < J fits exactly J
// times alone, type J exactly N+1 times, and the mixed configuration
// (1,...,1,N) is exactly feasible. Resource units are integers by scaling
// the server to J*N*(N+1) per dimension.
inline AdversarialInstance gen_adversarial(int J, long long N, const Rational& u) {
    if (J < 2) throw InputError("gen_adversarial: J must be >= 2");
    if (N < 1) throw InputError("gen_adversarial: N must be >= 1");
    const long long S = static_cast<long long>(J) * N * (N + 1);

    Rational frac(J - 1, J);  // (J-1)/J
    frac.canonicalize();
    std::vector<VMType> types;
    Rational upow = u / J;
    for (int i = 0; i < J - 1; ++i) {
        VMType t;
        t.demand.assign(J + 1, 0);
        t.demand[i] = N * (N + 1);      // 1/J of resource i
        t.demand[J] = N * (N + 1);      // 1/J of resource J+1
        t.reward_rate = upow;
        t.arrival_rate = 1;
        t.service_rate = 1;
        types.push_back(std::move(t));
        upow *= frac;
    }
    {
        VMType t;
        t.demand.assign(J + 1, 0);
        t.demand[J - 1] = static_cast<long long>(J) * N;  // 1/(N+1) of resource J
        t.demand[J] = N + 1;                              // 1/(JN) of resource J+1
        // u_J = (1/(N+1)) ((J-1)/J)^(J-1) u;  upow currently = (u/J) frac^(J-1).
        t.reward_rate = upow * J / from_ll(N + 1);
        t.arrival_rate = from_ll(N);
        t.service_rate = 1;
        types.push_back(std::move(t));
    }

    AdversarialInstance inst{
        make_profile(std::vector<long long>(J + 1, S), std::move(types)), {}, 0, 0};
    inst.rho.assign(J, Rational(1));
    inst.rho[J - 1] = from_ll(N);

    Rational p = 1;
    for (int i = 0; i < J - 1; ++i) p *= frac;  // (1-1/J)^(J-1)
    inst.u_star_closed = (1 - p + ratio(N, N + 1) * p) * u;
    inst.u_greedy_closed = (1 - p * frac) * u;
    return inst;
}

struct MonotoneProbeReport {
    struct Violation {
        std::vector<Rational> rho_hi, rho_lo;
        Rational u_hi, u_lo;
    };
    long samples = 0;
    std::vector<Violation> violations;
};

// Definition-8 sampling probe: draws rho1 >= rho2 pairs and reports every
// pair where U^(g) decreased by more than 1e-9. Evidence, not proof.
inline MonotoneProbeReport check_monotone_greedy(const CloudProfile& profile, long samples,
                                                 std::uint64_t seed) {
    if (samples < 1) throw InputError("check_monotone_greedy: samples must be >= 1");
    const int J = profile.type_count();
    Rational hi_cap = 0;
    for (const auto& r : profile.rho())
        if (r > hi_cap) hi_cap = r;
    if (hi_cap < 1) hi_cap = 1;
    hi_cap *= 2;

    RngStream rng(seed, StreamKind::Instance, 0);
    const Rational tol(1, 1'000'000'000);
    MonotoneProbeReport report;
    report.samples = samples;
    for (long s = 0; s < samples; ++s) {
        std::vector<Rational> rho1(J), rho2(J);
        for (int j = 0; j < J; ++j) {
            rho1[j] = make_rational(rng.uniform_int(0, 1000), 1000) * hi_cap;
            rho2[j] = rho1[j] * make_rational(rng.uniform_int(0, 1000), 1000);
        }
        Rational u1 = global_greedy(rho1, profile).u_greedy;
        Rational u2 = global_greedy(rho2, profile).u_greedy;
        if (u1 < u2 - tol)
            report.violations.push_back({std::move(rho1), std::move(rho2), u1, u2});
    }
    return report;
}

// Appendix-B bound: with reference floor(L rho), GPA's count on kbar^(i)
// deviates from L x_g(kbar^(i)) by at most (Kmax+1)^(i-1). Returns the first
// violating greedy-set position, or nullopt.
inline std::optional<int> deviation_bound_violation(const GreedyPlan& plan,
                                                    const GpaResult& assignment, long long L,
                                                    const CloudProfile& profile) {
    mpz_class base(profile.kmax + 1), bound(1);
    for (std::size_t i = 0; i < plan.greedy_set.size(); ++i) {
        Rational dev = from_ll(assignment.count_for(plan.greedy_set[i])) -
                       from_ll(L) * plan.x_g_of(plan.greedy_set[i]);
        if (dev < 0) dev = -dev;
        if (dev > Rational(bound)) return static_cast<int>(i) + 1;
        bound *= base;
    }
    return std::nullopt;
}

}  // namespace packsim
