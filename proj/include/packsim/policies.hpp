#pragma once

// The four scheduling policies. DRA is Algorithm 2: slot reservation driven
// by GPA over the reference Y(t) + g(L), a classification/reassignment pass
// (CRA) at every update time, admissions only into Accept-Group slots, and
// at most one migration per departure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "packsim/bounds.hpp"
#include "packsim/errors.hpp"
#include "packsim/metrics.hpp"
#include "packsim/planner.hpp"
#include "packsim/rng.hpp"
#include "packsim/sim.hpp"
#include "packsim/state.hpp"

namespace packsim {

inline long long default_reservation(long long servers) {
    // ceil((ln L)^1.5): omega(log L) and o(L).
    return static_cast<long long>(std::ceil(std::pow(std::log(static_cast<double>(servers)), 1.5)));
}

struct DraConfig {
    std::function<long long(long long)> reservation;  // g(L); empty -> default above
    enum class CraPeriod { EveryEvent, EveryKEvents, EveryInterval } period =
        CraPeriod::EveryEvent;
    long long every_k = 1;
    double every_dt = 0;
    bool verify = false;  // post-CRA invariant checks (q bounds, group sizes)
};

class DraPolicy : public Policy {
public:
    explicit DraPolicy(const CloudProfile& profile, DraConfig cfg = {})
        : profile_(profile), cfg_(std::move(cfg)), greedy_set_(greedy_config_set(profile)) {}

    std::string name() const override { return "dra"; }
    const GpaResult* last_assignment() const override { return has_gpa_ ? &last_gpa_ : nullptr; }
    const std::vector<int>* greedy_configs() const override { return &greedy_set_; }
    long long reservation() const override { return g_; }
    long long last_istar() const { return istar_; }

    void on_init(SystemState& state) override {
        g_ = cfg_.reservation ? cfg_.reservation(state.server_count())
                              : default_reservation(state.server_count());
        if (g_ < 1) throw InputError("reservation factor g(L) must be >= 1");
        // Servers holding jobs but lacking a configuration adopt their
        // placement as configuration.
        for (int sid = 0; sid < state.server_count(); ++sid) {
            const ServerState& s = state.server(sid);
            bool covered = true;
            for (std::size_t j = 0; j < s.placement.size(); ++j)
                if (s.placement[j] > s.config[j]) covered = false;
            if (!covered) state.resize_config(sid, s.placement);
        }
        cra(state);
    }

    bool on_arrival(SystemState& state, int type, JobId id, double now) override {
        int target = accept_group_slot(state, type);
        if (target < 0) return false;  // rejected; CRA is skipped on rejections
        state.place_job(id, target, type);
        maybe_cra(state, now);
        return true;
    }

    void on_departure(SystemState& state, int type, int server, double now) override {
        if (!state.server(server).reject_group) {
            int source = reject_group_holder(state, type);
            if (source >= 0) {
                JobId victim = lowest_job_of(state, source, type);
                state.migrate_job(victim, server);
            }
        }
        maybe_cra(state, now);
    }

    // Classification and Reassignment. Public so tests can drive it directly.
    void cra(SystemState& state) {
        const int J = profile_.type_count();
        std::vector<long long> yhat(profile_.type_count());
        for (int j = 0; j < J; ++j) yhat[j] = state.jobs_by_type()[j] + g_;
        last_gpa_ = gpa(yhat, state.server_count(), profile_);
        has_gpa_ = true;

        for (int sid = 0; sid < state.server_count(); ++sid) {
            state.server_mut(sid).rank = J + 1;
            state.server_mut(sid).reject_group = false;
        }

        long long istar = J;
        for (std::size_t i = 0; i < last_gpa_.chosen.size(); ++i) {
            const auto& [cfg_idx, want] = last_gpa_.chosen[i];
            const Config& k = profile_.config_set[cfg_idx];
            const int rank = static_cast<int>(i) + 1;
            long long have = state.config_count(k);
            if (have >= want) {
                // Rank the `want` servers with the highest recency indexes
                // (the oldest) as effective.
                if (want > 0) {
                    const auto& lst = state.per_config().at(k);
                    for (long long idx = have - want; idx < have; ++idx)
                        state.server_mut(lst[idx]).rank = rank;
                }
            } else {
                {
                    const auto& lst = state.per_config().at(k);
                    for (int sid : lst) state.server_mut(sid).rank = rank;
                }
                long long need = want - have;
                while (need > 0) {
                    int le = empty_unranked_server(state);
                    if (le < 0) {
                        istar = std::min(istar, static_cast<long long>(rank));
                        break;
                    }
                    state.reassign(le, k);
                    state.server_mut(le).rank = rank;
                    --need;
                }
            }
        }
        istar_ = istar;

        // Reject Group: rank above I* and recency index 1 in any configuration.
        for (const auto& [k, lst] : state.per_config()) {
            int head = lst.front();
            if (state.server(head).rank > istar) state.server_mut(head).reject_group = true;
        }

        if (cfg_.verify) verify_after_cra(state);
        ++cra_runs_;
    }

    long long cra_runs() const { return cra_runs_; }

private:
    void maybe_cra(SystemState& state, double now) {
        switch (cfg_.period) {
            case DraConfig::CraPeriod::EveryEvent:
                cra(state);
                break;
            case DraConfig::CraPeriod::EveryKEvents:
                if (++events_since_cra_ >= cfg_.every_k) {
                    events_since_cra_ = 0;
                    cra(state);
                }
                break;
            case DraConfig::CraPeriod::EveryInterval:
                if (now - last_cra_at_ >= cfg_.every_dt) {
                    last_cra_at_ = now;
                    cra(state);
                }
                break;
        }
    }

    // AG_j: Accept-Group server with an empty type-j slot. Lowest rank first,
    // then highest recency index (oldest), then lowest server id.
    int accept_group_slot(const SystemState& state, int type) const {
        int best = -1, best_rank = 0, best_idx = 0;
        for (const auto& [k, lst] : state.per_config()) {
            if (k[type] == 0) continue;
            for (std::size_t pos = 0; pos < lst.size(); ++pos) {
                int sid = lst[pos];
                const ServerState& s = state.server(sid);
                if (s.reject_group) continue;
                if (s.config[type] - s.placement[type] <= 0) continue;
                int idx = static_cast<int>(pos) + 1;
                if (best < 0 || s.rank < best_rank ||
                    (s.rank == best_rank && (idx > best_idx || (idx == best_idx && sid < best)))) {
                    best = sid;
                    best_rank = s.rank;
                    best_idx = idx;
                }
            }
        }
        return best;
    }

    // RG_j: highest-rank Reject-Group server holding a type-j job.
    int reject_group_holder(const SystemState& state, int type) const {
        int best = -1, best_rank = -1;
        for (int sid = 0; sid < state.server_count(); ++sid) {
            const ServerState& s = state.server(sid);
            if (!s.reject_group || s.placement[type] <= 0) continue;
            if (s.rank > best_rank) {
                best = sid;
                best_rank = s.rank;
            }
        }
        return best;
    }

    static JobId lowest_job_of(const SystemState& state, int sid, int type) {
        JobId best = -1;
        for (JobId id : state.jobs_on(sid))
            if (state.jobs().at(id).type == type && (best < 0 || id < best)) best = id;
        if (best < 0) throw InvariantError("no resident job of the requested type");
        return best;
    }

    // l_e: empty rank-(J+1) server; zero-configuration servers first (they
    // sit last in the Definition-2 order), then configurations latest in
    // that order, then lowest id.
    int empty_unranked_server(const SystemState& state) const {
        const int J = profile_.type_count();
        int best = -1;
        std::size_t best_pos = 0;
        for (const auto& [k, lst] : state.per_config()) {
            std::size_t pos = config_position(k);
            if (best >= 0 && pos < best_pos) continue;
            for (int sid : lst) {
                const ServerState& s = state.server(sid);
                if (s.rank != J + 1 || !state.server_empty(sid)) continue;
                if (best < 0 || pos > best_pos || (pos == best_pos && sid < best)) {
                    best = sid;
                    best_pos = pos;
                }
            }
        }
        return best;
    }

    std::size_t config_position(const Config& k) const {
        auto it = std::lower_bound(
            profile_.config_set.begin(), profile_.config_set.end(), k,
            [this](const Config& a, const Config& b) {
                return config_cmp(a, b, profile_.types) > 0;
            });
        return static_cast<std::size_t>(it - profile_.config_set.begin());
    }

    void verify_after_cra(SystemState& state) {
        QSnapshot q = q_values(state, last_gpa_, greedy_set_, g_);
        check_q_monotone(q);
        if (q.max_value >= profile_.kmax)
            throw InvariantError("q exceeded Kmax after CRA: " + std::to_string(q.max_value));
        long long rg = 0;
        for (int sid = 0; sid < state.server_count(); ++sid) {
            const ServerState& s = state.server(sid);
            if (s.reject_group) ++rg;
            if (s.rank < 1 || s.rank > profile_.type_count() + 1)
                throw InvariantError("rank out of range");
        }
        if (rg > static_cast<long long>(greedy_set_.size()))
            throw InvariantError("Reject Group larger than the greedy configuration set");
    }

    const CloudProfile& profile_;
    DraConfig cfg_;
    std::vector<int> greedy_set_;
    GpaResult last_gpa_;
    bool has_gpa_ = false;
    long long g_ = 1;
    long long istar_ = 0;
    long long events_since_cra_ = 0;
    double last_cra_at_ = 0;
    long long cra_runs_ = 0;
};

// DRA plus Google-style preemption: when a job of priority 1 or 2 is
// rejected, priority-0 jobs are preempted in ascending size order until their
// total size reaches g(L) times the rejected job's size (or none remain),
// then admission is retried once.
class DraPreemptPolicy : public DraPolicy {
public:
    explicit DraPreemptPolicy(const CloudProfile& profile, DraConfig cfg = {})
        : DraPolicy(profile, std::move(cfg)), profile_(profile) {}

    std::string name() const override { return "dra-preempt"; }

    bool on_arrival(SystemState& state, int type, JobId id, double now) override {
        if (DraPolicy::on_arrival(state, type, id, now)) return true;
        if (profile_.types[type].priority < 1) return false;

        Rational target = from_ll(reservation()) * profile_.types[type].size;
        Rational freed = 0;
        // Victims ordered by (size, type id, job id).
        std::vector<std::pair<JobId, int>> victims;
        for (const auto& [jid, rec] : state.jobs())
            if (profile_.types[rec.type].priority == 0) victims.emplace_back(jid, rec.type);
        std::sort(victims.begin(), victims.end(), [this](const auto& a, const auto& b) {
            const Rational &sa = profile_.types[a.second].size, &sb = profile_.types[b.second].size;
            if (sa != sb) return sa < sb;
            if (a.second != b.second) return a.second < b.second;
            return a.first < b.first;
        });
        bool any = false;
        for (const auto& [jid, jtype] : victims) {
            if (freed >= target) break;
            state.remove_job(jid, /*preempted=*/true);
            freed += profile_.types[jtype].size;
            any = true;
        }
        if (!any) return false;
        cra(state);
        return DraPolicy::on_arrival(state, type, id, now);
    }

private:
    const CloudProfile& profile_;
};

// Power-of-d-choices baseline: sample d servers with replacement, place in
// the least loaded sampled server where the job fits (configurations track
// placements; no reservation).
class PowerOfDPolicy : public Policy {
public:
    PowerOfDPolicy(const CloudProfile& profile, int d, std::uint64_t seed)
        : profile_(profile), d_(d), rng_(seed, StreamKind::Policy, 0) {
        if (d < 1) throw InputError("power-of-d needs d >= 1");
    }

    std::string name() const override { return "pod"; }

    bool on_arrival(SystemState& state, int type, JobId id, double /*now*/) override {
        int best = -1;
        double best_load = 0;
        for (int pick = 0; pick < d_; ++pick) {
            int sid = static_cast<int>(rng_.below(static_cast<std::uint64_t>(state.server_count())));
            Config grown = state.server(sid).placement;
            ++grown[type];
            if (!profile_.feasible(grown)) continue;
            double load = normalized_load(state.server(sid).placement);
            if (best < 0 || load < best_load || (load == best_load && sid < best)) {
                best = sid;
                best_load = load;
            }
        }
        if (best < 0) return false;
        Config grown = state.server(best).placement;
        ++grown[type];
        state.resize_config(best, grown);
        state.place_job(id, best, type);
        return true;
    }

    void on_departure(SystemState& state, int /*type*/, int server, double /*now*/) override {
        state.resize_config(server, state.server(server).placement);
    }

    // Sum over resources of used fraction of capacity.
    double normalized_load(const Config& placement) const {
        double load = 0;
        for (int d = 0; d < profile_.resource_count(); ++d) {
            long long used = 0;
            for (std::size_t j = 0; j < placement.size(); ++j)
                used += static_cast<long long>(placement[j]) * profile_.types[j].demand[d];
            load += static_cast<double>(used) / static_cast<double>(profile_.capacity[d]);
        }
        return load;
    }

private:
    const CloudProfile& profile_;
    int d_;
    RngStream rng_;
};

// Infinite-server LP reference: replays an arrival log as an admit-all
// occupancy Yhat(t) and reports F*(L, Yhat(t)) held piecewise-constant
// between solve instants. An upper bound on any policy's reward rate.
struct UpperBoundSeries {
    std::vector<std::pair<double, double>> points;  // (t, bound)

    double at(double t) const {
        double v = points.empty() ? 0.0 : points.front().second;
        for (const auto& [pt, pv] : points) {
            if (pt > t) break;
            v = pv;
        }
        return v;
    }
};

inline UpperBoundSeries upper_bound_reference(const CloudProfile& profile, int L,
                                              const std::vector<LoggedArrival>& log,
                                              const std::vector<double>& solve_times) {
    const int J = profile.type_count();
    UpperBoundSeries series;
    if (solve_times.empty()) return series;

    struct Dep {
        double t;
        int type;
    };
    std::vector<Dep> deps;
    deps.reserve(log.size());
    for (const auto& a : log) deps.push_back({a.t + a.duration, a.type});
    std::sort(deps.begin(), deps.end(), [](const Dep& a, const Dep& b) { return a.t < b.t; });

    std::vector<double> yhat(J, 0);
    std::size_t ai = 0, di = 0;
    for (double t : solve_times) {
        while (ai < log.size() && log[ai].t <= t) ++yhat[log[ai++].type];
        while (di < deps.size() && deps[di].t <= t) --yhat[deps[di++].type];
        BoundResultT<double> sol =
            optimal_static<double>(static_cast<double>(L), yhat, profile);
        if (sol.status != LpStatus::Optimal)
            throw InvariantError("upper-bound LP did not solve to optimality");
        series.points.emplace_back(t, sol.objective);
    }
    return series;
}

// Every-N-events variant of the solve schedule.
inline std::vector<double> solve_times_by_stride(const std::vector<LoggedArrival>& log,
                                                 long long stride, double horizon) {
    std::vector<double> times;
    long long n = 0;
    for (const auto& a : log) {
        if (++n % stride == 0) times.push_back(a.t);
    }
    if (times.empty() || times.back() < horizon) times.push_back(horizon);
    return times;
}

}  // namespace packsim
