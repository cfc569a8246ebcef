#pragma once

// Continuous-time discrete-event engine. Poisson arrivals at rate lambda_j L
// with exponential services, or trace-driven events. One run is strictly
// single-threaded and bit-deterministic for a given seed: per-type arrival
// and service streams are derived from the run seed, every arrival's service
// duration is drawn when the arrival is generated (so admission decisions
// cannot desynchronize streams across policies), and event ties break by
// insertion sequence. Reward is integrated exactly between events.

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "packsim/metrics.hpp"
#include "packsim/planner.hpp"
#include "packsim/profile.hpp"
#include "packsim/rng.hpp"
#include "packsim/state.hpp"

namespace packsim {

struct Policy {
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual void on_init(SystemState&) {}
    // Admit (place via state primitives, return true) or reject (return false).
    virtual bool on_arrival(SystemState& state, int type, JobId id, double now) = 0;
    // Called after the departing job has been removed from `server`.
    virtual void on_departure(SystemState& state, int type, int server, double now) {}
    // DRA-style policies expose their reservation bookkeeping for diagnostics.
    virtual const GpaResult* last_assignment() const { return nullptr; }
    virtual const std::vector<int>* greedy_configs() const { return nullptr; }
    virtual long long reservation() const { return 0; }
};

struct TraceJob {
    double at = 0;
    int type = 0;
    double duration = 0;
};

struct Sample {
    double t = 0;
    double reward_rate = 0;
    std::vector<long long> y;
    std::optional<long long> q_max;
    std::optional<double> lyapunov;
    SimCounters counters;
};

struct SimReport {
    std::string policy;
    int L = 0;
    double horizon = 0;
    std::uint64_t seed = 0;
    double sample_dt = 0;
    std::vector<Sample> series;
    SimCounters counters;
    double time_avg_reward = 0;         // integral over [0, horizon] / horizon
    double second_half_avg_reward = 0;  // integral over [horizon/2, horizon] / (horizon/2)
    double final_reward_rate = 0;
    std::uint64_t hash = 0;
};

struct LoggedArrival {
    double t = 0;
    int type = 0;
    double duration = 0;
};

struct SimOptions {
    double horizon = 0;
    std::uint64_t seed = 1;
    double sample_dt = 0;  // 0: horizon/500 in trace mode, 0.01 mean service times otherwise
    bool check_invariants = true;
    bool compute_lyapunov = false;  // stochastic mode only; needs the true rho
    bool record_event_log = false;
    std::vector<LoggedArrival>* event_log = nullptr;
};

namespace detail {

enum class EventKind { Arrival, Departure, ShadowDeparture, TraceArrival };

struct Event {
    double t;
    long long seq;
    EventKind kind;
    int type;
    JobId job;
    double duration;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

template <class T>
std::uint64_t fnv1a_value(std::uint64_t h, const T& v) {
    return fnv1a(h, &v, sizeof(v));
}

class SimRun {
public:
    SimRun(const CloudProfile& profile, int L, Policy& policy, const SimOptions& opts,
           const std::vector<TraceJob>* trace)
        : profile_(profile), policy_(policy), opts_(opts), trace_(trace), state_(profile, L) {
        if (opts.horizon <= 0) throw InputError("horizon must be positive");
        const int J = profile.type_count();
        reward_per_job_.reserve(J);
        for (const auto& t : profile.types) reward_per_job_.push_back(t.reward_rate.get_d());
        shadow_y_.assign(J, 0);

        sample_dt_ = opts.sample_dt;
        if (sample_dt_ <= 0) {
            if (trace_) {
                sample_dt_ = opts.horizon / 500.0;
            } else {
                double mean_service = 0;
                for (const auto& t : profile.types) mean_service += 1.0 / t.service_rate.get_d();
                mean_service /= J;
                sample_dt_ = 0.01 * mean_service;
            }
        }
    }

    SimReport run() {
        const int J = profile_.type_count();
        if (trace_) {
            for (const auto& job : *trace_) {
                if (job.at > opts_.horizon) continue;
                push({job.at, seq_++, EventKind::TraceArrival, job.type, 0, job.duration});
            }
        } else {
            arrival_rng_.reserve(J);
            service_rng_.reserve(J);
            for (int j = 0; j < J; ++j) {
                arrival_rng_.emplace_back(opts_.seed, StreamKind::Arrival,
                                          static_cast<std::uint64_t>(j));
                service_rng_.emplace_back(opts_.seed, StreamKind::Service,
                                          static_cast<std::uint64_t>(j));
                double lambda = profile_.types[j].arrival_rate.get_d() * state_.server_count();
                if (lambda <= 0) continue;  // type carries no traffic
                schedule_next_arrival(j, 0.0, lambda);
            }
        }

        policy_.on_init(state_);
        if (opts_.check_invariants) state_.validate();

        while (!queue_.empty() && queue_.top().t <= opts_.horizon) {
            Event ev = queue_.top();
            queue_.pop();
            advance_to(ev.t);
            switch (ev.kind) {
                case EventKind::Arrival: {
                    double lambda =
                        profile_.types[ev.type].arrival_rate.get_d() * state_.server_count();
                    schedule_next_arrival(ev.type, ev.t, lambda);
                    handle_arrival(ev.type, ev.t, ev.duration);
                    break;
                }
                case EventKind::TraceArrival:
                    handle_arrival(ev.type, ev.t, ev.duration);
                    break;
                case EventKind::Departure: {
                    if (!state_.jobs().count(ev.job)) break;  // preempted earlier
                    JobRec rec = state_.remove_job(ev.job);
                    ++state_.counters.departures;
                    policy_.on_departure(state_, rec.type, rec.server, ev.t);
                    break;
                }
                case EventKind::ShadowDeparture:
                    --shadow_y_[ev.type];
                    break;
            }
            if (opts_.check_invariants) check_event_invariants();
        }
        advance_to(opts_.horizon);
        emit_sample(opts_.horizon);

        SimReport rep;
        rep.policy = policy_.name();
        rep.L = state_.server_count();
        rep.horizon = opts_.horizon;
        rep.seed = opts_.seed;
        rep.sample_dt = sample_dt_;
        rep.series = std::move(series_);
        rep.counters = state_.counters;
        rep.time_avg_reward = reward_integral_ / opts_.horizon;
        rep.second_half_avg_reward = second_half_integral_ / (opts_.horizon / 2.0);
        rep.final_reward_rate = reward_rate();
        rep.hash = report_hash(rep);
        return rep;
    }

private:
    void push(Event ev) { queue_.push(ev); }

    void schedule_next_arrival(int type, double now, double lambda) {
        if (lambda <= 0) return;
        double t = now + arrival_rng_[type].exponential(lambda);
        double mu = profile_.types[type].service_rate.get_d();
        double duration = service_rng_[type].exponential(mu);
        push({t, seq_++, EventKind::Arrival, type, 0, duration});
    }

    void handle_arrival(int type, double now, double duration) {
        ++shadow_y_[type];
        push({now + duration, seq_++, EventKind::ShadowDeparture, type, 0, 0});
        if (opts_.event_log) opts_.event_log->push_back({now, type, duration});

        JobId id = next_job_++;
        bool admitted = policy_.on_arrival(state_, type, id, now);
        if (admitted) {
            if (!state_.jobs().count(id))
                throw InvariantError("policy reported admission without placing the job");
            ++state_.counters.admissions;
            push({now + duration, seq_++, EventKind::Departure, type, id, 0});
        } else {
            ++state_.counters.rejections;
        }
    }

    double reward_rate() const {
        double r = 0;
        for (std::size_t j = 0; j < reward_per_job_.size(); ++j)
            r += reward_per_job_[j] * static_cast<double>(state_.jobs_by_type()[j]);
        return r;
    }

    // Integrates the piecewise-constant reward up to t and emits any sample
    // points passed along the way.
    void advance_to(double t) {
        while (next_sample_ < t) {
            integrate_to(next_sample_);
            emit_sample(next_sample_);
            next_sample_ += sample_dt_;
        }
        integrate_to(t);
    }

    void integrate_to(double t) {
        if (t <= state_.clock) return;
        double rate = reward_rate();
        double lo = state_.clock, hi = t;
        reward_integral_ += rate * (hi - lo);
        double half = opts_.horizon / 2.0;
        if (hi > half) second_half_integral_ += rate * (hi - std::max(lo, half));
        state_.clock = t;
    }

    void emit_sample(double t) {
        Sample s;
        s.t = t;
        s.reward_rate = reward_rate();
        s.y = state_.jobs_by_type();
        s.counters = state_.counters;
        if (const GpaResult* gpa = policy_.last_assignment()) {
            const std::vector<int>* gset = policy_.greedy_configs();
            if (gset) {
                QSnapshot q = q_values(state_, *gpa, *gset, policy_.reservation());
                s.q_max = q.max_value;
                if (lyap_plan_) s.lyapunov = lyapunov(state_, *lyap_plan_, *gpa, lyap_cfg_).get_d();
            }
        }
        series_.push_back(std::move(s));
    }

    void check_event_invariants() {
        state_.validate();
        for (std::size_t j = 0; j < shadow_y_.size(); ++j)
            if (state_.jobs_by_type()[j] > shadow_y_[j])
                throw InvariantError("occupancy exceeds the admit-all shadow process");
    }

    static std::uint64_t report_hash(const SimReport& rep) {
        std::uint64_t h = 1469598103934665603ULL;
        h = fnv1a_value(h, rep.L);
        h = fnv1a_value(h, rep.seed);
        h = fnv1a_value(h, rep.counters.admissions);
        h = fnv1a_value(h, rep.counters.rejections);
        h = fnv1a_value(h, rep.counters.departures);
        h = fnv1a_value(h, rep.counters.migrations);
        h = fnv1a_value(h, rep.counters.preemptions);
        h = fnv1a_value(h, rep.counters.reassignments);
        for (const Sample& s : rep.series) {
            h = fnv1a_value(h, s.t);
            h = fnv1a_value(h, s.reward_rate);
            for (long long y : s.y) h = fnv1a_value(h, y);
        }
        h = fnv1a_value(h, rep.time_avg_reward);
        h = fnv1a_value(h, rep.second_half_avg_reward);
        return h;
    }

public:
    // Lyapunov diagnostics are opt-in because they need the true workload.
    void enable_lyapunov(GreedyPlan plan, LyapunovConfig cfg) {
        owned_plan_ = std::move(plan);
        lyap_plan_ = &*owned_plan_;
        lyap_cfg_ = std::move(cfg);
    }

private:
    const CloudProfile& profile_;
    Policy& policy_;
    const SimOptions& opts_;
    const std::vector<TraceJob>* trace_;
    SystemState state_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    long long seq_ = 0;
    JobId next_job_ = 1;
    std::vector<RngStream> arrival_rng_, service_rng_;
    std::vector<long long> shadow_y_;
    std::vector<double> reward_per_job_;

    double sample_dt_ = 0;
    double next_sample_ = 0;
    double reward_integral_ = 0;
    double second_half_integral_ = 0;
    std::vector<Sample> series_;

    std::optional<GreedyPlan> owned_plan_;
    const GreedyPlan* lyap_plan_ = nullptr;
    LyapunovConfig lyap_cfg_;
};

}  // namespace detail

inline SimReport run(const CloudProfile& profile, int L, Policy& policy, const SimOptions& opts) {
    detail::SimRun sim(profile, L, policy, opts, nullptr);
    if (opts.compute_lyapunov) {
        GreedyPlan plan = global_greedy(profile.rho(), profile);
        LyapunovConfig cfg = LyapunovConfig::defaults(profile, plan);
        sim.enable_lyapunov(std::move(plan), std::move(cfg));
    }
    return sim.run();
}

inline SimReport run_trace(const CloudProfile& profile, int L, Policy& policy,
                           const std::vector<TraceJob>& jobs, const SimOptions& opts) {
    detail::SimRun sim(profile, L, policy, opts, &jobs);
    return sim.run();
}

}  // namespace packsim
