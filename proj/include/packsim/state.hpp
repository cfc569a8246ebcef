#pragma once

// Mutable simulator state: per-server configurations and placements, the
// per-configuration recency lists (index 1 = most recently assigned), the job
// registry, and the primitive transitions policies are allowed to use.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "packsim/errors.hpp"
#include "packsim/profile.hpp"

namespace packsim {

using JobId = long long;

struct JobRec {
    int type = 0;
    int server = 0;
    double admitted_at = 0;
};

struct ServerState {
    Config config;
    Config placement;  // filled slots per type, <= config componentwise
    int rank = 0;      // 1..J+1, assigned by CRA
    bool reject_group = false;
    int job_total = 0;
};

struct SimCounters {
    long long admissions = 0;
    long long rejections = 0;
    long long departures = 0;
    long long migrations = 0;
    long long preemptions = 0;
    long long reassignments = 0;
};

class SystemState {
public:
    SystemState(const CloudProfile& profile, int L) : profile_(&profile), L_(L) {
        if (L < 1) throw InputError("need at least one server");
        const int J = profile.type_count();
        servers_.assign(L, ServerState{Config(J, 0), Config(J, 0), J + 1, false, 0});
        auto& zero_list = per_config_[profile.zero_config()];
        for (int s = 0; s < L; ++s) zero_list.push_back(s);
        jobs_by_type_.assign(J, 0);
        server_jobs_.assign(L, {});
    }

    const CloudProfile& profile() const { return *profile_; }
    int server_count() const { return L_; }
    double clock = 0.0;
    SimCounters counters;

    const std::vector<ServerState>& servers() const { return servers_; }
    const ServerState& server(int sid) const { return servers_[sid]; }
    ServerState& server_mut(int sid) { return servers_[sid]; }
    const std::map<Config, std::vector<int>>& per_config() const { return per_config_; }
    const std::vector<long long>& jobs_by_type() const { return jobs_by_type_; }
    const std::unordered_map<JobId, JobRec>& jobs() const { return jobs_; }

    long long config_count(const Config& k) const {
        auto it = per_config_.find(k);
        return it == per_config_.end() ? 0 : static_cast<long long>(it->second.size());
    }

    // 1-based recency index of a server within its configuration list.
    int server_index(int sid) const {
        const auto& lst = per_config_.at(servers_[sid].config);
        for (std::size_t i = 0; i < lst.size(); ++i)
            if (lst[i] == sid) return static_cast<int>(i) + 1;
        throw InvariantError("server missing from its configuration list");
    }

    bool server_empty(int sid) const { return servers_[sid].job_total == 0; }

    bool has_empty_slot(int sid, int type) const {
        const ServerState& s = servers_[sid];
        return s.config[type] - s.placement[type] > 0;
    }

    const std::vector<JobId>& jobs_on(int sid) const { return server_jobs_[sid]; }

    void place_job(JobId id, int sid, int type) {
        ServerState& s = servers_[sid];
        if (s.config[type] - s.placement[type] <= 0)
            throw InvariantError("place_job: no empty slot of type " + std::to_string(type + 1) +
                                 " on server " + std::to_string(sid));
        if (jobs_.count(id)) throw InvariantError("place_job: duplicate job id");
        ++s.placement[type];
        ++s.job_total;
        ++jobs_by_type_[type];
        jobs_[id] = JobRec{type, sid, clock};
        server_jobs_[sid].push_back(id);
    }

    JobRec remove_job(JobId id, bool preempted = false) {
        auto it = jobs_.find(id);
        if (it == jobs_.end()) throw InvariantError("remove_job: unknown job id");
        JobRec rec = it->second;
        jobs_.erase(it);
        ServerState& s = servers_[rec.server];
        --s.placement[rec.type];
        --s.job_total;
        --jobs_by_type_[rec.type];
        if (s.placement[rec.type] < 0) throw InvariantError("remove_job: placement underflow");
        detach(rec.server, id);
        if (preempted) ++counters.preemptions;
        return rec;
    }

    // Moves a running job into an empty slot of the same type elsewhere.
    void migrate_job(JobId id, int to_sid) {
        auto it = jobs_.find(id);
        if (it == jobs_.end()) throw InvariantError("migrate_job: unknown job id");
        JobRec& rec = it->second;
        ServerState& from = servers_[rec.server];
        ServerState& to = servers_[to_sid];
        if (to.config[rec.type] - to.placement[rec.type] <= 0)
            throw InvariantError("migrate_job: destination has no empty slot");
        --from.placement[rec.type];
        --from.job_total;
        ++to.placement[rec.type];
        ++to.job_total;
        detach(rec.server, id);
        server_jobs_[to_sid].push_back(id);
        rec.server = to_sid;
        ++counters.migrations;
    }

    // Configuration change for an empty server; the server becomes index 1
    // of the new configuration's recency list.
    void reassign(int sid, const Config& k) {
        if (!server_empty(sid)) throw InvariantError("reassign: server is not empty");
        move_to_config(sid, k);
        ++counters.reassignments;
    }

    // Configuration resize that may keep jobs in place (placement <= new
    // config required). Used by policies that grow a server's configuration
    // around its placement instead of reserving slots.
    void resize_config(int sid, const Config& k) {
        const ServerState& s = servers_[sid];
        for (std::size_t j = 0; j < k.size(); ++j)
            if (s.placement[j] > k[j])
                throw InvariantError("resize_config: placement exceeds new configuration");
        move_to_config(sid, k);
    }

    // Full invariant sweep; throws InvariantError with a description.
    void validate() const {
        const int J = profile_->type_count();
        std::size_t listed = 0;
        for (const auto& [k, lst] : per_config_) {
            listed += lst.size();
            for (int sid : lst)
                if (servers_[sid].config != k)
                    throw InvariantError("server " + std::to_string(sid) +
                                         " listed under a configuration it does not have");
        }
        if (listed != static_cast<std::size_t>(L_))
            throw InvariantError("per-configuration lists cover " + std::to_string(listed) +
                                 " servers, expected " + std::to_string(L_));
        std::vector<long long> y(J, 0);
        for (int sid = 0; sid < L_; ++sid) {
            const ServerState& s = servers_[sid];
            int total = 0;
            for (int j = 0; j < J; ++j) {
                if (s.placement[j] < 0 || s.placement[j] > s.config[j])
                    throw InvariantError("server " + std::to_string(sid) +
                                         ": placement exceeds configuration");
                y[j] += s.placement[j];
                total += s.placement[j];
            }
            if (total != s.job_total)
                throw InvariantError("server job counter out of sync");
        }
        if (y != jobs_by_type_) throw InvariantError("jobs-by-type counters out of sync");
        std::vector<long long> reg(J, 0);
        for (const auto& [id, rec] : jobs_) ++reg[rec.type];
        if (reg != jobs_by_type_) throw InvariantError("job registry out of sync");
    }

private:
    void detach(int sid, JobId id) {
        auto& lst = server_jobs_[sid];
        lst.erase(std::find(lst.begin(), lst.end(), id));
    }

    void move_to_config(int sid, const Config& k) {
        if (static_cast<int>(k.size()) != profile_->type_count())
            throw InputError("configuration has wrong length");
        Config old = servers_[sid].config;
        if (old == k) {
            // Still becomes the most recent server of its configuration.
            auto& lst = per_config_[old];
            lst.erase(std::find(lst.begin(), lst.end(), sid));
            lst.insert(lst.begin(), sid);
            return;
        }
        auto& from = per_config_[old];
        from.erase(std::find(from.begin(), from.end(), sid));
        if (from.empty()) per_config_.erase(old);
        auto& to = per_config_[k];
        to.insert(to.begin(), sid);
        servers_[sid].config = k;
    }

    const CloudProfile* profile_;
    int L_;
    std::vector<ServerState> servers_;
    std::map<Config, std::vector<int>> per_config_;
    std::vector<long long> jobs_by_type_;
    std::unordered_map<JobId, JobRec> jobs_;
    std::vector<std::vector<JobId>> server_jobs_;
};

}  // namespace packsim
