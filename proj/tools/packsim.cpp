// packsim: planner analysis and reservation-policy simulation.
//
// Subcommands: analyze, sweep-alpha, simulate, sweep-L, trace, gen-trace,
// gen-profile. All outputs are JSON aggregates and schema-versioned CSV
// series; every run echoes its parameters so results are reproducible from
// the output alone. Exit codes: 0 ok, 2 input error, 3 invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <sstream>

#include "packsim/bounds.hpp"
#include "packsim/metrics.hpp"
#include "packsim/planner.hpp"
#include "packsim/policies.hpp"
#include "packsim/profile_io.hpp"
#include "packsim/report_io.hpp"
#include "packsim/sim.hpp"
#include "packsim/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace packsim;

namespace {

std::vector<Rational> scaled_rho(const CloudProfile& profile, const Rational& alpha) {
    std::vector<Rational> rho = profile.rho();
    for (auto& r : rho) r *= alpha;
    return rho;
}

json x_g_json(const GreedyPlan& plan, const CloudProfile& profile) {
    json arr = json::array();
    for (const auto& [idx, frac] : plan.x_g) {
        json entry;
        entry["config"] = profile.config_set[idx];
        entry["fraction"] = frac.get_str();
        entry["fraction_float"] = frac.get_d();
        arr.push_back(std::move(entry));
    }
    return arr;
}

json analyze_instance(const CloudProfile& profile, const std::vector<Rational>& rho,
                      bool rational_mode) {
    GreedyPlan plan = global_greedy(rho, profile);
    json out;
    json sigma = json::array();
    for (int s : plan.sigma) sigma.push_back(s + 1);
    out["sigma"] = sigma;
    json z = json::array();
    for (const auto& v : plan.z) z.push_back(v.get_str());
    out["z"] = z;
    out["i_g"] = plan.i_g;
    out["x_g"] = x_g_json(plan, profile);
    out["U_greedy"] = plan.u_greedy.get_str();
    out["U_greedy_float"] = plan.u_greedy.get_d();

    double ustar_f = 0;
    if (rational_mode) {
        BoundResult star = optimal_normalized<Rational>(rho, profile);
        out["U_star"] = star.objective.get_str();
        ustar_f = star.objective.get_d();
        Rational ratio = star.objective == 0 ? Rational(1) : plan.u_greedy / star.objective;
        out["ratio"] = ratio.get_str();
        out["ratio_float"] = ratio.get_d();
    } else {
        BoundResultT<double> star = optimal_normalized<double>(to_doubles(rho), profile);
        ustar_f = star.objective;
        out["ratio_float"] = star.objective == 0 ? 1.0 : plan.u_greedy.get_d() / star.objective;
    }
    out["U_star_float"] = ustar_f;
    out["mode"] = rational_mode ? "rational" : "float";
    return out;
}

std::unique_ptr<Policy> make_policy(const std::string& name, const CloudProfile& profile,
                                    std::uint64_t seed, double g_exp, const std::string& cra_period,
                                    int d, bool verify) {
    DraConfig cfg;
    cfg.verify = verify;
    if (g_exp > 0)
        cfg.reservation = [g_exp](long long L) {
            return static_cast<long long>(std::ceil(std::pow(std::log(static_cast<double>(L)), g_exp)));
        };
    if (!cra_period.empty() && cra_period != "every-event") {
        if (cra_period.rfind("every:", 0) == 0) {
            cfg.period = DraConfig::CraPeriod::EveryKEvents;
            cfg.every_k = std::stoll(cra_period.substr(6));
        } else if (cra_period.rfind("dt:", 0) == 0) {
            cfg.period = DraConfig::CraPeriod::EveryInterval;
            cfg.every_dt = std::stod(cra_period.substr(3));
        } else {
            throw InputError("unknown --cra-period: " + cra_period);
        }
    }
    if (name == "dra") return std::make_unique<DraPolicy>(profile, cfg);
    if (name == "dra-preempt") return std::make_unique<DraPreemptPolicy>(profile, cfg);
    if (name == "pod") return std::make_unique<PowerOfDPolicy>(profile, d, seed);
    throw InputError("unknown policy: " + name);
}

json runspec_json(const json& extra) { return extra; }

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write: " + path);
    out << doc.dump(2) << '\n';
}

std::vector<double> sample_times(double horizon, double dt) {
    std::vector<double> ts;
    for (double t = dt; t < horizon; t += dt) ts.push_back(t);
    ts.push_back(horizon);
    return ts;
}

// Upper-bound pseudo-report over an arrival log: the bound series evaluated
// at sample instants, integrated piecewise-constant.
SimReport upper_bound_report(const CloudProfile& profile, int L,
                             const std::vector<LoggedArrival>& log, double horizon, double dt,
                             std::uint64_t seed) {
    UpperBoundSeries ub = upper_bound_reference(profile, L, log, sample_times(horizon, dt));
    SimReport rep;
    rep.policy = "upper-bound";
    rep.L = L;
    rep.horizon = horizon;
    rep.seed = seed;
    rep.sample_dt = dt;
    double prev_t = 0, prev_v = 0, integral = 0, half_integral = 0;
    for (const auto& [t, v] : ub.points) {
        integral += prev_v * (t - prev_t);
        if (t > horizon / 2) half_integral += prev_v * (t - std::max(prev_t, horizon / 2));
        Sample s;
        s.t = t;
        s.reward_rate = v;
        rep.series.push_back(std::move(s));
        prev_t = t;
        prev_v = v;
    }
    rep.time_avg_reward = integral / horizon;
    rep.second_half_avg_reward = half_integral / (horizon / 2);
    rep.final_reward_rate = prev_v;
    return rep;
}

std::vector<LoggedArrival> stochastic_arrival_log(const CloudProfile& profile, int L,
                                                  double horizon, std::uint64_t seed) {
    // Reuses the engine's per-type streams via a reject-everything policy.
    struct Sink : Policy {
        std::string name() const override { return "sink"; }
        bool on_arrival(SystemState&, int, JobId, double) override { return false; }
    };
    std::vector<LoggedArrival> log;
    SimOptions opts;
    opts.horizon = horizon;
    opts.seed = seed;
    opts.check_invariants = false;
    opts.event_log = &log;
    Sink sink;
    run(profile, L, sink, opts);
    return log;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VM reservation planner and loss-system simulator"};
    app.require_subcommand(1);

    std::string profile_path, out_path, out_dir, policy = "dra", trace_path;
    std::string alpha_str = "1", mode = "rational", alpha_grid = "0.1:10:0.1";
    std::string cra_period = "every-event", policies_csv = "dra,dra-preempt,pod,upper-bound";
    std::string ls_csv = "20,60,120,180", seeds_csv = "1,2,3,4,5", kind = "spike";
    int L = 100, d = 5;
    double horizon = 50, g_exp = 0, sample_dt = 0;
    std::uint64_t seed = 1;
    bool lenient = false, verify = false, lyap = false;

    auto* analyze = app.add_subcommand("analyze", "greedy vs optimal for one workload");
    analyze->add_option("--profile", profile_path)->required();
    analyze->add_option("--alpha", alpha_str, "workload scale factor (rational)");
    analyze->add_option("--mode", mode)->check(CLI::IsMember({"rational", "float"}));
    analyze->add_option("--out", out_path, "write JSON here instead of stdout");

    auto* sweep_a = app.add_subcommand("sweep-alpha", "U_greedy / U_star over a workload sweep");
    sweep_a->add_option("--profile", profile_path)->required();
    sweep_a->add_option("--alpha-grid", alpha_grid, "lo:hi:step or comma list");
    sweep_a->add_option("--out", out_path);

    auto* sim = app.add_subcommand("simulate", "one stochastic run");
    sim->add_option("--profile", profile_path)->required();
    sim->add_option("--policy", policy)
        ->check(CLI::IsMember({"dra", "dra-preempt", "pod", "upper-bound"}));
    sim->add_option("-L,--servers", L);
    sim->add_option("--horizon", horizon);
    sim->add_option("--seed", seed);
    sim->add_option("--g-exp", g_exp, "g(L) = ceil((ln L)^exp); 0 keeps the default 1.5");
    sim->add_option("--cra-period", cra_period, "every-event | every:<k> | dt:<t>");
    sim->add_option("--d", d, "power-of-d sample count");
    sim->add_option("--sample-dt", sample_dt);
    sim->add_flag("--verify", verify, "run invariant checks after every CRA");
    sim->add_flag("--lyapunov", lyap, "emit the Lyapunov column");
    sim->add_option("--out", out_dir, "directory for series.csv and report.json");

    auto* sweep_l = app.add_subcommand("sweep-L", "reward ratio vs server count");
    sweep_l->add_option("--profile", profile_path)->required();
    sweep_l->add_option("--policy", policy)
        ->check(CLI::IsMember({"dra", "dra-preempt", "pod"}));
    sweep_l->add_option("--Ls", ls_csv);
    sweep_l->add_option("--seeds", seeds_csv);
    sweep_l->add_option("--horizon", horizon);
    sweep_l->add_option("--g-exp", g_exp);
    sweep_l->add_option("--d", d);
    sweep_l->add_option("--out", out_path);

    auto* trace = app.add_subcommand("trace", "replay a task trace under several policies");
    trace->add_option("--trace", trace_path)->required();
    trace->add_option("-L,--servers", L);
    trace->add_option("--policies", policies_csv);
    trace->add_flag("--lenient", lenient, "skip malformed rows instead of aborting");
    trace->add_option("--g-exp", g_exp);
    trace->add_option("--d", d);
    trace->add_option("--sample-dt", sample_dt);
    trace->add_flag("--verify", verify);
    trace->add_option("--out", out_dir)->required();

    auto* gen_t = app.add_subcommand("gen-trace", "write a synthetic trace fixture");
    gen_t->add_option("--kind", kind)->check(CLI::IsMember({"spike"}));
    gen_t->add_option("--seed", seed);
    gen_t->add_option("--out", out_path)->required();

    auto* gen_p = app.add_subcommand("gen-profile", "write a random instance profile");
    gen_p->add_option("--seed", seed);
    gen_p->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);

        if (*analyze) {
            CloudProfile profile = load_profile_file(profile_path);
            Rational alpha = parse_rational(alpha_str);
            json out = analyze_instance(profile, scaled_rho(profile, alpha), mode == "rational");
            out["runspec"] = {{"command", "analyze"}, {"profile", profile_path},
                              {"alpha", alpha_str}, {"mode", mode}};
            if (out_path.empty())
                std::cout << out.dump(2) << '\n';
            else
                write_json(out_path, out);
        } else if (*sweep_a) {
            CloudProfile profile = load_profile_file(profile_path);
            std::vector<double> alphas;
            if (alpha_grid.find(':') != std::string::npos) {
                std::stringstream ss(alpha_grid);
                std::string lo_s, hi_s, st_s;
                std::getline(ss, lo_s, ':');
                std::getline(ss, hi_s, ':');
                std::getline(ss, st_s, ':');
                double lo = std::stod(lo_s), hi = std::stod(hi_s), st = std::stod(st_s);
                if (st <= 0) throw InputError("alpha step must be positive");
                for (double a = lo; a <= hi + 1e-12; a += st) alphas.push_back(a);
            } else {
                std::stringstream ss(alpha_grid);
                std::string tok;
                while (std::getline(ss, tok, ',')) alphas.push_back(std::stod(tok));
            }
            std::ostringstream csv;
            csv << kSweepSchema << "\nalpha,U_greedy,U_star\n";
            csv << std::setprecision(12);
            std::vector<double> base_rho = to_doubles(profile.rho());
            for (double a : alphas) {
                GreedyPlan plan = global_greedy(scaled_rho(profile, Rational(a)), profile);
                std::vector<double> rho_f(base_rho);
                for (auto& r : rho_f) r *= a;
                BoundResultT<double> star = optimal_normalized<double>(rho_f, profile);
                csv << a << ',' << plan.u_greedy.get_d() << ',' << star.objective << '\n';
            }
            if (out_path.empty())
                std::cout << csv.str();
            else
                write_file(out_path, csv.str());
        } else if (*sim) {
            CloudProfile profile = load_profile_file(profile_path);
            SimOptions opts;
            opts.horizon = horizon;
            opts.seed = seed;
            opts.sample_dt = sample_dt;
            opts.check_invariants = verify;
            opts.compute_lyapunov = lyap;
            SimReport rep;
            if (policy == "upper-bound") {
                std::vector<LoggedArrival> log =
                    stochastic_arrival_log(profile, L, horizon, seed);
                double dt = sample_dt > 0 ? sample_dt : horizon / 500;
                rep = upper_bound_report(profile, L, log, horizon, dt, seed);
            } else {
                auto pol = make_policy(policy, profile, seed, g_exp, cra_period, d, verify);
                rep = run(profile, L, *pol, opts);
            }
            json meta = report_to_json(rep);
            meta["runspec"] = {{"command", "simulate"}, {"profile", profile_path},
                               {"policy", policy},      {"L", L},
                               {"horizon", horizon},    {"seed", seed},
                               {"g_exp", g_exp},        {"cra_period", cra_period},
                               {"d", d}};
            if (out_dir.empty()) {
                std::cout << meta.dump(2) << '\n';
            } else {
                fs::create_directories(out_dir);
                write_json(out_dir + "/report.json", meta);
                std::ostringstream csv;
                write_series_csv(csv, rep);
                write_file(out_dir + "/series.csv", csv.str());
            }
        } else if (*sweep_l) {
            CloudProfile profile = load_profile_file(profile_path);
            GreedyPlan plan = global_greedy(profile.rho(), profile);
            BoundResultT<double> star = optimal_normalized<double>(to_doubles(profile.rho()), profile);
            double ug = plan.u_greedy.get_d(), us = star.objective;

            std::vector<int> Ls;
            std::vector<std::uint64_t> seeds;
            {
                std::stringstream ss(ls_csv);
                std::string tok;
                while (std::getline(ss, tok, ',')) Ls.push_back(std::stoi(tok));
                std::stringstream ss2(seeds_csv);
                while (std::getline(ss2, tok, ',')) seeds.push_back(std::stoull(tok));
            }
            // Runs fan out across threads; rows gathered in deterministic order.
            std::vector<std::future<double>> futures;
            for (int l : Ls)
                for (std::uint64_t sd : seeds)
                    futures.push_back(std::async(std::launch::async, [&, l, sd] {
                        auto pol = make_policy(policy, profile, sd, g_exp, cra_period, d, false);
                        SimOptions o;
                        o.horizon = horizon;
                        o.seed = sd;
                        o.check_invariants = false;
                        return run(profile, l, *pol, o).second_half_avg_reward;
                    }));
            std::ostringstream csv;
            csv << kSweepSchema << "\nL,ratio_vs_greedy,ratio_vs_star\n";
            csv << std::setprecision(9);
            std::size_t fi = 0;
            for (int l : Ls) {
                double mean = 0;
                for (std::size_t s = 0; s < seeds.size(); ++s) mean += futures[fi++].get();
                mean /= static_cast<double>(seeds.size());
                csv << l << ',' << mean / (ug * l) << ',' << mean / (us * l) << '\n';
            }
            if (out_path.empty())
                std::cout << csv.str();
            else
                write_file(out_path, csv.str());
        } else if (*trace) {
            TraceParseResult parsed = parse_trace(trace_path, !lenient);
            TraceWorkload workload = build_trace_workload(parsed.tasks);
            double end = 0;
            for (const auto& jb : workload.jobs) end = std::max(end, jb.at + jb.duration);
            double dt = sample_dt > 0 ? sample_dt : end / 400;

            fs::create_directories(out_dir);
            json table;
            table["runspec"] = {{"command", "trace"}, {"trace", trace_path}, {"L", L},
                                {"policies", policies_csv}, {"horizon", end},
                                {"types", workload.profile.type_count()},
                                {"skipped_rows", parsed.skipped.size()}};
            std::vector<LoggedArrival> log;
            for (const auto& jb : workload.jobs) log.push_back({jb.at, jb.type, jb.duration});

            std::stringstream ss(policies_csv);
            std::string name;
            while (std::getline(ss, name, ',')) {
                SimReport rep;
                if (name == "upper-bound") {
                    rep = upper_bound_report(workload.profile, L, log, end, dt, seed);
                } else {
                    auto pol = make_policy(name, workload.profile, seed, g_exp, cra_period, d,
                                           verify);
                    SimOptions o;
                    o.horizon = end;
                    o.seed = seed;
                    o.sample_dt = dt;
                    o.check_invariants = verify;
                    rep = run_trace(workload.profile, L, *pol, workload.jobs, o);
                }
                std::ostringstream csv;
                write_series_csv(csv, rep);
                write_file(out_dir + "/" + name + ".csv", csv.str());
                json agg = report_to_json(rep);
                agg["total_reward"] = rep.time_avg_reward * rep.horizon;
                table["policies"][name] = std::move(agg);
            }
            write_json(out_dir + "/summary.json", table);
        } else if (*gen_t) {
            std::vector<RawTask> tasks = make_spike_trace(seed);
            std::ofstream out(out_path);
            if (!out) throw InputError("cannot write: " + out_path);
            out << "# synthetic spike fixture; time unit: seconds\n";
            write_trace(out, tasks, {"cpu", "mem"});
        } else if (*gen_p) {
            auto [profile, rho] = random_instance(seed);
            write_json(out_path, profile_to_json(profile));
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
