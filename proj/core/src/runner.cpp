#include "riskbandit/runner.hpp"

#include <atomic>
#include <mutex>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>

#include "riskbandit/policies.hpp"
#include "riskbandit/rng.hpp"

namespace riskbandit {

namespace {

struct RepResult {
    std::vector<std::vector<double>> cumulative;  // per algorithm, length T
    std::vector<std::vector<ActionTrace::RestartEvent>> restarts;
    std::vector<long> restart_totals;
    std::vector<double> forced_fractions;
    std::vector<ChangePoint> changes;
};

long worker_count(long reps) {
    long n = static_cast<long>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("RISKBANDIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = v;
    }
    return std::min(n, reps);
}

RepResult run_replication(const ExperimentConfig& cfg, long rep,
                          const SwitchingBanditInstance* shared_instance) {
    const std::uint64_t env_seed = cfg.base_seed + static_cast<std::uint64_t>(rep);

    SwitchingBanditInstance generated;
    const SwitchingBanditInstance* inst = shared_instance;
    if (inst == nullptr) {
        generated = generate_instance(cfg.environment.gen, env_seed);
        inst = &generated;
    }
    const long A = inst->arms();
    const long T = inst->T;
    const long K_T = inst->total_changes();
    const std::uint64_t reward_key = mix_seed(env_seed, fnv1a("rewards"));

    RepResult out;
    out.changes = inst->change_points();
    for (const AlgorithmSpec& spec : cfg.algorithms) {
        const PolicyConfig pc = resolve_policy_config(spec, cfg, A, T, K_T);
        const std::uint64_t action_seed = mix_seed(env_seed, fnv1a(policy_name(spec.kind)));
        Policy policy(spec.kind, A, pc, action_seed,
                      spec.kind == PolicyKind::Oracle ? inst : nullptr);
        for (long t = 1; t <= T; ++t) {
            const long arm = policy.choose(t);
            const int reward = coupled_reward(reward_key, arm, t, inst->mean_at(arm, t));
            policy.observe(t, arm, reward);
        }
        RegretTrace regret = rho_regret(policy.trace(), *inst, cfg.measure);
        out.cumulative.push_back(std::move(regret.cumulative));
        out.restarts.push_back(policy.trace().restarts);
        out.restart_totals.push_back(policy.total_restarts());
        out.forced_fractions.push_back(policy.forced_fraction());
    }
    return out;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    SwitchingBanditInstance file_instance;
    const SwitchingBanditInstance* shared = nullptr;
    if (!cfg.environment.synthetic) {
        file_instance = load_instance_csv(cfg.environment.file);
        shared = &file_instance;
    } else {
        // Fail on infeasible generation parameters before any run starts.
        generate_instance(cfg.environment.gen, cfg.base_seed);
    }

    const long reps = cfg.replications;
    std::vector<RepResult> results(static_cast<std::size_t>(reps));
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&]() {
        for (;;) {
            const long rep = next.fetch_add(1);
            if (rep >= reps) return;
            try {
                results[static_cast<std::size_t>(rep)] = run_replication(cfg, rep, shared);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const long workers = worker_count(reps);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (long w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    const long T = static_cast<long>(results.front().cumulative.front().size());
    RunSummary summary;
    summary.T = T;
    summary.A = cfg.environment.synthetic ? cfg.environment.gen.A : file_instance.arms();
    summary.replications = reps;
    for (auto& r : results) summary.change_events.push_back(std::move(r.changes));

    for (std::size_t j = 0; j < cfg.algorithms.size(); ++j) {
        AlgoRunSummary algo;
        algo.kind = cfg.algorithms[j].kind;
        algo.name = policy_name(algo.kind);
        algo.mean_cum.assign(static_cast<std::size_t>(T), 0.0);
        algo.std_cum.assign(static_cast<std::size_t>(T), 0.0);
        for (long rep = 0; rep < reps; ++rep) {
            const auto& cum = results[static_cast<std::size_t>(rep)].cumulative[j];
            for (long t = 0; t < T; ++t)
                algo.mean_cum[static_cast<std::size_t>(t)] += cum[static_cast<std::size_t>(t)];
            algo.mean_restarts +=
                static_cast<double>(results[static_cast<std::size_t>(rep)].restart_totals[j]);
            algo.forced_fraction += results[static_cast<std::size_t>(rep)].forced_fractions[j];
            algo.restart_events.push_back(
                std::move(results[static_cast<std::size_t>(rep)].restarts[j]));
        }
        const double n = static_cast<double>(reps);
        for (auto& v : algo.mean_cum) v /= n;
        algo.mean_restarts /= n;
        algo.forced_fraction /= n;
        if (reps > 1) {
            for (long rep = 0; rep < reps; ++rep) {
                const auto& cum = results[static_cast<std::size_t>(rep)].cumulative[j];
                for (long t = 0; t < T; ++t) {
                    const double d = cum[static_cast<std::size_t>(t)] -
                                     algo.mean_cum[static_cast<std::size_t>(t)];
                    algo.std_cum[static_cast<std::size_t>(t)] += d * d;
                }
            }
            for (auto& v : algo.std_cum) v = std::sqrt(v / (n - 1.0));
        }
        algo.final_mean = algo.mean_cum.back();
        algo.final_std = algo.std_cum.back();
        summary.algorithms.push_back(std::move(algo));
    }
    return summary;
}

namespace {

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void emit_csv(const RunSummary& summary, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const AlgoRunSummary& algo : summary.algorithms) {
        std::string body = "t,mean_cumulative_regret,std\n";
        for (long t = 0; t < summary.T; ++t) {
            body += std::to_string(t + 1);
            body += ',';
            body += format_double(algo.mean_cum[static_cast<std::size_t>(t)]);
            body += ',';
            body += format_double(algo.std_cum[static_cast<std::size_t>(t)]);
            body += '\n';
        }
        write_file(dir + "/regret_" + algo.name + ".csv", body);

        std::string events = "replication,t,arm,event\n";
        for (long rep = 0; rep < summary.replications; ++rep) {
            struct Row {
                long t;
                long arm;
                bool restart;
            };
            std::vector<Row> rows;
            for (const ChangePoint& cp : summary.change_events[static_cast<std::size_t>(rep)])
                rows.push_back({cp.t, cp.arm, false});
            for (const auto& ev : algo.restart_events[static_cast<std::size_t>(rep)])
                rows.push_back({ev.t, ev.arm, true});
            std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
                if (a.t != b.t) return a.t < b.t;
                if (a.arm != b.arm) return a.arm < b.arm;
                return a.restart < b.restart;
            });
            for (const Row& r : rows) {
                events += std::to_string(rep);
                events += ',';
                events += std::to_string(r.t);
                events += ',';
                events += std::to_string(r.arm + 1);
                events += ',';
                events += r.restart ? "restart" : "change_point";
                events += '\n';
            }
        }
        write_file(dir + "/events_" + algo.name + ".csv", events);
    }
}

void emit_svg(const RunSummary& summary, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir + "/regret.svg", [&] {
        const double width = 960, height = 600;
        const double ml = 80, mr = 24, mt = 24, mb = 56;
        const double pw = width - ml - mr, ph = height - mt - mb;

        double ymax = 0.0;
        for (const auto& algo : summary.algorithms)
            for (std::size_t t = 0; t < algo.mean_cum.size(); ++t)
                ymax = std::max(ymax, algo.mean_cum[t] + algo.std_cum[t]);
        if (ymax <= 0.0) ymax = 1.0;
        const double xmax = static_cast<double>(summary.T);

        auto xpix = [&](double t) { return ml + t / xmax * pw; };
        auto ypix = [&](double v) { return mt + ph - v / ymax * ph; };
        auto fmt = [](double v) {
            std::string s = format_double(v);
            return s;
        };

        // at most ~1200 points per series
        const long stride = std::max<long>(1, summary.T / 1200);

        std::string svg;
        svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 600\" "
               "font-family=\"sans-serif\" font-size=\"13\">\n";
        svg += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"600\" fill=\"white\"/>\n";

        static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                        "#ff7f0e", "#9467bd", "#7f7f7f"};

        // axes and ticks
        svg += "<g stroke=\"#333\" stroke-width=\"1\">";
        svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt + ph) + "\" x2=\"" +
               fmt(ml + pw) + "\" y2=\"" + fmt(mt + ph) + "\"/>";
        svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(ml) +
               "\" y2=\"" + fmt(mt + ph) + "\"/>";
        svg += "</g>\n";
        for (int i = 0; i <= 5; ++i) {
            const double tx = xmax * i / 5.0;
            const double vy = ymax * i / 5.0;
            svg += "<line x1=\"" + fmt(xpix(tx)) + "\" y1=\"" + fmt(mt + ph) + "\" x2=\"" +
                   fmt(xpix(tx)) + "\" y2=\"" + fmt(mt + ph + 5) +
                   "\" stroke=\"#333\"/>";
            svg += "<text x=\"" + fmt(xpix(tx)) + "\" y=\"" + fmt(mt + ph + 20) +
                   "\" text-anchor=\"middle\">" + std::to_string(static_cast<long>(tx)) +
                   "</text>\n";
            svg += "<line x1=\"" + fmt(ml - 5) + "\" y1=\"" + fmt(ypix(vy)) + "\" x2=\"" +
                   fmt(ml) + "\" y2=\"" + fmt(ypix(vy)) + "\" stroke=\"#333\"/>";
            svg += "<text x=\"" + fmt(ml - 8) + "\" y=\"" + fmt(ypix(vy) + 4) +
                   "\" text-anchor=\"end\">" + fmt(std::round(vy * 100.0) / 100.0) +
                   "</text>\n";
        }
        svg += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(height - 12) +
               "\" text-anchor=\"middle\">t</text>\n";
        svg += "<text x=\"18\" y=\"" + fmt(mt + ph / 2) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + fmt(mt + ph / 2) +
               ")\">mean cumulative regret</text>\n";

        for (std::size_t j = 0; j < summary.algorithms.size(); ++j) {
            const auto& algo = summary.algorithms[j];
            const char* color = palette[j % 6];

            // +/- 1 std band
            std::string band = "<polygon fill=\"" + std::string(color) +
                               "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
            for (long t = 0; t < summary.T; t += stride) {
                const auto i = static_cast<std::size_t>(t);
                band += fmt(xpix(static_cast<double>(t + 1))) + "," +
                        fmt(ypix(std::min(ymax, algo.mean_cum[i] + algo.std_cum[i]))) + " ";
            }
            for (long t = summary.T - 1; t >= 0; t -= stride) {
                const auto i = static_cast<std::size_t>(t);
                band += fmt(xpix(static_cast<double>(t + 1))) + "," +
                        fmt(ypix(std::max(0.0, algo.mean_cum[i] - algo.std_cum[i]))) + " ";
            }
            band += "\"/>\n";
            svg += band;

            std::string line = "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                               "\" stroke-width=\"1.8\" points=\"";
            for (long t = 0; t < summary.T; t += stride) {
                const auto i = static_cast<std::size_t>(t);
                line += fmt(xpix(static_cast<double>(t + 1))) + "," +
                        fmt(ypix(algo.mean_cum[i])) + " ";
            }
            const auto last = static_cast<std::size_t>(summary.T - 1);
            line += fmt(xpix(static_cast<double>(summary.T))) + "," +
                    fmt(ypix(algo.mean_cum[last])) + " ";
            line += "\"/>\n";
            svg += line;

            const double ly = mt + 18 + 20 * static_cast<double>(j);
            svg += "<line x1=\"" + fmt(ml + 12) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
                   fmt(ml + 40) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color +
                   "\" stroke-width=\"3\"/>";
            svg += "<text x=\"" + fmt(ml + 46) + "\" y=\"" + fmt(ly) + "\">" + algo.name +
                   "</text>\n";
        }
        svg += "</svg>\n";
        return svg;
    }());
}

void write_outputs(const RunSummary& summary, const std::string& dir) {
    emit_csv(summary, dir);
    emit_svg(summary, dir);
}

}  // namespace riskbandit
