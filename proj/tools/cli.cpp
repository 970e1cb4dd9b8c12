#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "riskbandit/cpd.hpp"
#include "riskbandit/config.hpp"
#include "riskbandit/env.hpp"
#include "riskbandit/policies.hpp"
#include "riskbandit/runner.hpp"
#include "riskbandit/theory.hpp"

namespace riskbandit {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int do_run(const std::string& config_path, const std::optional<std::string>& out,
           const std::optional<long>& seed, const std::optional<long>& reps) {
    if (!std::filesystem::exists(config_path))
        throw UsageError("config not found: " + config_path);
    ExperimentConfig cfg = parse_config(config_path);
    if (out) cfg.output_dir = *out;
    if (seed) cfg.base_seed = static_cast<std::uint64_t>(*seed);
    if (reps) cfg.replications = *reps;
    cfg.validate();

    RunSummary summary = run_experiment(cfg);
    write_outputs(summary, cfg.output_dir);
    for (const auto& algo : summary.algorithms) {
        std::cout << algo.name << ": final mean regret " << format_double(algo.final_mean)
                  << " (std " << format_double(algo.final_std) << "), restarts/rep "
                  << format_double(algo.mean_restarts) << ", forced fraction "
                  << format_double(algo.forced_fraction) << "\n";
    }
    std::cout << "outputs written to " << cfg.output_dir << "\n";
    return 0;
}

int do_detect(const std::string& input, double delta, const std::string& detector) {
    std::ifstream in(input);
    if (!in) throw UsageError("input not found: " + input);
    std::vector<int> bits;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == "0" || line == "1") {
            bits.push_back(line == "1");
        } else if (lineno == 1) {
            continue;  // optional header
        } else {
            throw std::runtime_error("bad bit at " + input + ":" + std::to_string(lineno));
        }
    }
    if (bits.empty()) throw std::runtime_error("no bits in " + input);

    std::cout << "t,restart\n";
    if (detector == "rbocpd") {
        RbocpdBank bank(delta);
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bank.step(bits[i]).restart) {
                std::cout << (i + 1) << ",1\n";
                bank.reset();
            }
        }
    } else {
        GlrDetector det(delta);
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (det.step(bits[i]).restart) {
                std::cout << (i + 1) << ",1\n";
                det.reset();
            }
        }
    }
    return 0;
}

int do_bounds(const std::string& config_path) {
    if (!std::filesystem::exists(config_path))
        throw UsageError("config not found: " + config_path);
    const ExperimentConfig cfg = parse_config(config_path);

    SwitchingBanditInstance inst = cfg.environment.synthetic
                                       ? generate_instance(cfg.environment.gen, cfg.base_seed)
                                       : load_instance_csv(cfg.environment.file);
    const long A = inst.arms();
    const long T = inst.T;
    const long K_T = inst.total_changes();
    const double L = lipschitz_constant(cfg.measure);
    const double sigma = 0.5;
    double delta = 0.05;
    for (const auto& a : cfg.algorithms)
        if (a.kind == PolicyKind::RbocpdRiskLcb && a.delta) delta = *a.delta;
    const double beta = default_beta(A, K_T, T);

    // Per-segment risks give the suboptimality gaps.
    std::vector<long> bounds_t{1};
    for (const auto& segs : inst.segments)
        for (const auto& s : segs)
            if (s.start > 1) bounds_t.push_back(s.start);
    std::sort(bounds_t.begin(), bounds_t.end());
    bounds_t.erase(std::unique(bounds_t.begin(), bounds_t.end()), bounds_t.end());

    double delta_min = std::numeric_limits<double>::infinity();
    std::vector<double> first_segment_gaps;
    for (std::size_t b = 0; b < bounds_t.size(); ++b) {
        std::vector<double> risks;
        for (long a = 0; a < A; ++a)
            risks.push_back(true_risk(inst, a, bounds_t[b], cfg.measure));
        const double best = *std::min_element(risks.begin(), risks.end());
        for (double r : risks) {
            const double gap = r - best;
            if (gap > 0.0) {
                delta_min = std::min(delta_min, gap);
                if (b == 0) first_segment_gaps.push_back(gap);
            }
        }
    }

    const double lambda_min = inst.min_change_gap();

    // Detection-delay bounds per change, with the pre-change sample count
    // taken as the forced-exploration expectation on that arm.
    std::vector<long> last_change(static_cast<std::size_t>(A), 1);
    double delay_sum = 0.0;
    bool any_capped = false;
    for (const ChangePoint& cp : inst.change_points()) {
        const long gap_steps = cp.t - last_change[static_cast<std::size_t>(cp.arm)];
        last_change[static_cast<std::size_t>(cp.arm)] = cp.t;
        const long s = std::max<long>(
            2, static_cast<long>(beta / static_cast<double>(A) *
                                 static_cast<double>(gap_steps)));
        const double jump =
            std::abs(inst.mean_at(cp.arm, cp.t) - inst.mean_at(cp.arm, cp.t - 1));
        const DelayBoundResult r = delay_bound(jump, s, delta);
        delay_sum += static_cast<double>(r.d);
        any_capped = any_capped || r.capped;
    }

    BoundInputs in;
    in.T = T;
    in.A = A;
    in.K_T = K_T;
    in.L = L;
    in.sigma = sigma;
    in.delta_min = std::isfinite(delta_min) ? delta_min : 1.0;
    in.lambda_min = lambda_min > 0.0 ? lambda_min : 1.0;
    in.beta = beta;
    in.delta = delta;

    std::cout << "bound,value,note\n";
    std::cout << "lipschitz_L," << format_double(L) << ",\n";
    std::cout << "default_beta," << format_double(beta) << ",\n";
    std::cout << "delta_min," << format_double(in.delta_min)
              << (std::isfinite(delta_min) ? ",\n" : ",no positive gap\n");
    std::cout << "lambda_min," << format_double(in.lambda_min)
              << (lambda_min > 0.0 ? ",\n" : ",no change points\n");
    if (K_T > 0) {
        std::cout << "detection_delay_sum," << format_double(delay_sum) << ","
                  << (any_capped ? "some terms capped" : "") << "\n";
    }
    if (!first_segment_gaps.empty()) {
        std::cout << "risk_lcb_regret_bound_segment1,"
                  << format_double(
                         risk_lcb_regret_bound(T, L, sigma, first_segment_gaps, A))
                  << ",\n";
    }
    std::cout << "nonstationary_pull_bound,"
              << format_double(nonstationary_pull_bound(in, delay_sum)) << ",\n";
    std::cout << "asymptotic_rate," << format_double(asymptotic_regret_rate(in)) << ",\n";
    return 0;
}

int do_gen_env(long A, long T, long K, double lambda, long seed, long min_seg,
               bool global_switch, const std::string& out) {
    GenParams params;
    params.A = A;
    params.T = T;
    params.K = K;
    params.lambda = lambda;
    params.min_seg = min_seg;
    params.global_switch = global_switch;
    const SwitchingBanditInstance inst =
        generate_instance(params, static_cast<std::uint64_t>(seed));
    write_instance_csv(inst, out);
    std::cout << "wrote " << out << " (A=" << inst.arms() << ", T=" << inst.T
              << ", changes=" << inst.total_changes() << ")\n";
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"risk-averse policies for piecewise-stationary Bernoulli bandits"};
    app.require_subcommand(1);

    std::string config_path, out_dir, input_path, detector = "rbocpd", out_csv;
    std::optional<std::string> run_out;
    std::optional<long> run_seed, run_reps;
    double delta = 0.05, lambda = 0.2;
    long A = 5, T = 10000, K = 0, seed = 1, min_seg = 0;
    bool global_switch = false;

    auto* run = app.add_subcommand("run", "run a configured experiment");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");
    long seed_flag = 0, reps_flag = 0;
    auto* seed_opt = run->add_option("--seed", seed_flag, "base seed (overrides config)");
    auto* reps_opt = run->add_option("--reps", reps_flag, "replications (overrides config)");

    auto* detect = app.add_subcommand("detect", "change detection on a bit stream");
    detect->add_option("--input", input_path, "one-column CSV of bits")->required();
    detect->add_option("--delta", delta, "false-alarm budget in (0,1)")->required();
    detect->add_option("--detector", detector, "rbocpd|glr")
        ->check(CLI::IsMember({"rbocpd", "glr"}));

    auto* bounds = app.add_subcommand("bounds", "print theoretical bound values");
    bounds->add_option("--config", config_path, "experiment config file")->required();

    auto* gen = app.add_subcommand("gen-env", "generate an instance CSV");
    gen->add_option("--A", A, "number of arms")->required();
    gen->add_option("--T", T, "horizon")->required();
    gen->add_option("--K", K, "number of change points")->required();
    gen->add_option("--lambda", lambda, "minimum mean jump")->required();
    gen->add_option("--seed", seed, "generator seed")->required();
    gen->add_option("--out", out_csv, "output CSV path")->required();
    gen->add_option("--min-seg", min_seg, "minimum per-arm segment length");
    gen->add_flag("--global", global_switch, "apply each change to all arms");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (run->parsed()) {
            if (*seed_opt) run_seed = seed_flag;
            if (*reps_opt) run_reps = reps_flag;
            if (!out_dir.empty()) run_out = out_dir;
            return do_run(config_path, run_out, run_seed, run_reps);
        }
        if (detect->parsed()) return do_detect(input_path, delta, detector);
        if (bounds->parsed()) return do_bounds(config_path);
        if (gen->parsed())
            return do_gen_env(A, T, K, lambda, seed, min_seg, global_switch, out_csv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace riskbandit
