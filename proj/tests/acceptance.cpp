// Acceptance suite: runs every shipped behavioral criterion at its stated
// tolerance and prints one PASS/FAIL line each. Exit code is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "riskbandit/config.hpp"
#include "riskbandit/cpd.hpp"
#include "riskbandit/env.hpp"
#include "riskbandit/policies.hpp"
#include "riskbandit/rng.hpp"
#include "riskbandit/runner.hpp"
#include "riskbandit/theory.hpp"

using namespace riskbandit;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Independent quantile-integration oracle for the CVaR estimator.
double cvar_quantile_oracle(const std::vector<double>& values, double alpha) {
    std::vector<double> v(values);
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double integral = 0.0;
    double upper = 1.0;
    const double lo = 1.0 - alpha;
    for (auto it = v.rbegin(); it != v.rend() && upper > lo; ++it) {
        const double lower = std::max(lo, upper - 1.0 / n);
        integral += *it * (upper - lower);
        upper = lower;
    }
    return integral / alpha;
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 g(12001);
    double worst = 0.0;
    double worst_w = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(draw_index(g, 50));
        std::vector<double> v(n);
        for (auto& x : v) x = draw_u01(g);
        for (int ai = 1; ai <= 10; ++ai) {
            const double alpha = 0.1 * ai;
            worst = std::max(worst, std::abs(empirical_cvar(v, alpha) -
                                             cvar_quantile_oracle(v, alpha)));
            std::vector<double> w(n, 1.0);
            worst_w = std::max(worst_w, std::abs(weighted_empirical_cvar(v, w, alpha) -
                                                 empirical_cvar(v, alpha)));
        }
    }
    const double secs = elapsed_s(t0);
    report(1, worst <= 1e-12 && worst_w <= 1e-12 && secs < 10.0,
           "cvar estimator matches the quantile-integration oracle",
           "max |err| " + format_double(worst) + ", weighted reduction max |err| " +
               format_double(worst_w) + ", " + format_double(secs) + " s");
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (double p : {0.2, 0.5, 0.8}) {
        int alarms = 0;
        const int runs = 500;
        for (int rep = 0; rep < runs; ++rep) {
            std::mt19937_64 g(21000 + rep + static_cast<int>(p * 1000) * 17);
            RbocpdBank bank(0.05);
            bool fired = false;
            for (long t = 1; t <= 2000 && !fired; ++t)
                fired = bank.step(draw_u01(g) < p ? 1 : 0).restart;
            alarms += fired;
        }
        const double frac = static_cast<double>(alarms) / runs;
        pass = pass && frac <= 0.07;
        detail += "p=" + format_double(p) + ": " + format_double(frac) + "  ";
    }
    const double secs = elapsed_s(t0);
    pass = pass && secs < 120.0;
    report(2, pass, "false-alarm rate within the budget", detail + format_double(secs) + " s");
}

void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    auto run_gap = [&](double gap, long horizon, int& detected, double& mean_delay) {
        const double p1 = 0.5 - gap / 2, p2 = 0.5 + gap / 2;
        const int runs = 500;
        detected = 0;
        double total = 0.0;
        for (int rep = 0; rep < runs; ++rep) {
            std::mt19937_64 g(31000 + rep + static_cast<int>(gap * 100) * 31);
            RbocpdBank bank(0.05);
            long fired = 0;
            for (long t = 1; t <= horizon && fired == 0; ++t) {
                const int z = draw_u01(g) < (t <= 500 ? p1 : p2) ? 1 : 0;
                if (bank.step(z).restart && t > 500) fired = t;
            }
            if (fired > 0) {
                ++detected;
                total += static_cast<double>(fired - 500);
            }
        }
        mean_delay = detected > 0 ? total / detected : 1e300;
    };
    int det04 = 0, det02 = 0;
    double delay04 = 0.0, delay02 = 0.0;
    run_gap(0.4, 1500, det04, delay04);
    run_gap(0.2, 2500, det02, delay02);
    const double secs = elapsed_s(t0);
    const bool pass = det04 >= 475 && delay04 < delay02 && secs < 120.0;
    report(3, pass, "detection power and delay scaling",
           "detected@0.4 " + std::to_string(det04) + "/500, mean delay 0.4 " +
               format_double(delay04) + " < 0.2 " + format_double(delay02) + ", " +
               format_double(secs) + " s");
}

void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 g(44001);
    bool pass = true;
    for (int rep = 0; rep < 200 && pass; ++rep) {
        const std::size_t n = 20 + static_cast<std::size_t>(draw_index(g, 281));
        std::vector<int> bits(n);
        const double p1 = draw_u01(g), p2 = draw_u01(g);
        for (std::size_t i = 0; i < n; ++i)
            bits[i] = draw_u01(g) < (i < n / 2 ? p1 : p2) ? 1 : 0;
        for (double delta : {0.01, 0.05, 0.2}) {
            std::optional<long> inc;
            RbocpdBank bank(delta);
            for (std::size_t i = 0; i < n && !inc; ++i)
                if (bank.step(bits[i]).restart) inc = static_cast<long>(i) + 1;
            if (inc != rbocpd_batch(bits, delta)) pass = false;
        }
    }
    const double secs = elapsed_s(t0);
    report(4, pass && secs < 60.0, "incremental detector matches the batch reference",
           "200 sequences x 3 deltas, exact, " + format_double(secs) + " s");
}

ExperimentConfig experiment_config(long A, long T, long K, long min_seg, long reps) {
    ExperimentConfig cfg;
    cfg.environment.gen = {A, T, K, 0.2, min_seg, false};
    cfg.measure = {RiskKind::CVaR, 0.45};
    cfg.replications = reps;
    cfg.base_seed = 1;
    cfg.bonus_scale = 0.004;
    return cfg;
}

double final_mean(const RunSummary& s, PolicyKind kind) {
    for (const auto& algo : s.algorithms)
        if (algo.kind == kind) return algo.final_mean;
    return -1.0;
}

double fig1a_final_regret = -1.0;  // shared with criterion 7

void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = experiment_config(5, 40000, 6, 1000, 60);
    cfg.algorithms = {{PolicyKind::RbocpdRiskLcb},
                      {PolicyKind::RiskLcb},
                      {PolicyKind::DiscountedRiskLcb},
                      {PolicyKind::SlidingWindowRiskLcb},
                      {PolicyKind::Oracle}};
    const RunSummary summary = run_experiment(cfg);
    const double rb = final_mean(summary, PolicyKind::RbocpdRiskLcb);
    const double plain = final_mean(summary, PolicyKind::RiskLcb);
    const double disc = final_mean(summary, PolicyKind::DiscountedRiskLcb);
    const double sw = final_mean(summary, PolicyKind::SlidingWindowRiskLcb);
    const double oracle = final_mean(summary, PolicyKind::Oracle);
    fig1a_final_regret = rb;
    const double secs = elapsed_s(t0);
    const bool pass =
        rb < plain && rb < disc && rb < sw && oracle == 0.0 && secs < 900.0;
    report(5, pass, "restart-equipped policy beats every baseline at the study scale",
           "rbocpd " + format_double(rb) + " vs plain " + format_double(plain) +
               ", discounted " + format_double(disc) + ", sliding " + format_double(sw) +
               ", oracle " + format_double(oracle) + ", " + format_double(secs) + " s");
}

void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = experiment_config(5, 10000, 0, 0, 30);
    cfg.algorithms = {{PolicyKind::RbocpdRiskLcb}, {PolicyKind::RiskLcb}};
    const RunSummary summary = run_experiment(cfg);
    const double rb = final_mean(summary, PolicyKind::RbocpdRiskLcb);
    const double plain = final_mean(summary, PolicyKind::RiskLcb);
    double restarts_per_arm = 0.0;
    for (const auto& algo : summary.algorithms)
        if (algo.kind == PolicyKind::RbocpdRiskLcb)
            restarts_per_arm = algo.mean_restarts / 5.0;
    const double hi = std::max(rb, plain), lo = std::min(rb, plain);
    const bool ratio_ok = lo <= 0.0 ? hi <= 0.0 : hi / lo <= 2.0;
    const double secs = elapsed_s(t0);
    report(6, ratio_ok && restarts_per_arm <= 0.15,
           "stationary degeneracy: no-change runs track the plain policy",
           "rbocpd " + format_double(rb) + " vs plain " + format_double(plain) +
               ", restarts/arm " + format_double(restarts_per_arm) + ", " +
               format_double(secs) + " s");
}

void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = experiment_config(5, 10000, 6, 0, 60);
    cfg.algorithms = {{PolicyKind::RbocpdRiskLcb}};
    const RunSummary summary = run_experiment(cfg);
    const double small_T = final_mean(summary, PolicyKind::RbocpdRiskLcb);
    const double ratio = small_T > 0.0 ? fig1a_final_regret / small_T : 1e300;
    const double secs = elapsed_s(t0);
    report(7, fig1a_final_regret >= 0.0 && ratio <= 3.0,
           "sublinear growth in the horizon",
           "final regret T=40000: " + format_double(fig1a_final_regret) +
               ", T=10000: " + format_double(small_T) + ", ratio " + format_double(ratio) +
               ", " + format_double(secs) + " s");
}

void criterion_8() {
    const double bound =
        risk_lcb_regret_bound(1000, 1.0, 0.5, std::vector<double>{0.6}, 2);
    const bool b1 = std::abs(bound - 705636.0) / 705636.0 <= 1e-3;
    const bool b2 = std::abs(f_term(1, 1) - 1.8181) <= 1e-3;
    const bool b3 = std::abs(default_beta(5, 6, 40000) - 0.027386) <= 1e-6;
    report(8, b1 && b2 && b3, "theory spot values",
           "regret bound " + format_double(bound) + ", f(1,1) " +
               format_double(f_term(1, 1)) + ", beta " +
               format_double(default_beta(5, 6, 40000)));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = experiment_config(3, 2000, 2, 400, 3);
    cfg.algorithms = {{PolicyKind::RbocpdRiskLcb},
                      {PolicyKind::SlidingWindowRiskLcb},
                      {PolicyKind::Oracle}};
    const auto base = fs::temp_directory_path() / "riskbandit_acceptance";
    fs::remove_all(base);
    const std::string dir1 = (base / "a").string();
    const std::string dir2 = (base / "b").string();
    write_outputs(run_experiment(cfg), dir1);
    write_outputs(run_experiment(cfg), dir2);
    bool pass = true;
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dir1)) {
        if (entry.path().extension() != ".csv") continue;
        ++files;
        const auto name = entry.path().filename().string();
        if (read_file(entry.path().string()) != read_file(dir2 + "/" + name)) pass = false;
    }
    fs::remove_all(base);
    const double secs = elapsed_s(t0);
    report(9, pass && files == 6, "repeated runs emit bit-identical CSVs",
           std::to_string(files) + " files compared, " + format_double(secs) + " s");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%d criteria failed\n", failures);
    return failures;
}
