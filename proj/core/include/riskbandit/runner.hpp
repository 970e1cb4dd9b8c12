#pragma once

#include <string>
#include <vector>

#include "riskbandit/config.hpp"
#include "riskbandit/env.hpp"

namespace riskbandit {

struct AlgoRunSummary {
    std::string name;
    PolicyKind kind = PolicyKind::RiskLcb;
    std::vector<double> mean_cum;  // mean cumulative regret, length T
    std::vector<double> std_cum;   // across-replication std, length T
    double final_mean = 0.0;
    double final_std = 0.0;
    double mean_restarts = 0.0;      // per replication, summed over arms
    double forced_fraction = 0.0;    // mean across replications
    std::vector<std::vector<ActionTrace::RestartEvent>> restart_events;  // per rep
};

struct RunSummary {
    long T = 0;
    long A = 0;
    long replications = 0;
    std::vector<AlgoRunSummary> algorithms;
    std::vector<std::vector<ChangePoint>> change_events;  // per replication
};

// Runs every configured algorithm over seeded replications. Within a
// replication all algorithms face the same mean path and, through
// per-(arm, step) derived sub-seeds, the same reward draws. Deterministic
// for a given config regardless of worker count; RISKBANDIT_THREADS caps
// parallelism.
RunSummary run_experiment(const ExperimentConfig& cfg);

// regret_<algo>.csv (t,mean_cumulative_regret,std) and events_<algo>.csv
// (replication,t,arm,event).
void emit_csv(const RunSummary& summary, const std::string& dir);

// regret.svg: one line per algorithm with a +/-1 std band, static markup.
void emit_svg(const RunSummary& summary, const std::string& dir);

void write_outputs(const RunSummary& summary, const std::string& dir);

}  // namespace riskbandit
