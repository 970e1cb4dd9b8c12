#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "riskbandit/risk.hpp"

namespace riskbandit {

// One stationary stretch of an arm: Bernoulli reward mean `mean` on the
// inclusive 1-based step range [start, end].
struct Segment {
    long start = 1;
    long end = 1;
    double mean = 0.0;
};

struct ChangePoint {
    long t = 0;   // first step with the new mean
    long arm = 0;  // 0-based
};

// Piecewise-constant Bernoulli means for A arms over steps 1..T. Arms are
// 0-based in memory; CSV files use 1-based arm ids.
struct SwitchingBanditInstance {
    long T = 0;
    std::vector<std::vector<Segment>> segments;  // per arm, ordered

    long arms() const { return static_cast<long>(segments.size()); }
    double mean_at(long arm, long t) const;

    // Per-arm changes where the mean actually differs, sorted by time.
    std::vector<ChangePoint> change_points() const;
    long total_changes() const;  // K_T
    double min_change_gap() const;  // smallest |mean jump| over all changes

    // Checks the partition structure, mean ranges and (optionally) that all
    // jumps are >= lambda. Throws std::domain_error on violation.
    void validate(std::optional<double> lambda = std::nullopt) const;
};

struct GenParams {
    long A = 2;
    long T = 1;
    long K = 0;           // number of change points to place
    double lambda = 0.2;  // minimum mean jump at a change
    long min_seg = 0;     // 0 -> default T / (4 * (K + 1))
    bool global_switch = false;  // each change hits all arms at once
};

SwitchingBanditInstance generate_instance(const GenParams& params, std::uint64_t seed);

// One Bernoulli draw of the reward of `arm` at step t.
int sample_reward(const SwitchingBanditInstance& inst, long arm, long t,
                  std::mt19937_64& rng);

// Stateless coupled draw: two callers with the same (key, arm, t) observe the
// same bit, which pairs algorithms within a replication.
int coupled_reward(std::uint64_t key, long arm, long t, double mean);

// Closed-form risk of the arm's loss distribution at step t.
double true_risk(const SwitchingBanditInstance& inst, long arm, long t,
                 const RiskMeasureSpec& measure);

// What a policy did over a horizon. Arms are 0-based, steps 1-based.
struct ActionTrace {
    struct RestartEvent {
        long t = 0;
        long arm = 0;
    };
    std::vector<std::int32_t> arm;   // length T
    std::vector<std::uint8_t> reward;  // length T
    std::vector<std::uint8_t> forced;  // 1 if the pull came from the uniform branch
    std::vector<RestartEvent> restarts;
    std::vector<long> restarts_per_arm;

    long horizon() const { return static_cast<long>(arm.size()); }
};

struct RegretTrace {
    std::vector<double> instantaneous;  // r_t >= 0
    std::vector<double> cumulative;     // prefix sums, non-decreasing
};

// Per-step excess true risk of the pulled arm over the per-step optimum,
// computed analytically from the instance means.
RegretTrace rho_regret(const ActionTrace& trace, const SwitchingBanditInstance& inst,
                       const RiskMeasureSpec& measure);

// CSV rows `arm,start,end,mean` (header required, 1-based inclusive ranges).
SwitchingBanditInstance load_instance_csv(const std::string& path);
void write_instance_csv(const SwitchingBanditInstance& inst, const std::string& path);

// Shortest decimal representation of x that parses back to the same double.
std::string format_double(double x);

}  // namespace riskbandit
