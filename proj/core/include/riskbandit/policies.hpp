#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "riskbandit/cpd.hpp"
#include "riskbandit/env.hpp"
#include "riskbandit/risk.hpp"

namespace riskbandit {

enum class PolicyKind {
    RbocpdRiskLcb,
    RiskLcb,
    DiscountedRiskLcb,
    SlidingWindowRiskLcb,
    GlrRiskLcb,
    Oracle,
};

std::string policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy_name(const std::string& name);

enum class BetaMode { Fixed, Decaying };

struct PolicyConfig {
    RiskMeasureSpec measure;
    double L = 0.0;          // 0 -> lipschitz_constant(measure)
    double sigma = 0.5;      // sub-Gaussian scale for [0,1] rewards
    double bonus_scale = 1.0;
    BetaMode beta_mode = BetaMode::Fixed;
    double beta = 0.0;       // forced-exploration rate when Fixed
    long n0 = 1;             // pull-count initialization mass
    double s0 = 0.5;         // loss-sum initialization mass
    double delta = 0.05;     // detector false-alarm budget
    double gamma_discount = 0.99;  // discounted baseline; 1.0 disables decay
    long tau_window = 100;         // sliding-window baseline
    std::optional<std::size_t> detector_cap;
    bool detector_enabled = true;

    double lipschitz() const { return L > 0.0 ? L : lipschitz_constant(measure); }
    void validate() const;
};

// Forced-exploration rate sqrt(A * K_T / T), clipped to [0,1].
double default_beta(long A, long K_T, long T);

// Horizon-free alternative sqrt(A / t), clipped to 1.
double decaying_beta(long A, long t);

// Discount factor 1 - sqrt(K_T/T)/4; 1.0 when K_T = 0 (no forgetting).
double default_gamma(long K_T, long T);

// Window ceil(2 * sqrt(T ln T / K_T)); T when K_T = 0.
long default_tau(long K_T, long T);

// Exploration width L * sigma * (32 sqrt(e ln t) + 512) / sqrt(n), times
// bonus_scale.
double risk_lcb_width(long t, double n_effective, const PolicyConfig& cfg);

// With probability beta a uniformly random arm; otherwise the argmin with
// ties broken by lowest arm id. Arms are 0-based.
long select_action(std::span<const double> indices, double beta, std::mt19937_64& rng);

// Per-arm bookkeeping shared by every policy variant.
struct ArmState {
    long N = 0;     // pull count since last restart, starts at n0
    double S = 0.0;  // loss sum since last restart, starts at s0
    std::vector<std::uint8_t> Y;  // re-shifted loss observations since last restart
    long ones = 0;  // number of loss-1 entries in Y
    long restart_count = 0;

    std::unique_ptr<RbocpdBank> detector;
    std::unique_ptr<GlrDetector> glr;

    // discounted baseline state
    double n_gamma = 0.0;
    double s_gamma = 0.0;

    // sliding-window baseline state: (global step, loss)
    std::deque<std::pair<long, std::uint8_t>> window;
    long win_n = 0;
    long win_ones = 0;
};

// Lower-confidence-bound indices. All return -infinity for an arm with no
// usable observations, which forces a pull.
double risk_lcb_index(const ArmState& arm, long t, const PolicyConfig& cfg);
double discounted_index(const ArmState& arm, long t, const PolicyConfig& cfg);
double sliding_window_index(const ArmState& arm, long t, const PolicyConfig& cfg);

// One policy instance driving A arms for one replication. Deterministic
// given (kind, config, seed, reward stream).
class Policy {
public:
    Policy(PolicyKind kind, long arms, PolicyConfig cfg, std::uint64_t seed,
           const SwitchingBanditInstance* oracle_instance = nullptr);

    long choose(long t);                       // select the arm to pull at step t
    void observe(long t, long arm, int reward);  // feed back the reward bit

    PolicyKind kind() const { return kind_; }
    long arms() const { return static_cast<long>(arms_.size()); }
    const PolicyConfig& config() const { return cfg_; }
    const ArmState& arm_state(long a) const { return arms_[static_cast<std::size_t>(a)]; }
    const ActionTrace& trace() const { return trace_; }
    double forced_fraction() const;
    long total_restarts() const;
    double index_of(long a, long t) const;

private:
    void reset_arm(ArmState& arm);

    PolicyKind kind_;
    PolicyConfig cfg_;
    std::vector<ArmState> arms_;
    std::mt19937_64 rng_;
    const SwitchingBanditInstance* oracle_instance_;
    ActionTrace trace_;
    std::vector<double> scratch_;
    long forced_pulls_ = 0;
    long steps_ = 0;
};

}  // namespace riskbandit
