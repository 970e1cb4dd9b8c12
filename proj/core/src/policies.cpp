#include "riskbandit/policies.hpp"

#include <cmath>
#include <utility>
#include <limits>
#include <stdexcept>

#include "riskbandit/rng.hpp"

namespace riskbandit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::RbocpdRiskLcb: return "rbocpd_risk_lcb";
        case PolicyKind::RiskLcb: return "risk_lcb";
        case PolicyKind::DiscountedRiskLcb: return "discounted_risk_lcb";
        case PolicyKind::SlidingWindowRiskLcb: return "sliding_window_risk_lcb";
        case PolicyKind::GlrRiskLcb: return "glr_risk_lcb";
        case PolicyKind::Oracle: return "oracle";
    }
    return "unknown";
}

std::optional<PolicyKind> parse_policy_name(const std::string& name) {
    for (PolicyKind k :
         {PolicyKind::RbocpdRiskLcb, PolicyKind::RiskLcb, PolicyKind::DiscountedRiskLcb,
          PolicyKind::SlidingWindowRiskLcb, PolicyKind::GlrRiskLcb, PolicyKind::Oracle})
        if (policy_name(k) == name) return k;
    return std::nullopt;
}

void PolicyConfig::validate() const {
    measure.validate();
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
    if (!(bonus_scale > 0.0)) throw std::domain_error("bonus_scale must be > 0");
    if (beta_mode == BetaMode::Fixed && !(beta >= 0.0 && beta <= 1.0))
        throw std::domain_error("beta must be in [0,1]");
    if (!(n0 > 0)) throw std::domain_error("n0 must be > 0");
    if (!(s0 > 0.0)) throw std::domain_error("s0 must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must be in (0,1)");
    if (!(gamma_discount > 0.0 && gamma_discount <= 1.0))
        throw std::domain_error("gamma_discount must be in (0,1]");
    if (!(tau_window >= 1)) throw std::domain_error("tau_window must be >= 1");
}

double default_beta(long A, long K_T, long T) {
    if (A < 2 || T < 1 || K_T < 0) throw std::domain_error("bad default_beta arguments");
    if (K_T == 0) return 0.0;
    return std::min(1.0, std::sqrt(static_cast<double>(A) * static_cast<double>(K_T) /
                                   static_cast<double>(T)));
}

double decaying_beta(long A, long t) {
    if (t < 1) throw std::domain_error("time must be >= 1");
    return std::min(1.0, std::sqrt(static_cast<double>(A) / static_cast<double>(t)));
}

double default_gamma(long K_T, long T) {
    if (T < 2) throw std::domain_error("horizon must be >= 2");
    if (K_T <= 0) return 1.0;
    return 1.0 - 0.25 * std::sqrt(static_cast<double>(K_T) / static_cast<double>(T));
}

long default_tau(long K_T, long T) {
    if (T < 2) throw std::domain_error("horizon must be >= 2");
    if (K_T <= 0) return T;
    return static_cast<long>(std::ceil(
        2.0 * std::sqrt(static_cast<double>(T) * std::log(static_cast<double>(T)) /
                        static_cast<double>(K_T))));
}

double risk_lcb_width(long t, double n_effective, const PolicyConfig& cfg) {
    const double lt = std::log(static_cast<double>(t));
    const double c = 32.0 * std::sqrt(std::exp(1.0) * lt) + 512.0;
    return cfg.bonus_scale * cfg.lipschitz() * cfg.sigma * c / std::sqrt(n_effective);
}

namespace {

long argmin_lowest_id(std::span<const double> indices) {
    long best = 0;
    for (long a = 1; a < static_cast<long>(indices.size()); ++a)
        if (indices[static_cast<std::size_t>(a)] < indices[static_cast<std::size_t>(best)])
            best = a;
    return best;
}

std::pair<long, bool> select_action_ex(std::span<const double> indices, double beta,
                                       std::mt19937_64& rng) {
    if (indices.size() < 2) throw std::domain_error("need at least 2 arms");
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("beta must be in [0,1]");
    if (beta > 0.0 && draw_u01(rng) < beta)
        return {draw_index(rng, static_cast<long>(indices.size())), true};
    return {argmin_lowest_id(indices), false};
}

// Risk of a binary loss sample with `ones` ones out of `n`; exact match of
// the general estimators on {0,1}-valued samples.
double binary_risk(const RiskMeasureSpec& m, double ones, double n,
                   double mean_override = -1.0) {
    const double p = ones / n;
    if (m.kind == RiskKind::CVaR) return std::min(1.0, p / m.level);
    const double mean = mean_override >= 0.0 ? mean_override : p;
    return mean + m.level * p * (1.0 - p);
}

}  // namespace

long select_action(std::span<const double> indices, double beta, std::mt19937_64& rng) {
    return select_action_ex(indices, beta, rng).first;
}

double risk_lcb_index(const ArmState& arm, long t, const PolicyConfig& cfg) {
    const long n_real = static_cast<long>(arm.Y.size());
    if (n_real == 0) return -kInf;
    // CVaR uses the real observations only; the s0/n0 mass has no order
    // statistic. The mean-variance mean term folds it in via S/N.
    const double risk =
        binary_risk(cfg.measure, static_cast<double>(arm.ones), static_cast<double>(n_real),
                    cfg.measure.kind == RiskKind::MeanVariance
                        ? arm.S / static_cast<double>(arm.N)
                        : -1.0);
    return risk - risk_lcb_width(t, static_cast<double>(arm.N), cfg);
}

double discounted_index(const ArmState& arm, long t, const PolicyConfig& cfg) {
    if (!(arm.n_gamma > 0.0)) return -kInf;
    const double risk =
        binary_risk(cfg.measure, arm.s_gamma, arm.n_gamma,
                    cfg.measure.kind == RiskKind::MeanVariance
                        ? (cfg.s0 + arm.s_gamma) / (static_cast<double>(cfg.n0) + arm.n_gamma)
                        : -1.0);
    return risk - risk_lcb_width(t, static_cast<double>(cfg.n0) + arm.n_gamma, cfg);
}

double sliding_window_index(const ArmState& arm, long t, const PolicyConfig& cfg) {
    if (arm.win_n == 0) return -kInf;
    const double risk = binary_risk(
        cfg.measure, static_cast<double>(arm.win_ones), static_cast<double>(arm.win_n),
        cfg.measure.kind == RiskKind::MeanVariance
            ? (cfg.s0 + static_cast<double>(arm.win_ones)) /
                  static_cast<double>(cfg.n0 + arm.win_n)
            : -1.0);
    return risk - risk_lcb_width(t, static_cast<double>(cfg.n0 + arm.win_n), cfg);
}

Policy::Policy(PolicyKind kind, long arms, PolicyConfig cfg, std::uint64_t seed,
               const SwitchingBanditInstance* oracle_instance)
    : kind_(kind),
      cfg_(std::move(cfg)),
      rng_(seed),
      oracle_instance_(oracle_instance) {
    cfg_.validate();
    if (arms < 2) throw std::domain_error("need at least 2 arms");
    if (kind_ == PolicyKind::Oracle && oracle_instance_ == nullptr)
        throw std::domain_error("oracle policy needs the instance");
    arms_.resize(static_cast<std::size_t>(arms));
    for (auto& a : arms_) {
        a.N = cfg_.n0;
        a.S = cfg_.s0;
        if (cfg_.detector_enabled) {
            if (kind_ == PolicyKind::RbocpdRiskLcb)
                a.detector = std::make_unique<RbocpdBank>(cfg_.delta, EtaSchedule{},
                                                          cfg_.detector_cap);
            else if (kind_ == PolicyKind::GlrRiskLcb)
                a.glr = std::make_unique<GlrDetector>(cfg_.delta);
        }
    }
    trace_.restarts_per_arm.assign(static_cast<std::size_t>(arms), 0);
    scratch_.resize(static_cast<std::size_t>(arms));
}

void Policy::reset_arm(ArmState& arm) {
    arm.N = cfg_.n0;
    arm.S = cfg_.s0;
    arm.Y.clear();
    arm.ones = 0;
    if (arm.detector) arm.detector->reset();
    if (arm.glr) arm.glr->reset();
    ++arm.restart_count;
}

double Policy::index_of(long a, long t) const {
    const ArmState& arm = arms_[static_cast<std::size_t>(a)];
    switch (kind_) {
        case PolicyKind::DiscountedRiskLcb: return discounted_index(arm, t, cfg_);
        case PolicyKind::SlidingWindowRiskLcb: return sliding_window_index(arm, t, cfg_);
        case PolicyKind::Oracle: return true_risk(*oracle_instance_, a, t, cfg_.measure);
        default: return risk_lcb_index(arm, t, cfg_);
    }
}

long Policy::choose(long t) {
    if (kind_ == PolicyKind::SlidingWindowRiskLcb) {
        // Evict observations older than the last tau completed steps.
        const long cutoff = t - cfg_.tau_window;
        for (auto& arm : arms_) {
            while (!arm.window.empty() && arm.window.front().first <= cutoff) {
                arm.win_n -= 1;
                arm.win_ones -= arm.window.front().second;
                arm.window.pop_front();
            }
        }
    }
    for (long a = 0; a < arms(); ++a) scratch_[static_cast<std::size_t>(a)] = index_of(a, t);

    double beta = 0.0;
    if (kind_ != PolicyKind::Oracle)
        beta = cfg_.beta_mode == BetaMode::Fixed ? cfg_.beta : decaying_beta(arms(), t);
    auto [arm, forced] = select_action_ex(scratch_, beta, rng_);
    ++steps_;
    if (forced) ++forced_pulls_;
    trace_.arm.push_back(static_cast<std::int32_t>(arm));
    trace_.forced.push_back(forced ? 1 : 0);
    return arm;
}

void Policy::observe(long t, long arm_id, int reward) {
    if (reward != 0 && reward != 1) throw std::domain_error("reward must be a bit");
    trace_.reward.push_back(static_cast<std::uint8_t>(reward));
    const std::uint8_t loss = static_cast<std::uint8_t>(1 - reward);

    if (kind_ == PolicyKind::DiscountedRiskLcb && cfg_.gamma_discount < 1.0) {
        for (auto& a : arms_) {
            a.n_gamma *= cfg_.gamma_discount;
            a.s_gamma *= cfg_.gamma_discount;
        }
    }

    ArmState& arm = arms_[static_cast<std::size_t>(arm_id)];
    arm.Y.push_back(loss);
    arm.ones += loss;
    arm.N += 1;
    arm.S += loss;
    if (kind_ == PolicyKind::DiscountedRiskLcb) {
        arm.n_gamma += 1.0;
        arm.s_gamma += loss;
    } else if (kind_ == PolicyKind::SlidingWindowRiskLcb) {
        arm.window.emplace_back(t, loss);
        arm.win_n += 1;
        arm.win_ones += loss;
    }

    // Change detection runs on the reward bit stream; for Bernoulli data this
    // is equivalent to the loss stream.
    bool restart = false;
    if (arm.detector)
        restart = arm.detector->step(reward).restart;
    else if (arm.glr)
        restart = arm.glr->step(reward).restart;
    if (restart) {
        reset_arm(arm);
        trace_.restarts.push_back({t, arm_id});
        trace_.restarts_per_arm[static_cast<std::size_t>(arm_id)] += 1;
    }
}

double Policy::forced_fraction() const {
    return steps_ == 0 ? 0.0
                       : static_cast<double>(forced_pulls_) / static_cast<double>(steps_);
}

long Policy::total_restarts() const {
    long n = 0;
    for (const auto& a : arms_) n += a.restart_count;
    return n;
}

}  // namespace riskbandit
