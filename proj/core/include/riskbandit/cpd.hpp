#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace riskbandit {

// Add-one smoothed Bernoulli predictive probability of the next bit z given
// n1 ones and n0 zeros so far: (n1+1)/(n1+n0+2) for z=1, (n0+1)/(n1+n0+2)
// for z=0. Always strictly inside (0,1).
double laplace_predict(long n1, long n0, int z);

// Challenger prior/decay schedule eta_{r,s,t}. Decreasing in t, proportional
// to the false-alarm budget delta, independent of s:
//   eta = delta / ((t - r + 1) * (t - r + 2))
// so that the total challenger prior mass sum_t eta_{r,t,t} equals delta.
double eta_default(long r, long s, long t, double delta);

struct EtaSchedule {
    std::function<double(long r, long s, long t, double delta)> eta;
    // When true the per-step decay ratio eta(t)/eta(t-1) is shared by all
    // challengers, enabling the O(1)-per-step ratio update.
    bool s_independent = true;

    double operator()(long r, long s, long t, double delta) const {
        return eta ? eta(r, s, t, delta) : eta_default(r, s, t, delta);
    }
};

struct DetectionReport {
    bool restart = false;
    std::optional<long> trigger_s;  // challenger start index, present iff restart
    long t = 0;                     // local time of the test
};

// Restarted Bayesian online change-point detector on a binary stream.
//
// One forecaster per candidate change start s tracks the Laplace marginal
// likelihood of its own suffix; its log-weight is
//   log theta_{r,s,t} = log eta_{r,s,t} + log V_{r:s} - sum_{u=s..t} l_{s,u}
// where V_{r:s} is the origin forecaster's marginal likelihood of the prefix
// and l_{s,u} the Laplace log-loss. The origin forecaster (s = r) carries no
// eta prior, so its log-weight is exactly the marginal log-likelihood of the
// whole segment. A restart is reported as soon as some challenger's weight
// strictly exceeds the origin's; the caller decides whether to reset().
class RbocpdBank {
public:
    explicit RbocpdBank(double delta, EtaSchedule schedule = {},
                        std::optional<std::size_t> cap = std::nullopt);

    DetectionReport step(int z);
    void reset();

    long time() const { return t_; }
    std::size_t candidate_count() const { return start_.size(); }
    double delta() const { return delta_; }

    // Log-weight of the candidate with start index s (for diagnostics/tests).
    double log_weight(long s) const;
    std::vector<long> candidate_starts() const { return {start_.begin(), start_.end()}; }

private:
    double log_of(long n);  // ln(n) via a lazily grown integer-log table

    double delta_;
    EtaSchedule schedule_;
    std::optional<std::size_t> cap_;
    long t_ = 0;
    std::vector<long> start_;   // candidate start indices, origin first
    std::vector<long> ones_;    // ones observed by each candidate
    std::vector<double> logw_;  // candidate log-weights
    std::vector<double> logint_;
};

// Reference implementation: at each t every weight is recomputed from its
// closed-form definition (Beta-function segment marginals); returns the first
// t at which the restart test fires. Exists as an oracle for step().
std::optional<long> rbocpd_batch(const std::vector<int>& bits, double delta,
                                 EtaSchedule schedule = {});

// Bernoulli KL divergence kl(p, q) with the 0 log 0 = 0 convention.
double bernoulli_kl(double p, double q);

// Generalized likelihood ratio detector for a single Bernoulli change:
// at each n the full split scan
//   sup_{1<=s<n} s*kl(mean(1..s), mean(1..n)) + (n-s)*kl(mean(s+1..n), mean(1..n))
// is compared against the threshold log(3 n^{3/2} / delta).
class GlrDetector {
public:
    explicit GlrDetector(double delta);

    DetectionReport step(int z);
    void reset();
    long time() const { return static_cast<long>(prefix_ones_.size()) - 1; }
    double statistic() const { return stat_; }

private:
    double delta_;
    double stat_ = 0.0;
    std::vector<long> prefix_ones_;  // prefix_ones_[i] = ones among first i bits
};

std::optional<long> glr_detect(const std::vector<int>& bits, double delta);

}  // namespace riskbandit
