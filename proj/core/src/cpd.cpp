#include "riskbandit/cpd.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace riskbandit {

namespace {
constexpr double kLog2 = 0.6931471805599453;
}

double laplace_predict(long n1, long n0, int z) {
    if (n1 < 0 || n0 < 0) throw std::domain_error("negative counts");
    const double denom = static_cast<double>(n1 + n0 + 2);
    return z ? (static_cast<double>(n1) + 1.0) / denom
             : (static_cast<double>(n0) + 1.0) / denom;
}

double eta_default(long r, long s, long t, double delta) {
    if (!(r <= s && s <= t)) throw std::domain_error("eta indices must satisfy r <= s <= t");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must be in (0,1)");
    const double m = static_cast<double>(t - r + 1);
    return delta / (m * (m + 1.0));
}

RbocpdBank::RbocpdBank(double delta, EtaSchedule schedule, std::optional<std::size_t> cap)
    : delta_(delta), schedule_(std::move(schedule)), cap_(cap) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must be in (0,1)");
    if (cap_ && *cap_ < 2) throw std::domain_error("candidate cap must be >= 2");
    logint_.reserve(1024);
    logint_.push_back(0.0);  // unused ln(0) slot
}

void RbocpdBank::reset() {
    t_ = 0;
    start_.clear();
    ones_.clear();
    logw_.clear();
}

double RbocpdBank::log_of(long n) {
    while (static_cast<long>(logint_.size()) <= n)
        logint_.push_back(std::log(static_cast<double>(logint_.size())));
    return logint_[static_cast<std::size_t>(n)];
}

double RbocpdBank::log_weight(long s) const {
    for (std::size_t i = 0; i < start_.size(); ++i)
        if (start_[i] == s) return logw_[i];
    throw std::out_of_range("no candidate with that start index");
}

DetectionReport RbocpdBank::step(int z) {
    const long t = ++t_;
    log_of(t + 2);  // grow the table once, outside the candidate loop

    // The origin's current log-weight is the marginal log-likelihood of
    // z_1..z_{t-1}; a challenger born now inherits it as its prefix term.
    const double log_v = start_.empty() ? 0.0 : logw_[0];

    double log_eta_ratio = 0.0;
    if (t >= 2 && schedule_.s_independent) {
        log_eta_ratio = std::log(schedule_(1, t, t, delta_)) -
                        std::log(schedule_(1, t - 1, t - 1, delta_));
    }

    const std::size_t existing = start_.size();
    const double* li = logint_.data();
    for (std::size_t i = 0; i < existing; ++i) {
        const long len = t - start_[i];  // observations seen before z
        const long n1 = ones_[i];
        const double log_lap =
            z ? li[n1 + 1] - li[len + 2] : li[len - n1 + 1] - li[len + 2];
        double d = log_lap;
        if (i > 0) {
            if (schedule_.s_independent) {
                d += log_eta_ratio;
            } else {
                d += std::log(schedule_(1, start_[i], t, delta_)) -
                     std::log(schedule_(1, start_[i], t - 1, delta_));
            }
        }
        logw_[i] += d;
        ones_[i] += z;
    }

    // Newborn candidate s = t. The origin (t == 1) carries no eta prior.
    const double log_eta_init = (t == 1) ? 0.0 : std::log(schedule_(1, t, t, delta_));
    start_.push_back(t);
    ones_.push_back(z);
    logw_.push_back(log_eta_init + log_v - kLog2);

    DetectionReport report;
    report.t = t;
    const double origin = logw_[0];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < start_.size(); ++i) {
        if (logw_[i] > origin && logw_[i] > best) {
            best = logw_[i];
            report.restart = true;
            report.trigger_s = start_[i];
        }
    }

    if (cap_ && start_.size() > *cap_) {
        // Drop the weakest challengers until the bank fits the cap.
        while (start_.size() > *cap_) {
            std::size_t weakest = 1;
            for (std::size_t i = 2; i < start_.size(); ++i)
                if (logw_[i] < logw_[weakest]) weakest = i;
            start_.erase(start_.begin() + static_cast<long>(weakest));
            ones_.erase(ones_.begin() + static_cast<long>(weakest));
            logw_.erase(logw_.begin() + static_cast<long>(weakest));
        }
    }
    return report;
}

std::optional<long> rbocpd_batch(const std::vector<int>& bits, double delta,
                                 EtaSchedule schedule) {
    if (bits.empty()) throw std::domain_error("empty sequence");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must be in (0,1)");
    const long n = static_cast<long>(bits.size());

    std::vector<double> logfact(static_cast<std::size_t>(n) + 2, 0.0);
    for (long k = 1; k <= n + 1; ++k)
        logfact[static_cast<std::size_t>(k)] =
            logfact[static_cast<std::size_t>(k - 1)] + std::log(static_cast<double>(k));
    std::vector<long> pre(static_cast<std::size_t>(n) + 1, 0);
    for (long i = 1; i <= n; ++i)
        pre[static_cast<std::size_t>(i)] =
            pre[static_cast<std::size_t>(i - 1)] + bits[static_cast<std::size_t>(i - 1)];

    // ln of the Laplace marginal likelihood of bits[i..j] (1-based inclusive).
    auto seg_loglik = [&](long i, long j) -> double {
        if (j < i) return 0.0;
        const long n1 = pre[static_cast<std::size_t>(j)] - pre[static_cast<std::size_t>(i - 1)];
        const long len = j - i + 1;
        return logfact[static_cast<std::size_t>(n1)] +
               logfact[static_cast<std::size_t>(len - n1)] -
               logfact[static_cast<std::size_t>(len + 1)];
    };

    for (long t = 1; t <= n; ++t) {
        const double origin = seg_loglik(1, t);
        for (long s = 2; s <= t; ++s) {
            const double w =
                std::log(schedule(1, s, t, delta)) + seg_loglik(1, s - 1) + seg_loglik(s, t);
            if (w > origin) return t;
        }
    }
    return std::nullopt;
}

double bernoulli_kl(double p, double q) {
    auto term = [](double a, double b) {
        if (a <= 0.0) return 0.0;
        return a * std::log(a / b);
    };
    return term(p, q) + term(1.0 - p, 1.0 - q);
}

GlrDetector::GlrDetector(double delta) : delta_(delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must be in (0,1)");
    prefix_ones_.push_back(0);
}

void GlrDetector::reset() {
    prefix_ones_.assign(1, 0);
    stat_ = 0.0;
}

DetectionReport GlrDetector::step(int z) {
    prefix_ones_.push_back(prefix_ones_.back() + z);
    const long n = time();

    DetectionReport report;
    report.t = n;
    stat_ = 0.0;
    if (n < 2) return report;

    const double ones = static_cast<double>(prefix_ones_.back());
    const double mu = ones / static_cast<double>(n);
    if (mu <= 0.0 || mu >= 1.0) return report;  // constant stream, statistic 0

    long best_s = 0;
    for (long s = 1; s < n; ++s) {
        const double k1 = static_cast<double>(prefix_ones_[static_cast<std::size_t>(s)]);
        const double mu1 = k1 / static_cast<double>(s);
        const double mu2 = (ones - k1) / static_cast<double>(n - s);
        const double g = static_cast<double>(s) * bernoulli_kl(mu1, mu) +
                         static_cast<double>(n - s) * bernoulli_kl(mu2, mu);
        if (g > stat_) {
            stat_ = g;
            best_s = s;
        }
    }
    const double threshold =
        std::log(3.0 * std::pow(static_cast<double>(n), 1.5) / delta_);
    if (stat_ > threshold) {
        report.restart = true;
        report.trigger_s = best_s + 1;  // start of the post-change segment
    }
    return report;
}

std::optional<long> glr_detect(const std::vector<int>& bits, double delta) {
    if (bits.empty()) throw std::domain_error("empty sequence");
    GlrDetector det(delta);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (det.step(bits[i]).restart) return static_cast<long>(i) + 1;
    }
    return std::nullopt;
}

}  // namespace riskbandit
