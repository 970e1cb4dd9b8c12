#include "riskbandit/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace riskbandit {

namespace {

double width_constant_sq(long T) {
    const double c = 32.0 * std::sqrt(std::exp(1.0) * std::log(static_cast<double>(T))) + 512.0;
    return c * c;
}

}  // namespace

double risk_lcb_regret_bound(long T, double L, double sigma,
                             std::span<const double> gaps, long A) {
    if (T < 1) throw std::domain_error("horizon must be >= 1");
    const double c2 = width_constant_sq(T);
    double total = 0.0;
    for (double gap : gaps) {
        if (!(gap > 0.0)) throw std::domain_error("suboptimality gaps must be > 0");
        total += 4.0 * L * L * sigma * sigma * c2 / gap +
                 28.0 * static_cast<double>(A) * gap;
    }
    return total;
}

double f_term(long s, long t) {
    if (!(1 <= s && s <= t)) throw std::domain_error("need 1 <= s <= t");
    const double n_1s = static_cast<double>(s);
    const double n_st1 = static_cast<double>(t + 1 - s + 1);
    const double n_1t = static_cast<double>(t);
    return std::log(n_1s) + std::log(n_st1) - 0.5 * std::log(n_1t) + 9.0 / 8.0;
}

double confidence_C(long s, long t, double delta) {
    if (!(1 <= s && s <= t)) throw std::domain_error("need 1 <= s <= t");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must be in (0,1)");
    const double n_pre = static_cast<double>(s - 1);    // samples before the change
    const double n_post = static_cast<double>(t - s + 1);
    const double n_all = static_cast<double>(t);
    if (n_pre < 1.0) return std::numeric_limits<double>::infinity();

    const double log1 = std::log(2.0 * std::sqrt(static_cast<double>(s)) / delta);
    const double lnt = std::log(n_all);
    const double arg2 =
        2.0 * n_all * std::sqrt(n_post + 1.0) * lnt * lnt / (std::log(2.0) * delta);
    if (!(log1 > 0.0) || !(arg2 > 1.0)) return std::numeric_limits<double>::infinity();
    const double log2v = std::log(arg2);

    const double term1 = std::sqrt((1.0 + 1.0 / n_pre) / n_pre * log1);
    const double term2 = std::sqrt((1.0 + 1.0 / n_post) / n_post * log2v);
    return std::sqrt(2.0) / 2.0 * (term1 + term2);
}

DelayBoundResult delay_bound(double lambda_gap, long s, double delta,
                             const EtaSchedule& schedule, long cap) {
    if (!(lambda_gap > 0.0 && lambda_gap <= 1.0))
        throw std::domain_error("mean gap must be in (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must be in (0,1)");
    if (s < 1) throw std::domain_error("change time must be >= 1");

    for (long d = 1; d <= cap; ++d) {
        const long t = d + s - 1;
        const double c = confidence_C(s, t, delta);
        if (!(c < lambda_gap)) continue;
        const double log_eta = std::log(schedule(1, s, t, delta));
        const double f = f_term(s, t);
        const double n_pre = static_cast<double>(s - 1);
        const double denom =
            1.0 + (log_eta - f) / (2.0 * n_pre * (lambda_gap - c) * (lambda_gap - c));
        if (!(denom > 0.0)) continue;
        const double lead = std::pow(1.0 - c / lambda_gap, -2.0) /
                            (2.0 * lambda_gap * lambda_gap);
        const double rhs = lead * (-log_eta + f) / denom;
        if (static_cast<double>(d) > rhs) return {d, false};
    }
    return {cap, true};
}

double nonstationary_pull_bound(const BoundInputs& in, double delay_sum) {
    if (!(in.delta_min > 0.0)) throw std::domain_error("gap must be > 0");
    const double bracket = 4.0 * in.L * in.L * in.sigma * in.sigma * width_constant_sq(in.T) /
                               (in.delta_min * in.delta_min) +
                           28.0 * static_cast<double>(in.A);
    return in.beta * static_cast<double>(in.T) / static_cast<double>(in.A) + delay_sum +
           (static_cast<double>(in.K_T) + in.delta) * bracket;
}

double asymptotic_regret_rate(const BoundInputs& in) {
    if (!(in.delta_min > 0.0)) throw std::domain_error("gap must be > 0");
    return static_cast<double>(in.K_T) * in.L * in.L * in.sigma * in.sigma * std::exp(1.0) *
               std::log(static_cast<double>(in.T)) / (in.delta_min * in.delta_min) +
           std::sqrt(static_cast<double>(in.A) * static_cast<double>(in.K_T) *
                     static_cast<double>(in.T));
}

}  // namespace riskbandit
