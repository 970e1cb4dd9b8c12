#include "riskbandit/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace riskbandit {

void RiskMeasureSpec::validate() const {
    if (kind == RiskKind::CVaR) {
        if (!(level > 0.0 && level <= 1.0))
            throw std::domain_error("cvar level must be in (0,1]");
    } else {
        if (!(level >= 0.0))
            throw std::domain_error("mean-variance weight must be >= 0");
    }
}

std::string RiskMeasureSpec::describe() const {
    if (kind == RiskKind::CVaR) return "cvar(" + std::to_string(level) + ")";
    return "mean_variance(" + std::to_string(level) + ")";
}

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error("cvar level must be in (0,1]");
}

void check_nonempty(std::span<const double> losses) {
    if (losses.empty()) throw std::domain_error("empty sample");
}

}  // namespace

double empirical_cvar(std::span<const double> losses, double alpha) {
    check_nonempty(losses);
    check_alpha(alpha);
    std::vector<double> v(losses.begin(), losses.end());
    std::sort(v.begin(), v.end(), std::greater<double>());
    // Work in units of 1/n mass: the target is alpha*n, each value holds 1.
    const double target = alpha * static_cast<double>(v.size());
    double acc = 0.0;
    double val = 0.0;
    for (std::size_t i = 0; i < v.size() && acc < target; ++i) {
        const double take = std::min(1.0, target - acc);
        val += v[i] * take;
        acc += take;
    }
    return val / target;
}

double weighted_empirical_cvar(std::span<const double> losses,
                               std::span<const double> weights, double alpha) {
    check_nonempty(losses);
    check_alpha(alpha);
    if (weights.size() != losses.size())
        throw std::domain_error("weights/values size mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::domain_error("negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::domain_error("weights sum to zero");

    std::vector<std::size_t> order(losses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (losses[a] != losses[b]) return losses[a] > losses[b];
        return a < b;
    });

    const double target = alpha * total;
    double acc = 0.0;
    double val = 0.0;
    for (std::size_t i : order) {
        if (acc >= target) break;
        const double take = std::min(weights[i], target - acc);
        val += losses[i] * take;
        acc += take;
    }
    return val / target;
}

double empirical_mv(std::span<const double> losses, double gamma) {
    check_nonempty(losses);
    if (!(gamma >= 0.0)) throw std::domain_error("mean-variance weight must be >= 0");
    const double n = static_cast<double>(losses.size());
    double mean = 0.0;
    for (double x : losses) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : losses) var += (x - mean) * (x - mean);
    var /= n;
    return mean + gamma * var;
}

double weighted_empirical_mv(std::span<const double> losses,
                             std::span<const double> weights, double gamma) {
    check_nonempty(losses);
    if (!(gamma >= 0.0)) throw std::domain_error("mean-variance weight must be >= 0");
    if (weights.size() != losses.size())
        throw std::domain_error("weights/values size mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::domain_error("negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::domain_error("weights sum to zero");
    double mean = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) mean += weights[i] * losses[i];
    mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i)
        var += weights[i] * (losses[i] - mean) * (losses[i] - mean);
    var /= total;
    return mean + gamma * var;
}

double bernoulli_cvar(double p_loss, double alpha) {
    if (!(p_loss >= 0.0 && p_loss <= 1.0))
        throw std::domain_error("loss probability must be in [0,1]");
    check_alpha(alpha);
    return std::min(1.0, p_loss / alpha);
}

double bernoulli_mv(double p_loss, double gamma) {
    if (!(p_loss >= 0.0 && p_loss <= 1.0))
        throw std::domain_error("loss probability must be in [0,1]");
    if (!(gamma >= 0.0)) throw std::domain_error("mean-variance weight must be >= 0");
    return p_loss + gamma * p_loss * (1.0 - p_loss);
}

double bernoulli_risk(const RiskMeasureSpec& spec, double p_loss) {
    spec.validate();
    return spec.kind == RiskKind::CVaR ? bernoulli_cvar(p_loss, spec.level)
                                       : bernoulli_mv(p_loss, spec.level);
}

double lipschitz_constant(const RiskMeasureSpec& spec) {
    spec.validate();
    return spec.kind == RiskKind::CVaR ? 1.0 / spec.level : 1.0 + 4.0 * spec.level;
}

double empirical_risk(const RiskMeasureSpec& spec, std::span<const double> losses) {
    spec.validate();
    return spec.kind == RiskKind::CVaR ? empirical_cvar(losses, spec.level)
                                       : empirical_mv(losses, spec.level);
}

}  // namespace riskbandit
