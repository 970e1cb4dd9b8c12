#pragma once

#include <span>
#include <string>

namespace riskbandit {

enum class RiskKind { CVaR, MeanVariance };

// Which risk functional to use and its level: alpha in (0,1] for CVaR,
// gamma >= 0 for MeanVariance. Risks operate on the loss scale
// (loss = 1 - reward), so lower is always better.
struct RiskMeasureSpec {
    RiskKind kind = RiskKind::CVaR;
    double level = 0.45;

    void validate() const;  // throws std::domain_error on bad level
    std::string describe() const;
};

// Average of the worst alpha-fraction of the sample, i.e. the exact CVaR of
// the empirical distribution: the quantile function is integrated over the
// top alpha mass, splitting the boundary order statistic fractionally.
// Accepts arbitrary real samples (translation equivariant, positively
// homogeneous).
double empirical_cvar(std::span<const double> losses, double alpha);

// Weighted counterpart: weights are normalized, mass is accumulated from the
// largest value down until alpha is covered. Reduces exactly to
// empirical_cvar when all weights are equal.
double weighted_empirical_cvar(std::span<const double> losses,
                               std::span<const double> weights, double alpha);

// mean + gamma * variance with the population (1/n) variance.
double empirical_mv(std::span<const double> losses, double gamma);
double weighted_empirical_mv(std::span<const double> losses,
                             std::span<const double> weights, double gamma);

// Closed forms for a Bernoulli loss distribution with P(loss = 1) = p_loss.
double bernoulli_cvar(double p_loss, double alpha);
double bernoulli_mv(double p_loss, double gamma);
double bernoulli_risk(const RiskMeasureSpec& spec, double p_loss);

// Lipschitz constant of the risk functional w.r.t. the Wasserstein-1
// distance: 1/alpha for CVaR; 1 + 4*gamma for mean-variance on [0,1]
// supported distributions.
double lipschitz_constant(const RiskMeasureSpec& spec);

// Dispatch on an unweighted sample.
double empirical_risk(const RiskMeasureSpec& spec, std::span<const double> losses);

}  // namespace riskbandit
