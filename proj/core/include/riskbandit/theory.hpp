#pragma once

#include <span>

#include "riskbandit/cpd.hpp"

namespace riskbandit {

// Inputs shared by the regret/pull-count bound calculators. Natural
// logarithms throughout.
struct BoundInputs {
    long T = 1;
    long A = 2;
    long K_T = 0;
    double L = 1.0;
    double sigma = 0.5;
    double delta_min = 0.1;   // smallest risk suboptimality gap over segments
    double lambda_min = 0.1;  // smallest mean jump at a change
    double beta = 0.0;        // forced-exploration rate
    double delta = 0.05;      // detector false-alarm budget
};

// Stationary regret bound: sum over suboptimal arms of
//   4 L^2 sigma^2 (32 sqrt(e ln T) + 512)^2 / gap + 28 A gap.
double risk_lcb_regret_bound(long T, double L, double sigma,
                             std::span<const double> gaps, long A);

// f_{s,t} = ln(s) + ln(t - s + 2) - ln(t)/2 + 9/8.
double f_term(long s, long t);

// Confidence radius for the pre/post-change mean estimates after s-1 and
// t-s+1 samples; +infinity when s < 2 (no pre-change sample).
double confidence_C(long s, long t, double delta);

struct DelayBoundResult {
    long d = 0;
    bool capped = false;  // no admissible d within the scan cap
};

// Smallest d satisfying the detection-delay inequality for a mean jump of
// size lambda_gap occurring after s local samples, scanned numerically.
DelayBoundResult delay_bound(double lambda_gap, long s, double delta,
                             const EtaSchedule& schedule = {}, long cap = 1000000);

// beta T / A + delay_sum + (K_T + delta) * [4 L^2 sigma^2 (...)^2 / gap^2 + 28 A].
double nonstationary_pull_bound(const BoundInputs& in, double delay_sum);

// Order expression K_T L^2 sigma^2 e ln T / gap^2 + sqrt(A K_T T).
double asymptotic_regret_rate(const BoundInputs& in);

}  // namespace riskbandit
