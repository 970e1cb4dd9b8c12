#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riskbandit/env.hpp"
#include "riskbandit/policies.hpp"
#include "riskbandit/risk.hpp"

namespace riskbandit {

// Per-algorithm tuning overrides; unset fields fall back to the instance
// shape defaults when the run starts.
struct AlgorithmSpec {
    PolicyKind kind = PolicyKind::RiskLcb;
    std::optional<double> beta;  // explicit forced-exploration rate
    bool beta_auto = true;       // sqrt(A K_T / T) for detector policies
    bool beta_decaying = false;  // sqrt(A / t) schedule
    std::optional<double> delta;
    std::optional<double> bonus_scale;
    std::optional<double> gamma;
    std::optional<long> tau;
    std::optional<long> n0;
    std::optional<double> s0;
    std::optional<double> sigma;
    std::optional<double> L;
    std::optional<std::size_t> cap;
    std::optional<bool> detector;
};

struct EnvironmentSpec {
    bool synthetic = true;
    GenParams gen;
    std::string file;  // instance CSV when synthetic == false
};

struct ExperimentConfig {
    EnvironmentSpec environment;
    RiskMeasureSpec measure;  // cvar(0.45) unless configured
    long replications = 60;
    std::uint64_t base_seed = 1;
    std::string output_dir = "out";
    double bonus_scale = 1.0;  // run-wide default, overridable per algorithm
    std::vector<AlgorithmSpec> algorithms;

    void validate() const;
};

// Flat key/value text format with [sections]; see the annotated example in
// the repository. Errors carry "<source>:<line>:".
ExperimentConfig parse_config_text(const std::string& text, const std::string& source);
ExperimentConfig parse_config(const std::string& path);

// Materialize a runnable PolicyConfig for one algorithm against an instance
// shape: unset tunings get their closed-form defaults.
PolicyConfig resolve_policy_config(const AlgorithmSpec& algo, const ExperimentConfig& cfg,
                                   long A, long T, long K_T);

}  // namespace riskbandit
