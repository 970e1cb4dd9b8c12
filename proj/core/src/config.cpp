#include "riskbandit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace riskbandit {

void ExperimentConfig::validate() const {
    measure.validate();
    if (algorithms.empty()) throw std::domain_error("config needs at least one algorithm");
    if (replications < 1) throw std::domain_error("replications must be >= 1");
    if (!(bonus_scale > 0.0)) throw std::domain_error("bonus_scale must be > 0");
    for (std::size_t i = 0; i < algorithms.size(); ++i)
        for (std::size_t j = i + 1; j < algorithms.size(); ++j)
            if (algorithms[i].kind == algorithms[j].kind)
                throw std::domain_error("duplicate algorithm: " +
                                        policy_name(algorithms[i].kind));
    if (environment.synthetic) {
        const auto& g = environment.gen;
        if (g.A < 2) throw std::domain_error("environment needs A >= 2");
        if (g.T < 1) throw std::domain_error("environment needs T >= 1");
    } else if (environment.file.empty()) {
        throw std::domain_error("environment kind=file needs a file path");
    }
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

struct Parser {
    std::string source;
    long line = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error(source + ":" + std::to_string(line) + ": " + what);
    }

    long to_long(const std::string& v) const {
        long out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size()) fail("expected an integer, got '" + v + "'");
        return out;
    }

    std::uint64_t to_u64(const std::string& v) const {
        std::uint64_t out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size())
            fail("expected a non-negative integer, got '" + v + "'");
        return out;
    }

    double to_double(const std::string& v) const {
        double out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || p != v.data() + v.size()) fail("expected a number, got '" + v + "'");
        return out;
    }

    bool to_bool(const std::string& v) const {
        if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "off" || v == "0" || v == "no") return false;
        fail("expected a boolean, got '" + v + "'");
    }
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
    ExperimentConfig cfg;
    Parser p{source};

    enum class Section { None, Environment, Measure, Run, Algorithm };
    Section section = Section::None;
    AlgorithmSpec* algo = nullptr;
    bool measure_level_set = false;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::size_t hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "environment") {
                section = Section::Environment;
            } else if (name == "measure") {
                section = Section::Measure;
            } else if (name == "run") {
                section = Section::Run;
            } else if (name.rfind("algorithm", 0) == 0) {
                const std::string algo_name = trim(name.substr(9));
                const auto kind = parse_policy_name(algo_name);
                if (!kind) p.fail("unknown algorithm '" + algo_name + "'");
                cfg.algorithms.push_back(AlgorithmSpec{});
                algo = &cfg.algorithms.back();
                algo->kind = *kind;
                section = Section::Algorithm;
            } else {
                p.fail("unknown section '" + name + "'");
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) p.fail("expected 'key = value'");

        switch (section) {
            case Section::None:
                p.fail("key outside any [section]");
            case Section::Environment: {
                auto& env = cfg.environment;
                if (key == "kind") {
                    if (value == "synthetic") env.synthetic = true;
                    else if (value == "file") env.synthetic = false;
                    else p.fail("environment kind must be 'synthetic' or 'file'");
                } else if (key == "A") env.gen.A = p.to_long(value);
                else if (key == "T") env.gen.T = p.to_long(value);
                else if (key == "K") env.gen.K = p.to_long(value);
                else if (key == "lambda") env.gen.lambda = p.to_double(value);
                else if (key == "min_seg") env.gen.min_seg = p.to_long(value);
                else if (key == "global") env.gen.global_switch = p.to_bool(value);
                else if (key == "file") env.file = value;
                else p.fail("unknown environment key '" + key + "'");
                break;
            }
            case Section::Measure: {
                if (key == "kind") {
                    if (value == "cvar") cfg.measure.kind = RiskKind::CVaR;
                    else if (value == "mean_variance") cfg.measure.kind = RiskKind::MeanVariance;
                    else p.fail("measure kind must be 'cvar' or 'mean_variance'");
                } else if (key == "level") {
                    cfg.measure.level = p.to_double(value);
                    measure_level_set = true;
                } else {
                    p.fail("unknown measure key '" + key + "'");
                }
                break;
            }
            case Section::Run: {
                if (key == "replications") cfg.replications = p.to_long(value);
                else if (key == "base_seed") cfg.base_seed = p.to_u64(value);
                else if (key == "output_dir") cfg.output_dir = value;
                else if (key == "bonus_scale") cfg.bonus_scale = p.to_double(value);
                else p.fail("unknown run key '" + key + "'");
                break;
            }
            case Section::Algorithm: {
                if (key == "beta") {
                    if (value == "auto") {
                        algo->beta_auto = true;
                        algo->beta_decaying = false;
                        algo->beta.reset();
                    } else if (value == "decaying") {
                        algo->beta_decaying = true;
                        algo->beta_auto = false;
                        algo->beta.reset();
                    } else {
                        algo->beta = p.to_double(value);
                        algo->beta_auto = false;
                        algo->beta_decaying = false;
                    }
                } else if (key == "delta") algo->delta = p.to_double(value);
                else if (key == "bonus_scale") algo->bonus_scale = p.to_double(value);
                else if (key == "gamma") algo->gamma = p.to_double(value);
                else if (key == "tau") algo->tau = p.to_long(value);
                else if (key == "n0") algo->n0 = p.to_long(value);
                else if (key == "s0") algo->s0 = p.to_double(value);
                else if (key == "sigma") algo->sigma = p.to_double(value);
                else if (key == "L") algo->L = p.to_double(value);
                else if (key == "cap") algo->cap = static_cast<std::size_t>(p.to_long(value));
                else if (key == "detector") algo->detector = p.to_bool(value);
                else p.fail("unknown algorithm key '" + key + "'");
                break;
            }
        }
    }
    if (cfg.measure.kind == RiskKind::MeanVariance && !measure_level_set)
        cfg.measure.level = 1.0;
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

PolicyConfig resolve_policy_config(const AlgorithmSpec& algo, const ExperimentConfig& cfg,
                                   long A, long T, long K_T) {
    PolicyConfig pc;
    pc.measure = cfg.measure;
    pc.bonus_scale = algo.bonus_scale.value_or(cfg.bonus_scale);
    if (algo.L) pc.L = *algo.L;
    if (algo.sigma) pc.sigma = *algo.sigma;
    if (algo.delta) pc.delta = *algo.delta;
    if (algo.n0) pc.n0 = *algo.n0;
    if (algo.s0) pc.s0 = *algo.s0;
    pc.detector_cap = algo.cap;
    if (algo.detector) pc.detector_enabled = *algo.detector;

    if (algo.beta_decaying) {
        pc.beta_mode = BetaMode::Decaying;
    } else if (algo.beta) {
        pc.beta = *algo.beta;
    } else {
        // Forced exploration feeds the per-arm detectors; plain index
        // policies and the oracle run without it unless configured.
        const bool detector_policy = algo.kind == PolicyKind::RbocpdRiskLcb ||
                                     algo.kind == PolicyKind::GlrRiskLcb;
        pc.beta = detector_policy ? default_beta(A, K_T, T) : 0.0;
    }

    pc.gamma_discount = algo.gamma.value_or(default_gamma(K_T, T));
    pc.tau_window = algo.tau.value_or(default_tau(K_T, T));
    pc.validate();
    return pc;
}

}  // namespace riskbandit
