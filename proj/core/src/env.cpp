#include "riskbandit/env.hpp"

#include <algorithm>
#include <limits>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "riskbandit/rng.hpp"

namespace riskbandit {

double SwitchingBanditInstance::mean_at(long arm, long t) const {
    if (arm < 0 || arm >= arms()) throw std::domain_error("arm index out of range");
    if (t < 1 || t > T) throw std::domain_error("time index out of range");
    const auto& segs = segments[static_cast<std::size_t>(arm)];
    // Binary search over segment starts.
    std::size_t lo = 0, hi = segs.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (segs[mid].start <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    return segs[lo].mean;
}

std::vector<ChangePoint> SwitchingBanditInstance::change_points() const {
    std::vector<ChangePoint> cps;
    for (long a = 0; a < arms(); ++a) {
        const auto& segs = segments[static_cast<std::size_t>(a)];
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].mean != segs[i - 1].mean) cps.push_back({segs[i].start, a});
    }
    std::sort(cps.begin(), cps.end(), [](const ChangePoint& x, const ChangePoint& y) {
        return x.t != y.t ? x.t < y.t : x.arm < y.arm;
    });
    return cps;
}

long SwitchingBanditInstance::total_changes() const {
    return static_cast<long>(change_points().size());
}

double SwitchingBanditInstance::min_change_gap() const {
    double gap = 1.0;
    bool any = false;
    for (const auto& segs : segments)
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].mean != segs[i - 1].mean) {
                gap = std::min(gap, std::abs(segs[i].mean - segs[i - 1].mean));
                any = true;
            }
    return any ? gap : 0.0;
}

void SwitchingBanditInstance::validate(std::optional<double> lambda) const {
    if (T < 1) throw std::domain_error("horizon must be >= 1");
    if (arms() < 2) throw std::domain_error("instance needs at least 2 arms");
    for (long a = 0; a < arms(); ++a) {
        const auto& segs = segments[static_cast<std::size_t>(a)];
        if (segs.empty()) throw std::domain_error("arm has no segments");
        if (segs.front().start != 1) throw std::domain_error("first segment must start at 1");
        if (segs.back().end != T) throw std::domain_error("last segment must end at T");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (segs[i].end < segs[i].start)
                throw std::domain_error("segment end before start");
            if (!(segs[i].mean >= 0.0 && segs[i].mean <= 1.0))
                throw std::domain_error("segment mean outside [0,1]");
            if (i > 0 && segs[i].start != segs[i - 1].end + 1)
                throw std::domain_error("segments must partition [1,T] with no gaps or overlaps");
            if (lambda && i > 0 && segs[i].mean != segs[i - 1].mean &&
                std::abs(segs[i].mean - segs[i - 1].mean) < *lambda - 1e-12)
                throw std::domain_error("mean jump below detectability threshold");
        }
    }
}

namespace {

// Uniform draw from a union of disjoint intervals, by inverse CDF on lengths.
double draw_from_union(std::mt19937_64& rng,
                       const std::vector<std::pair<double, double>>& intervals) {
    double total = 0.0;
    for (const auto& [lo, hi] : intervals) total += hi - lo;
    double u = draw_u01(rng) * total;
    for (const auto& [lo, hi] : intervals) {
        const double len = hi - lo;
        if (u <= len) return lo + u;
        u -= len;
    }
    return intervals.back().second;
}

// Next mean at distance >= lambda from `prev`; when `more_ahead`, the value is
// also kept inside [0,1-lambda] u [lambda,1] so further jumps stay feasible.
double draw_next_mean(std::mt19937_64& rng, double prev, double lambda, bool more_ahead) {
    std::vector<std::pair<double, double>> valid;
    auto add = [&](double lo, double hi) {
        if (more_ahead && lambda > 0.5) {
            // intersect with [0, 1-lambda] u [lambda, 1]
            if (lo < 1.0 - lambda) valid.emplace_back(lo, std::min(hi, 1.0 - lambda));
            if (hi > lambda) valid.emplace_back(std::max(lo, lambda), hi);
        } else if (hi > lo) {
            valid.emplace_back(lo, hi);
        }
    };
    if (prev - lambda > 0.0) add(0.0, prev - lambda);
    if (prev + lambda < 1.0) add(prev + lambda, 1.0);
    std::erase_if(valid, [](const auto& iv) { return iv.second <= iv.first; });
    if (valid.empty()) throw std::domain_error("no feasible mean at this detectability gap");
    return draw_from_union(rng, valid);
}

double draw_initial_mean(std::mt19937_64& rng, double lambda, bool will_change) {
    if (will_change && lambda > 0.5) {
        // keep the starting value where a lambda-jump is possible
        std::vector<std::pair<double, double>> valid{{0.0, 1.0 - lambda}, {lambda, 1.0}};
        return draw_from_union(rng, valid);
    }
    return draw_u01(rng);
}

}  // namespace

SwitchingBanditInstance generate_instance(const GenParams& params, std::uint64_t seed) {
    if (params.A < 2) throw std::domain_error("need at least 2 arms");
    if (params.T < 1) throw std::domain_error("horizon must be >= 1");
    if (params.K < 0) throw std::domain_error("change count must be >= 0");
    if (!(params.lambda > 0.0 && params.lambda < 1.0))
        throw std::domain_error("lambda must be in (0,1)");
    long min_seg = params.min_seg;
    if (min_seg <= 0) min_seg = std::max<long>(1, params.T / (4 * (params.K + 1)));
    if (params.K * min_seg > params.T)
        throw std::domain_error("infeasible: K * min_seg exceeds the horizon");

    std::mt19937_64 rng(mix_seed(seed, fnv1a("instance")));

    // Place change points: times in (1, T], assigned to an arm (or all arms).
    // Rejection keeps per-arm gaps and boundary distances >= min_seg.
    std::vector<std::vector<long>> change_times(static_cast<std::size_t>(params.A));
    long placed = 0;
    long attempts = 0;
    const long max_attempts = 20000 * (params.K + 1);
    while (placed < params.K) {
        if (++attempts > max_attempts)
            throw std::domain_error("infeasible: could not place change points at this min_seg");
        const long t = 2 + static_cast<long>(draw_u01(rng) * static_cast<double>(params.T - 1));
        if (t < 2 || t > params.T) continue;
        const long arm = params.global_switch ? -1 : draw_index(rng, params.A);
        auto fits = [&](long a) {
            const auto& ts = change_times[static_cast<std::size_t>(a)];
            if (t - 1 < min_seg || params.T - t + 1 < min_seg) return false;
            for (long u : ts)
                if (std::abs(u - t) < min_seg) return false;
            return true;
        };
        bool ok = true;
        if (params.global_switch) {
            for (long a = 0; a < params.A && ok; ++a) ok = fits(a);
        } else {
            ok = fits(arm);
        }
        if (!ok) continue;
        if (params.global_switch) {
            for (long a = 0; a < params.A; ++a)
                change_times[static_cast<std::size_t>(a)].push_back(t);
        } else {
            change_times[static_cast<std::size_t>(arm)].push_back(t);
        }
        ++placed;
    }

    SwitchingBanditInstance inst;
    inst.T = params.T;
    inst.segments.resize(static_cast<std::size_t>(params.A));
    for (long a = 0; a < params.A; ++a) {
        auto& ts = change_times[static_cast<std::size_t>(a)];
        std::sort(ts.begin(), ts.end());
        auto& segs = inst.segments[static_cast<std::size_t>(a)];
        double mean = draw_initial_mean(rng, params.lambda, !ts.empty());
        long start = 1;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            segs.push_back({start, ts[k] - 1, mean});
            mean = draw_next_mean(rng, mean, params.lambda, k + 1 < ts.size());
            start = ts[k];
        }
        segs.push_back({start, params.T, mean});
    }
    inst.validate(params.lambda);
    return inst;
}

int sample_reward(const SwitchingBanditInstance& inst, long arm, long t,
                  std::mt19937_64& rng) {
    const double mu = inst.mean_at(arm, t);
    return draw_u01(rng) < mu ? 1 : 0;
}

int coupled_reward(std::uint64_t key, long arm, long t, double mean) {
    const std::uint64_t h = splitmix64(
        splitmix64(key + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(arm + 1)) ^
        static_cast<std::uint64_t>(t));
    return u01_from_bits(splitmix64(h)) < mean ? 1 : 0;
}

double true_risk(const SwitchingBanditInstance& inst, long arm, long t,
                 const RiskMeasureSpec& measure) {
    return bernoulli_risk(measure, 1.0 - inst.mean_at(arm, t));
}

RegretTrace rho_regret(const ActionTrace& trace, const SwitchingBanditInstance& inst,
                       const RiskMeasureSpec& measure) {
    if (trace.horizon() != inst.T)
        throw std::domain_error("trace length does not match the instance horizon");
    measure.validate();

    // Risks are piecewise constant; evaluate once per (global segment, arm).
    std::vector<long> boundaries{1};
    for (const auto& segs : inst.segments)
        for (const auto& s : segs)
            if (s.start > 1) boundaries.push_back(s.start);
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());

    const long A = inst.arms();
    RegretTrace out;
    out.instantaneous.resize(static_cast<std::size_t>(inst.T));
    out.cumulative.resize(static_cast<std::size_t>(inst.T));
    double cum = 0.0;
    std::vector<double> risk(static_cast<std::size_t>(A));
    for (std::size_t b = 0; b < boundaries.size(); ++b) {
        const long lo = boundaries[b];
        const long hi = (b + 1 < boundaries.size()) ? boundaries[b + 1] - 1 : inst.T;
        double best = std::numeric_limits<double>::infinity();
        for (long a = 0; a < A; ++a) {
            risk[static_cast<std::size_t>(a)] = true_risk(inst, a, lo, measure);
            best = std::min(best, risk[static_cast<std::size_t>(a)]);
        }
        for (long t = lo; t <= hi; ++t) {
            const long a = trace.arm[static_cast<std::size_t>(t - 1)];
            if (a < 0 || a >= A) throw std::domain_error("trace references an invalid arm");
            const double r = risk[static_cast<std::size_t>(a)] - best;
            out.instantaneous[static_cast<std::size_t>(t - 1)] = r;
            cum += r;
            out.cumulative[static_cast<std::size_t>(t - 1)] = cum;
        }
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, long line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

SwitchingBanditInstance load_instance_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "arm,start,end,mean")
        parse_fail(path, lineno, "expected header 'arm,start,end,mean'");

    struct Row {
        long arm, start, end;
        double mean;
    };
    std::vector<Row> rows;
    long max_arm = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 4> fields;
        std::size_t field = 0, pos = 0;
        while (field < 4) {
            const std::size_t comma = line.find(',', pos);
            fields[field++] = line.substr(pos, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - pos);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (field != 4 || line.find(',', pos) != std::string::npos)
            parse_fail(path, lineno, "expected 4 comma-separated fields");
        Row r{};
        auto geti = [&](const std::string& s, const char* name) {
            long v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                parse_fail(path, lineno, std::string("bad integer in column '") + name + "'");
            return v;
        };
        r.arm = geti(fields[0], "arm");
        r.start = geti(fields[1], "start");
        r.end = geti(fields[2], "end");
        try {
            std::size_t used = 0;
            r.mean = std::stod(fields[3], &used);
            if (used != fields[3].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            parse_fail(path, lineno, "bad decimal in column 'mean'");
        }
        if (r.arm < 1) parse_fail(path, lineno, "arm ids are 1-based");
        if (!(r.mean >= 0.0 && r.mean <= 1.0))
            parse_fail(path, lineno, "mean outside [0,1]");
        max_arm = std::max(max_arm, r.arm);
        rows.push_back(r);
    }
    if (rows.empty()) parse_fail(path, lineno, "no segment rows");

    SwitchingBanditInstance inst;
    inst.segments.resize(static_cast<std::size_t>(max_arm));
    for (const Row& r : rows) {
        inst.segments[static_cast<std::size_t>(r.arm - 1)].push_back(
            {r.start, r.end, r.mean});
        inst.T = std::max(inst.T, r.end);
    }
    for (auto& segs : inst.segments)
        std::sort(segs.begin(), segs.end(),
                  [](const Segment& x, const Segment& y) { return x.start < y.start; });
    try {
        inst.validate();
    } catch (const std::domain_error& e) {
        throw std::runtime_error(path + ": invalid instance: " + e.what());
    }
    return inst;
}

void write_instance_csv(const SwitchingBanditInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << "arm,start,end,mean\n";
    for (long a = 0; a < inst.arms(); ++a)
        for (const Segment& s : inst.segments[static_cast<std::size_t>(a)])
            out << (a + 1) << ',' << s.start << ',' << s.end << ','
                << format_double(s.mean) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace riskbandit
