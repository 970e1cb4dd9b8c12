#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "riskbandit/cpd.hpp"
#include "riskbandit/rng.hpp"

using namespace riskbandit;

namespace {

std::vector<int> bernoulli_stream(std::mt19937_64& g, std::size_t n, double p) {
    std::vector<int> z(n);
    for (auto& b : z) b = draw_u01(g) < p ? 1 : 0;
    return z;
}

std::vector<int> step_stream(std::size_t n, std::size_t change, double p1, double p2,
                             std::mt19937_64& g) {
    std::vector<int> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = draw_u01(g) < (i < change ? p1 : p2) ? 1 : 0;
    return z;
}

// First detection time of the incremental bank over a whole stream.
std::optional<long> first_detection(const std::vector<int>& bits, double delta) {
    RbocpdBank bank(delta);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bank.step(bits[i]).restart) return static_cast<long>(i) + 1;
    return std::nullopt;
}

// ln of the Laplace marginal likelihood of bits[i..j], 1-based inclusive.
double segment_loglik(const std::vector<int>& bits, long i, long j) {
    double acc = 0.0;
    long n1 = 0, n0 = 0;
    for (long k = i; k <= j; ++k) {
        acc += std::log(laplace_predict(n1, n0, bits[static_cast<std::size_t>(k - 1)]));
        (bits[static_cast<std::size_t>(k - 1)] ? n1 : n0) += 1;
    }
    return acc;
}

}  // namespace

TEST_CASE("laplace predictor") {
    CHECK(laplace_predict(0, 0, 1) == doctest::Approx(0.5));
    CHECK(laplace_predict(3, 0, 1) == doctest::Approx(0.8));
    CHECK(laplace_predict(1, 1, 0) == doctest::Approx(0.5));
    for (long n1 : {0L, 2L, 17L})
        for (long n0 : {0L, 1L, 9L}) {
            const double p1 = laplace_predict(n1, n0, 1);
            const double p0 = laplace_predict(n1, n0, 0);
            CHECK(p1 + p0 == doctest::Approx(1.0));
            CHECK(p1 > 0.0);
            CHECK(p1 < 1.0);
        }
    CHECK_THROWS_AS(laplace_predict(-1, 0, 1), std::domain_error);
}

TEST_CASE("challenger prior schedule") {
    CHECK(eta_default(1, 1, 1, 0.05) == doctest::Approx(0.025));
    double prev = 1.0;
    for (long t = 1; t <= 200; ++t) {
        const double e = eta_default(1, 1, t, 0.05);
        CHECK(e > 0.0);
        CHECK(e < 1.0);
        CHECK(e < prev);
        prev = e;
    }
    CHECK(eta_default(1, 1, 10, 0.02) == doctest::Approx(2.0 * eta_default(1, 1, 10, 0.01)));
    CHECK_THROWS_AS(eta_default(2, 1, 3, 0.05), std::domain_error);
    CHECK_THROWS_AS(eta_default(1, 1, 1, 0.0), std::domain_error);
    // total challenger prior mass stays within the budget
    double mass = 0.0;
    for (long t = 1; t <= 100000; ++t) mass += eta_default(1, t, t, 0.05);
    CHECK(mass < 0.05);
}

TEST_CASE("bank initialization and first step") {
    RbocpdBank bank(0.05);
    CHECK(bank.time() == 0);
    CHECK(bank.candidate_count() == 0);
    auto report = bank.step(1);
    CHECK_FALSE(report.restart);
    CHECK(report.t == 1);
    CHECK(bank.candidate_count() == 1);
    CHECK_THROWS_AS(RbocpdBank(0.0), std::domain_error);
    CHECK_THROWS_AS(RbocpdBank(1.0), std::domain_error);
}

TEST_CASE("two banks fed the same bits have identical state") {
    std::mt19937_64 g(3);
    auto bits = bernoulli_stream(g, 120, 0.4);
    RbocpdBank a(0.05), b(0.05);
    for (int z : bits) {
        auto ra = a.step(z);
        auto rb = b.step(z);
        CHECK(ra.restart == rb.restart);
    }
    for (long s : a.candidate_starts()) CHECK(a.log_weight(s) == b.log_weight(s));
    // uncapped banks hold one candidate per step since the origin
    CHECK(a.candidate_count() == bits.size());
    for (double lw : {a.log_weight(1), a.log_weight(60), a.log_weight(120)})
        CHECK(std::isfinite(lw));
}

TEST_CASE("incremental weights match the closed-form definition") {
    std::mt19937_64 g(11);
    for (int rep = 0; rep < 20; ++rep) {
        auto bits = bernoulli_stream(g, 100, 0.3 + 0.4 * draw_u01(g));
        const double delta = 0.05;
        RbocpdBank bank(delta);
        for (std::size_t i = 0; i < bits.size(); ++i) {
            bank.step(bits[i]);
            const long t = static_cast<long>(i) + 1;
            for (long s : bank.candidate_starts()) {
                const double eta_part =
                    s == 1 ? 0.0 : std::log(eta_default(1, s, t, delta));
                const double want =
                    eta_part + segment_loglik(bits, 1, s - 1) + segment_loglik(bits, s, t);
                CHECK(bank.log_weight(s) == doctest::Approx(want).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("incremental and batch detectors agree exactly") {
    std::mt19937_64 g(2024);
    int streams = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 20 + static_cast<std::size_t>(draw_index(g, 281));
        std::vector<int> bits;
        if (rep % 3 == 0) {
            bits = bernoulli_stream(g, n, draw_u01(g));
        } else {
            const double p1 = draw_u01(g), p2 = draw_u01(g);
            bits = step_stream(n, n / 2, p1, p2, g);
        }
        for (double delta : {0.01, 0.05, 0.2}) {
            const auto batch = rbocpd_batch(bits, delta);
            const auto inc = [&]() -> std::optional<long> {
                RbocpdBank bank(delta);
                for (std::size_t i = 0; i < bits.size(); ++i)
                    if (bank.step(bits[i]).restart) return static_cast<long>(i) + 1;
                return std::nullopt;
            }();
            CHECK(batch.has_value() == inc.has_value());
            if (batch && inc) CHECK(*batch == *inc);
        }
        ++streams;
    }
    CHECK(streams == 200);
}

TEST_CASE("batch detector edge cases") {
    CHECK_FALSE(rbocpd_batch(std::vector<int>(50, 1), 0.05).has_value());
    CHECK_FALSE(rbocpd_batch(std::vector<int>{1}, 0.05).has_value());
    CHECK_THROWS_AS(rbocpd_batch(std::vector<int>{}, 0.05), std::domain_error);
}

TEST_CASE("a maximal jump is caught and matches the batch reference") {
    std::vector<int> bits(300, 0);
    for (std::size_t i = 150; i < 300; ++i) bits[i] = 1;
    const auto batch = rbocpd_batch(bits, 0.05);
    REQUIRE(batch.has_value());
    CHECK(*batch > 150);
    CHECK(*batch <= 300);
    const auto inc = first_detection(bits, 0.05);
    REQUIRE(inc.has_value());
    CHECK(*inc == *batch);
}

TEST_CASE("stationary streams rarely trigger a restart") {
    int alarms = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::mt19937_64 g(9000 + rep);
        auto bits = bernoulli_stream(g, 300, 0.5);
        alarms += first_detection(bits, 0.05).has_value();
    }
    CHECK(alarms <= 50);  // >= 95% of streams stay quiet
}

TEST_CASE("detection decisions are invariant under bit complement") {
    std::mt19937_64 g(321);
    for (int rep = 0; rep < 30; ++rep) {
        auto bits = step_stream(400, 200, draw_u01(g), draw_u01(g), g);
        auto flipped = bits;
        for (auto& b : flipped) b = 1 - b;
        CHECK(first_detection(bits, 0.05) == first_detection(flipped, 0.05));
    }
}

TEST_CASE("mean detection delay shrinks as the jump grows") {
    auto mean_delay = [&](double gap) {
        const double p1 = 0.5 - gap / 2, p2 = 0.5 + gap / 2;
        double total = 0.0;
        int detected = 0;
        for (int rep = 0; rep < 500; ++rep) {
            std::mt19937_64 g(31000 + rep);
            RbocpdBank bank(0.05);
            long fired = 0;
            for (long t = 1; t <= 2500 && fired == 0; ++t) {
                const int z = draw_u01(g) < (t <= 500 ? p1 : p2) ? 1 : 0;
                if (bank.step(z).restart && t > 500) fired = t;
            }
            if (fired > 0) {
                total += static_cast<double>(fired - 500);
                ++detected;
            }
        }
        REQUIRE(detected > 250);
        return total / detected;
    };
    const double d04 = mean_delay(0.4);
    const double d02 = mean_delay(0.2);
    CHECK(d04 < d02);
}

TEST_CASE("candidate cap keeps the bank small without losing a strong change") {
    std::vector<int> bits(600, 0);
    for (std::size_t i = 300; i < 600; ++i) bits[i] = 1;
    RbocpdBank bank(0.05, EtaSchedule{}, 64);
    std::optional<long> fired;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        CHECK(bank.candidate_count() <= 64);
        if (bank.step(bits[i]).restart && !fired) fired = static_cast<long>(i) + 1;
    }
    REQUIRE(fired.has_value());
    CHECK(*fired > 300);
    CHECK(*fired < 400);
}

TEST_CASE("trigger index is a challenger inside the stream") {
    std::vector<int> bits(200, 1);
    for (std::size_t i = 100; i < 200; ++i) bits[i] = 0;
    RbocpdBank bank(0.05);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        auto r = bank.step(bits[i]);
        if (r.restart) {
            REQUIRE(r.trigger_s.has_value());
            CHECK(*r.trigger_s > 1);
            CHECK(*r.trigger_s <= r.t);
            return;
        }
        CHECK_FALSE(r.trigger_s.has_value());
    }
    FAIL("expected a detection");
}

TEST_CASE("glr statistic and detector") {
    CHECK(bernoulli_kl(0.5, 0.5) == doctest::Approx(0.0));
    CHECK(bernoulli_kl(0.0, 0.5) == doctest::Approx(std::log(2.0)));
    CHECK(bernoulli_kl(1.0, 0.5) == doctest::Approx(std::log(2.0)));

    CHECK_FALSE(glr_detect(std::vector<int>(80, 1), 0.05).has_value());
    CHECK_FALSE(glr_detect(std::vector<int>{1}, 0.05).has_value());
    CHECK_THROWS_AS(glr_detect(std::vector<int>{}, 0.05), std::domain_error);

    std::vector<int> bits(200, 0);
    for (std::size_t i = 100; i < 200; ++i) bits[i] = 1;
    const auto t = glr_detect(bits, 0.05);
    REQUIRE(t.has_value());
    CHECK(*t > 100);
    CHECK(*t <= 200);

    GlrDetector det(0.05);
    for (int z : std::vector<int>(50, 1)) {
        det.step(z);
        CHECK(det.statistic() == doctest::Approx(0.0));
    }

    std::mt19937_64 g(55);
    GlrDetector det2(0.3);
    for (int rep = 0; rep < 300; ++rep) {
        det2.step(draw_u01(g) < 0.5 ? 1 : 0);
        CHECK(det2.statistic() >= 0.0);
    }
}

TEST_CASE("glr incremental wrapper matches its batch form") {
    std::mt19937_64 g(77);
    for (int rep = 0; rep < 30; ++rep) {
        auto bits = step_stream(250, 125, draw_u01(g), draw_u01(g), g);
        GlrDetector det(0.05);
        std::optional<long> inc;
        for (std::size_t i = 0; i < bits.size() && !inc; ++i)
            if (det.step(bits[i]).restart) inc = static_cast<long>(i) + 1;
        CHECK(inc == glr_detect(bits, 0.05));
    }
}
