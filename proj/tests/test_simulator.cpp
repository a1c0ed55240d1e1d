#include <catch_amalgamated.hpp>

#include <boost/math/distributions/normal.hpp>
#include <set>
#include <sstream>

#include "gripforge/simulator.hpp"

using namespace gripforge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double sensor_mean(const Session& s, SensorId id) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& x : s.samples) {
        if (x.sensor == id) {
            sum += x.v_mv;
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

std::size_t sensor_count(const Session& s, SensorId id) {
    return static_cast<std::size_t>(std::ranges::count(s.samples, id, &Sample::sensor));
}

// E[min(max(X,0),C)] for X ~ N(m, s^2), written out from the normal CDF/PDF.
double clipped_mean_oracle(double m, double s, double c) {
    boost::math::normal n;
    const double a = -m / s, b = (c - m) / s;
    using boost::math::cdf;
    using boost::math::pdf;
    return m * (cdf(n, b) - cdf(n, a)) + s * (pdf(n, a) - pdf(n, b)) + c * (1.0 - cdf(n, b));
}

}  // namespace

TEST_CASE("profile interpolation endpoints", "[sim]") {
    const auto expert = sim::expert_profile();
    auto t1 = sim::interpolate_profile(expert, 1)[4];
    REQUIRE(t1.mean == 241.0);
    REQUIRE(t1.sem == 4.3);
    auto t10 = sim::interpolate_profile(expert, 10)[4];
    REQUIRE(t10.mean == 78.0);
    REQUIRE(t10.sem == 4.9);
    // 241 + 3/9 * (78 - 241)
    REQUIRE_THAT(sim::interpolate_profile(expert, 4)[4].mean, WithinAbs(186.666666667, 1e-8));
    REQUIRE_THROWS_AS(sim::interpolate_profile(expert, 0), DomainError);
    REQUIRE_THROWS_AS(sim::interpolate_profile(expert, 11), DomainError);

    for (int k = 1; k < 10; ++k) {
        REQUIRE(sim::interpolate_profile(expert, k + 1)[4].mean < sim::interpolate_profile(expert, k)[4].mean);
        REQUIRE(sim::interpolate_profile(expert, k + 1)[6].mean >= sim::interpolate_profile(expert, k)[6].mean);
    }
    REQUIRE(sim::session_duration_s(expert, 1) == 10.20);
    REQUIRE(sim::session_duration_s(expert, 10) == 7.48);
    REQUIRE(sim::session_duration_s(sim::novice_profile(), 1) == 24.56);
    REQUIRE(sim::session_duration_s(sim::novice_profile(), 10) == 18.78);

    const auto novice = sim::novice_profile();
    REQUIRE(novice.target(SensorId(5)) == sim::SensorTarget{790, 2.7, 640, 3.6});
    REQUIRE(novice.target(SensorId(6)) == sim::SensorTarget{504, 2.4, 445, 3.3});
    REQUIRE(novice.target(SensorId(7)) == sim::SensorTarget{98, 1.2, 78, 1.6});
    REQUIRE(expert.target(SensorId(6)) == sim::SensorTarget{576, 3.8, 474, 4.5});
    REQUIRE(expert.target(SensorId(7)) == sim::SensorTarget{594, 1.8, 609, 2.2});
}

TEST_CASE("clipped normal location matching", "[sim]") {
    for (double m : {-50.0, 0.0, 4.0, 120.0, 1650.0, 3250.0}) {
        for (double s : {1.0, 40.0, 250.0}) {
            REQUIRE_THAT(sim::clipped_normal_mean(m, s), WithinAbs(clipped_mean_oracle(m, s, 3300.0), 1e-9));
        }
    }
    for (double target : {3.0, 4.0, 78.0, 790.0, 3290.0}) {
        const double loc = sim::clipped_normal_location(target, 100.0);
        REQUIRE_THAT(clipped_mean_oracle(loc, 100.0, 3300.0), WithinAbs(target, 1e-7));
    }
}

TEST_CASE("session shape and determinism", "[sim]") {
    const sim::GeneratorConfig cfg;
    const auto a = sim::simulate_session(sim::expert_profile(), cfg, 1);
    const auto b = sim::simulate_session(sim::expert_profile(), cfg, 1);
    REQUIRE(a == b);
    REQUIRE(a.duration_s() == 10.2);
    for (auto id : all_sensors()) REQUIRE(sensor_count(a, id) == 510);
    for (const auto& x : a.samples) REQUIRE(x.t_ms % 20 == 0);
    REQUIRE(a.samples.front().glove == Glove::left);
    a.validate();

    sim::GeneratorConfig other = cfg;
    other.seed = 2;
    REQUIRE_FALSE(sim::simulate_session(sim::expert_profile(), other, 1) == a);

    const auto nd = sim::simulate_session(sim::expert_profile(), cfg, 1, Hand::non_dominant);
    REQUIRE(nd.samples.front().glove == Glove::right);

    // step annotations at cumulative fractions (.30,.25,.25,.20) of 10 200 ms
    REQUIRE(a.time_of(Event::step1) == 0u);
    REQUIRE(a.time_of(Event::step2) == 3060u);
    REQUIRE(a.time_of(Event::step3) == 5610u);
    REQUIRE(a.time_of(Event::step4) == 8160u);
}

TEST_CASE("generated means track targets", "[sim]") {
    // novice S7, session 1: target 98 mV, sigma = 1.2 * sqrt(1228) so sigma/sqrt(n) = 1.2
    const auto s = sim::simulate_session(sim::novice_profile(), {}, 1);
    REQUIRE(sensor_count(s, SensorId(7)) == 1228);
    REQUIRE_THAT(sensor_mean(s, SensorId(7)), WithinAbs(98.0, 4 * 1.2));

    int inside = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        sim::GeneratorConfig cfg;
        cfg.seed = seed;
        const auto e = sim::simulate_session(sim::expert_profile(), cfg, 1);
        const double tol = 4.0 * 4.3;  // 4 sigma / sqrt(n) with sigma = sem * sqrt(n)
        inside += std::fabs(sensor_mean(e, SensorId(5)) - 241.0) < tol;
    }
    REQUIRE(inside >= 99);
}

TEST_CASE("cohort structure and incidents", "[sim]") {
    const auto cohort = sim::simulate_cohort(sim::expert_profile(), sim::novice_profile(), {});
    REQUIRE(cohort.size() == 40);
    std::size_t expert_incidents = 0;
    for (const auto& s : cohort) {
        if (s.user != "expert") continue;
        const bool scheduled = s.hand == Hand::non_dominant && s.index >= 8;
        REQUIRE(s.count(Event::incident) == (scheduled ? 1u : 0u));
        expert_incidents += s.count(Event::incident);
    }
    REQUIRE(expert_incidents == 3);

    double total = 0.0;
    const int seeds = 200;
    for (int seed = 1; seed <= seeds; ++seed) {
        sim::GeneratorConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.sensors = {SensorId(5)};
        for (const auto& s : sim::simulate_cohort(sim::expert_profile(), sim::novice_profile(), cfg)) {
            if (s.user == "novice") total += static_cast<double>(s.count(Event::incident));
        }
    }
    // Poisson(20) per cohort: standard error of the mean over 200 cohorts is ~0.32
    REQUIRE_THAT(total / seeds, WithinAbs(20.0, 1.3));

    sim::GeneratorConfig three;
    three.sessions = 3;
    REQUIRE(sim::simulate_cohort(sim::expert_profile(), sim::novice_profile(), three).size() == 12);
}

TEST_CASE("non-dominant spread grows with session", "[sim]") {
    auto sd = [](const Session& s, SensorId id) {
        double m = sensor_mean(s, id), ss = 0.0;
        std::size_t n = 0;
        for (const auto& x : s.samples) {
            if (x.sensor == id) {
                ss += (x.v_mv - m) * (x.v_mv - m);
                ++n;
            }
        }
        return std::sqrt(ss / static_cast<double>(n));
    };
    const auto p = sim::expert_profile();
    // factor 1 + 0.05 * 9 over the dominant hand in session 10
    const auto dom = sim::simulate_session(p, {}, 10, Hand::dominant);
    const auto nd = sim::simulate_session(p, {}, 10, Hand::non_dominant);
    REQUIRE_THAT(sd(nd, SensorId(10)) / sd(dom, SensorId(10)), WithinAbs(1.45, 0.12));
    const auto nd1 = sim::simulate_session(p, {}, 1, Hand::non_dominant);
    const auto dom1 = sim::simulate_session(p, {}, 1, Hand::dominant);
    REQUIRE_THAT(sd(nd1, SensorId(10)) / sd(dom1, SensorId(10)), WithinAbs(1.0, 0.1));
}

TEST_CASE("profile files", "[sim]") {
    for (const auto& p : {sim::expert_profile(), sim::novice_profile()}) {
        std::stringstream io;
        sim::write_profile(io, p);
        REQUIRE(sim::read_profile(io) == p);
    }
    std::istringstream bad("# gripforge-profile v1\nlabel = x\nwhat = 1\n");
    try {
        sim::read_profile(bad);
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line() == 3);
    }
    auto p = sim::expert_profile();
    p.steps_first = {0.5, 0.5, 0.5, 0.5};
    REQUIRE_THROWS_AS(p.validate(), DataError);
    p = sim::expert_profile();
    p.target(SensorId(5)).mean_first = 3400;
    REQUIRE_THROWS_AS(p.validate(), DataError);
    p = sim::expert_profile();
    p.label = "bad_label";
    REQUIRE_THROWS_AS(p.validate(), DataError);
}

TEST_CASE("session seeds are distinct", "[sim]") {
    std::set<std::uint64_t> seen;
    for (const char* user : {"expert", "novice"}) {
        for (Hand h : {Hand::dominant, Hand::non_dominant}) {
            for (int k = 1; k <= 10; ++k) seen.insert(sim::session_seed(1, user, h, k));
        }
    }
    REQUIRE(seen.size() == 40);
}
