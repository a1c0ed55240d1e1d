#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "gripforge/profiling.hpp"
#include "gripforge/simulator.hpp"

using namespace gripforge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Session constant_session(int index, std::uint16_t v, std::size_t n, std::vector<SensorId> sensors = analysis_sensors()) {
    Session s;
    s.user = "flat";
    s.index = index;
    s.annotations = {{0, Event::start}, {static_cast<std::uint32_t>(n * 20), Event::end}};
    for (std::size_t i = 0; i < n; ++i) {
        for (auto id : sensors) s.samples.push_back({Glove::left, id, static_cast<std::uint32_t>(i * 20), v});
    }
    return s;
}

}  // namespace

TEST_CASE("AmV windows", "[profiling]") {
    std::vector<double> flat(100, 500.0);
    auto p = window_amv(SensorSeries::contiguous(SensorId(5), flat));
    REQUIRE(p.windows.size() == 1);
    REQUIRE(p.windows[0].amv_mv == 500.0);

    std::vector<double> ramp(100);
    std::iota(ramp.begin(), ramp.end(), 1.0);
    p = window_amv(SensorSeries::contiguous(SensorId(5), ramp));
    REQUIRE(p.windows[0].amv_mv == 50.5);

    std::vector<double> v250(250, 1.0);
    p = window_amv(SensorSeries::contiguous(SensorId(5), v250));
    REQUIRE(p.windows.size() == 2);
    REQUIRE(p.dropped_tail_samples == 50);
    REQUIRE(p.windows[1].start_ms == 2000u);

    REQUIRE_THROWS_AS(window_amv(SensorSeries::contiguous(SensorId(5), {})), DomainError);
    REQUIRE_THROWS_AS(window_amv(SensorSeries::contiguous(SensorId(5), flat), 30), DomainError);

    // 10.2 s session -> five full windows
    auto s = sim::simulate_session(sim::expert_profile(), {}, 1);
    REQUIRE(window_amv(series_of(s, SensorId(6))).windows.size() == 5);
}

TEST_CASE("AmV gap windows are flagged", "[profiling]") {
    auto s = constant_session(1, 300, 250);
    std::erase_if(s.samples, [](const Sample& x) { return x.t_ms == 2400; });
    s.annotations.insert(s.annotations.begin() + 1, {2400, Event::gap});
    auto p = window_amv(series_of(s, SensorId(5)));
    REQUIRE(p.windows.size() == 2);
    REQUIRE_FALSE(p.windows[0].has_gap);
    REQUIRE(p.windows[1].has_gap);
    REQUIRE(p.windows[1].samples == 99);
    REQUIRE(p.windows[1].amv_mv == 300.0);
    REQUIRE(p.values().size() == 1);
    REQUIRE(p.values(true).size() == 2);
}

TEST_CASE("AmV averaging is linear", "[profiling]") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> v(0, 3300);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(100 * (1 + trial % 7) + trial % 100);
        for (auto& e : x) e = v(rng);
        auto p = window_amv(SensorSeries::contiguous(SensorId(2), x));
        const std::size_t covered = p.windows.size() * 100;
        double amv_mean = 0.0;
        for (const auto& w : p.windows) amv_mean += w.amv_mv;
        amv_mean /= static_cast<double>(p.windows.size());
        const double direct = std::accumulate(x.begin(), x.begin() + static_cast<long>(covered), 0.0) / static_cast<double>(covered);
        REQUIRE_THAT(amv_mean, WithinRel(direct, 1e-12));
        const auto d = descriptive(x);
        for (const auto& w : p.windows) {
            REQUIRE(w.amv_mv >= d.min);
            REQUIRE(w.amv_mv <= d.max);
        }
    }
}

TEST_CASE("population STD and descriptive statistics", "[profiling]") {
    REQUIRE(session_std(std::vector{7.0, 7.0, 7.0}) == 0.0);
    REQUIRE_THAT(session_std(std::vector{1.0, 2.0, 3.0}), WithinAbs(0.816496580927726, 1e-12));
    REQUIRE_THROWS_AS(session_std(std::vector<double>{}), DomainError);

    auto one = descriptive(std::vector{5.0});
    REQUIRE(one.min == 5.0);
    REQUIRE(one.max == 5.0);
    REQUIRE(one.mean == 5.0);
    REQUIRE(one.std == 0.0);
    REQUIRE(one.sem == 0.0);

    auto two = descriptive(std::vector{0.0, 10.0});
    REQUIRE(two.mean == 5.0);
    REQUIRE(two.std == 5.0);
    REQUIRE_THAT(two.sem, WithinAbs(5.0 / std::sqrt(2.0), 1e-12));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(100.0, 30.0);
    std::vector<double> x(200);
    for (auto& e : x) e = g(rng);
    const auto base = descriptive(x);
    std::ranges::shuffle(x, rng);
    const auto shuffled = descriptive(x);
    REQUIRE(shuffled.min == base.min);
    REQUIRE(shuffled.max == base.max);
    REQUIRE_THAT(shuffled.mean, WithinRel(base.mean, 1e-12));
    REQUIRE_THAT(shuffled.std, WithinRel(base.std, 1e-12));

    std::vector<double> scaled(x);
    for (auto& e : scaled) e *= -3.0;
    REQUIRE_THAT(session_std(scaled), WithinRel(3.0 * session_std(x), 1e-12));

    std::vector<int> ints{1, 2, 3};
    REQUIRE_THAT(session_std(ints), WithinAbs(0.816496580927726, 1e-12));
}

TEST_CASE("variability curve", "[profiling]") {
    std::vector<Session> flat;
    for (int k = 3; k >= 1; --k) flat.push_back(constant_session(k, 200, 120));
    const auto all = analysis_sensors();
    auto c = variability_curve(flat, all, VariabilityMode::pooled);
    REQUIRE(c.points.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(c.points[i].index == static_cast<int>(i + 1));
        REQUIRE(c.points[i].std_mv == 0.0);
    }
    c = variability_curve(flat, all, VariabilityMode::per_sensor);
    REQUIRE(c.points.size() == 30);

    const std::vector<SensorId> with_excluded{SensorId(1), SensorId(5), SensorId(4)};
    c = variability_curve(flat, with_excluded, VariabilityMode::per_sensor);
    REQUIRE(c.warnings.size() == 2);
    REQUIRE(c.points.size() == 3);

    const std::vector<SensorId> only_excluded{SensorId(1)};
    REQUIRE_THROWS_AS(variability_curve(flat, only_excluded), DomainError);

    // pooled = mean of the per-sensor values
    std::vector<Session> one{sim::simulate_session(sim::novice_profile(), {}, 2)};
    auto per = variability_curve(one, all, VariabilityMode::per_sensor);
    double sum = 0.0;
    for (const auto& pt : per.points) sum += pt.std_mv;
    auto pooled = variability_curve(one, all, VariabilityMode::pooled);
    REQUIRE_THAT(pooled.points[0].std_mv, WithinRel(sum / 10.0, 1e-12));
}

TEST_CASE("variability separates simulated skill levels", "[profiling]") {
    const auto cohort = sim::simulate_cohort(sim::expert_profile(), sim::novice_profile(), {});
    std::vector<Session> expert, novice;
    for (const auto& s : cohort) {
        if (s.hand != Hand::dominant) continue;
        (s.user == "expert" ? expert : novice).push_back(s);
    }
    const auto all = analysis_sensors();
    auto e = variability_curve(expert, all);
    auto n = variability_curve(novice, all);
    REQUIRE(e.points.size() == 10);
    int wins = 0;
    for (std::size_t i = 0; i < 10; ++i) wins += n.points[i].std_mv > e.points[i].std_mv;
    REQUIRE(wins >= 9);
}

TEST_CASE("task metrics", "[profiling]") {
    Session s = constant_session(1, 10, 500, {SensorId(5)});
    s.annotations = {{0, Event::start},    {0, Event::step1},    {4000, Event::step2},
                     {6000, Event::step3}, {8000, Event::step4}, {10000, Event::end}};
    auto m = task_metrics(s);
    REQUIRE(m.duration_s == 10.0);
    REQUIRE(m.incidents == 0);
    REQUIRE(m.step_s[0] == 4.0);
    REQUIRE(m.step_s[3] == 2.0);

    Session bare = s;
    bare.annotations = {{0, Event::start}};
    REQUIRE_THROWS_AS(task_metrics(bare), DataError);

    // simulated expert first sessions average 10.20 s across hands
    double total = 0.0;
    for (Hand h : {Hand::dominant, Hand::non_dominant}) {
        total += task_metrics(sim::simulate_session(sim::expert_profile(), {}, 1, h)).duration_s;
    }
    REQUIRE_THAT(total / 2.0, WithinAbs(10.20, 0.02));
}
