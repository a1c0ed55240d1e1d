#pragma once

// Spatiotemporal grip-force features: fixed-window average amplitudes (AmV),
// per-session variability and task timing.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <vector>

#include "gripforge/error.hpp"
#include "gripforge/session.hpp"

namespace gripforge {

inline constexpr std::uint32_t kDefaultWindowMs = 2000;

// One sensor's tensions on the 20 ms grid. Missing grid points are gaps.
struct SensorSeries {
    SensorId sensor{1};
    std::uint32_t start_ms = 0;  // session start
    std::uint32_t end_ms = 0;    // session end (exclusive)
    std::vector<std::uint32_t> t_ms;
    std::vector<double> v_mv;

    [[nodiscard]] std::size_t size() const noexcept { return v_mv.size(); }
    [[nodiscard]] bool empty() const noexcept { return v_mv.empty(); }

    // Gap-free series starting at t = 0.
    static SensorSeries contiguous(SensorId sensor, std::span<const double> values) {
        SensorSeries s;
        s.sensor = sensor;
        s.v_mv.assign(values.begin(), values.end());
        s.t_ms.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            s.t_ms[i] = static_cast<std::uint32_t>(i) * kSamplePeriodMs;
        }
        s.end_ms = static_cast<std::uint32_t>(values.size()) * kSamplePeriodMs;
        return s;
    }
};

inline SensorSeries series_of(const Session& session, SensorId sensor) {
    SensorSeries s;
    s.sensor = sensor;
    s.start_ms = session.start_ms();
    s.end_ms = session.end_ms();
    for (const auto& sample : session.samples) {
        if (sample.sensor == sensor && sample.t_ms >= s.start_ms && sample.t_ms < s.end_ms) {
            s.t_ms.push_back(sample.t_ms);
            s.v_mv.push_back(sample.v_mv);
        }
    }
    return s;
}

struct AmvWindow {
    std::uint32_t start_ms;
    double amv_mv;
    std::size_t samples;
    bool has_gap;  // fewer samples than the window length implies
};

struct WindowedProfile {
    SensorId sensor{1};
    std::uint32_t window_ms = kDefaultWindowMs;
    std::vector<AmvWindow> windows;
    std::size_t dropped_tail_samples = 0;

    // AmV values, skipping gap-flagged windows unless asked.
    [[nodiscard]] std::vector<double> values(bool include_gaps = false) const {
        std::vector<double> out;
        for (const auto& w : windows) {
            if (include_gaps || !w.has_gap) out.push_back(w.amv_mv);
        }
        return out;
    }
};

// Disjoint fixed windows from the session start. A full window's AmV is the
// sum of its samples divided by the samples-per-window count (100 at
// 2000 ms); an incomplete trailing window is dropped and counted.
inline WindowedProfile window_amv(const SensorSeries& series,
                                  std::uint32_t window_ms = kDefaultWindowMs) {
    if (series.empty()) throw DomainError(series.sensor.name() + ": empty series");
    if (window_ms == 0 || window_ms % kSamplePeriodMs != 0) {
        throw DomainError("window length must be a positive multiple of 20 ms");
    }
    WindowedProfile profile;
    profile.sensor = series.sensor;
    profile.window_ms = window_ms;
    const std::size_t per_window = window_ms / kSamplePeriodMs;
    const std::uint32_t span_ms = series.end_ms > series.start_ms ? series.end_ms - series.start_ms : 0;
    const std::size_t full_windows = span_ms / window_ms;

    std::size_t i = 0;
    for (std::size_t w = 0; w < full_windows; ++w) {
        const std::uint32_t lo = series.start_ms + static_cast<std::uint32_t>(w) * window_ms;
        const std::uint32_t hi = lo + window_ms;
        double sum = 0.0;
        std::size_t count = 0;
        while (i < series.size() && series.t_ms[i] < hi) {
            if (series.t_ms[i] >= lo) {
                sum += series.v_mv[i];
                ++count;
            }
            ++i;
        }
        if (count == 0) {
            profile.windows.push_back({lo, 0.0, 0, true});
            continue;
        }
        const bool gap = count != per_window;
        const double amv = sum / static_cast<double>(gap ? count : per_window);
        profile.windows.push_back({lo, amv, count, gap});
    }
    profile.dropped_tail_samples = series.size() - i;
    return profile;
}

template <typename R>
concept NumericRange = std::ranges::forward_range<R> &&
                       std::convertible_to<std::ranges::range_value_t<R>, double>;

// Population standard deviation, sqrt(sum (x - mean)^2 / N).
template <NumericRange R>
double session_std(const R& values) {
    if (std::ranges::empty(values)) throw DomainError("standard deviation of empty series");
    double sum = 0.0;
    std::size_t n = 0;
    for (auto v : values) {
        sum += static_cast<double>(v);
        ++n;
    }
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (auto v : values) {
        const double d = static_cast<double>(v) - m;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n));
}

struct SessionStats {
    double mean;
    double std;  // population
    double min;
    double max;
    double sem;  // std / sqrt(n)
    std::size_t n;
};

template <NumericRange R>
SessionStats descriptive(const R& values) {
    if (std::ranges::empty(values)) throw DomainError("statistics of empty series");
    SessionStats s{};
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (auto v : values) {
        const double x = static_cast<double>(v);
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
        ++s.n;
    }
    s.mean = std::clamp(sum / static_cast<double>(s.n), s.min, s.max);
    s.std = session_std(values);
    s.sem = s.std / std::sqrt(static_cast<double>(s.n));
    return s;
}

enum class VariabilityMode { per_sensor, pooled };

struct VariabilityPoint {
    std::string session;  // Session::key()
    int index;
    std::optional<SensorId> sensor;  // empty for pooled rows
    double std_mv;
};

struct VariabilityCurve {
    std::vector<VariabilityPoint> points;
    std::vector<std::string> warnings;
};

// Per-session STD ordered by session index. Pooled mode reports the mean of
// the per-sensor STDs of the filtered sensors.
inline VariabilityCurve variability_curve(std::span<const Session> sessions,
                                          std::span<const SensorId> filter,
                                          VariabilityMode mode = VariabilityMode::pooled) {
    if (sessions.empty()) throw DomainError("variability curve needs at least one session");
    VariabilityCurve curve;
    std::vector<SensorId> sensors;
    for (auto s : filter) {
        if (s.excluded()) {
            curve.warnings.push_back(s.name() + " is excluded from analysis (too little output); ignored");
        } else {
            sensors.push_back(s);
        }
    }
    if (sensors.empty()) throw DomainError("no analysis-eligible sensors in filter");

    std::vector<const Session*> ordered;
    for (const auto& s : sessions) ordered.push_back(&s);
    std::ranges::stable_sort(ordered, {}, [](const Session* s) { return s->index; });

    for (const Session* session : ordered) {
        double pooled = 0.0;
        for (auto sensor : sensors) {
            auto series = series_of(*session, sensor);
            if (series.empty()) {
                throw DataError(session->key() + ": no samples for " + sensor.name());
            }
            double sd = session_std(series.v_mv);
            pooled += sd;
            if (mode == VariabilityMode::per_sensor) {
                curve.points.push_back({session->key(), session->index, sensor, sd});
            }
        }
        if (mode == VariabilityMode::pooled) {
            curve.points.push_back({session->key(), session->index, std::nullopt,
                                    pooled / static_cast<double>(sensors.size())});
        }
    }
    return curve;
}

struct TaskMetrics {
    double duration_s;
    std::size_t incidents;
    std::array<std::optional<double>, 4> step_s;  // steps 1..4
};

inline TaskMetrics task_metrics(const Session& session) {
    if (!session.time_of(Event::start) || !session.time_of(Event::end)) {
        throw DataError(session.key() + ": task metrics need start and end annotations");
    }
    TaskMetrics m{};
    m.duration_s = session.duration_s();
    m.incidents = session.count(Event::incident);
    constexpr std::array steps{Event::step1, Event::step2, Event::step3, Event::step4};
    const auto end = session.end_ms();
    for (std::size_t k = 0; k < steps.size(); ++k) {
        auto begin = session.time_of(steps[k]);
        if (!begin) continue;
        std::uint32_t until = end;
        for (std::size_t j = k + 1; j < steps.size(); ++j) {
            if (auto next = session.time_of(steps[j])) {
                until = *next;
                break;
            }
        }
        m.step_s[k] = (until - *begin) / 1000.0;
    }
    return m;
}

}  // namespace gripforge
