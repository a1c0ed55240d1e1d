#pragma once

// Synthetic expert/novice sessions with controlled per-sensor statistics.
//
// Each sensor's tension is drawn i.i.d. per 20 ms sample from a normal
// distribution clipped to [0, 3300] mV. For a target session mean m with
// standard error s over n samples the per-sample spread is sigma = s * sqrt(n),
// and the location of the underlying normal is shifted so that the clipped
// distribution still has mean m.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "gripforge/error.hpp"
#include "gripforge/session.hpp"
#include "gripforge/text.hpp"

namespace gripforge::sim {

// Target first- and last-session statistics for one sensor.
struct SensorTarget {
    double mean_first = 0.0;
    double sem_first = 1.0;
    double mean_last = 0.0;
    double sem_last = 1.0;

    bool operator==(const SensorTarget&) const = default;
};

struct ScheduledIncident {
    Hand hand;
    int session;

    bool operator==(const ScheduledIncident&) const = default;
};

using StepFractions = std::array<double, 4>;

struct SkillProfile {
    std::string label;
    Glove dominant_glove = Glove::right;
    int schedule_sessions = 10;
    std::array<SensorTarget, kSensorCount> sensors{};  // S1..S12
    double duration_first_s = 10.0;
    double duration_last_s = 10.0;
    double incident_rate = 0.0;  // expected random incidents per session
    std::vector<ScheduledIncident> scheduled_incidents;
    StepFractions steps_first{0.25, 0.25, 0.25, 0.25};
    StepFractions steps_last{0.25, 0.25, 0.25, 0.25};

    bool operator==(const SkillProfile&) const = default;

    [[nodiscard]] const SensorTarget& target(SensorId s) const {
        return sensors[static_cast<std::size_t>(s.index() - 1)];
    }
    SensorTarget& target(SensorId s) { return sensors[static_cast<std::size_t>(s.index() - 1)]; }

    void validate() const {
        if (label.empty() || label.find_first_of(" \t,=_") != std::string::npos) {
            throw DataError("profile label must be a token without spaces, ',', '=' or '_'");
        }
        if (schedule_sessions < 1 || schedule_sessions > kMaxSessionIndex) {
            throw DataError("profile session count must be in [1,10]");
        }
        for (int i = 0; i < kSensorCount; ++i) {
            const auto& t = sensors[static_cast<std::size_t>(i)];
            for (double m : {t.mean_first, t.mean_last}) {
                if (!(m >= 0.0 && m <= kSupplyMillivolt)) {
                    throw DataError(label + ": S" + std::to_string(i + 1) + " mean outside [0,3300] mV");
                }
            }
            if (!(t.sem_first > 0.0) || !(t.sem_last > 0.0)) {
                throw DataError(label + ": S" + std::to_string(i + 1) + " SEM must be positive");
            }
        }
        if (!(duration_first_s > 0.0) || !(duration_last_s > 0.0)) {
            throw DataError(label + ": durations must be positive");
        }
        if (!(incident_rate >= 0.0)) throw DataError(label + ": incident rate must be non-negative");
        for (const auto& inc : scheduled_incidents) {
            if (inc.session < 1 || inc.session > schedule_sessions) {
                throw DataError(label + ": scheduled incident outside the session range");
            }
        }
        for (const auto* steps : {&steps_first, &steps_last}) {
            double sum = 0.0;
            for (double f : *steps) {
                if (!(f > 0.0)) throw DataError(label + ": step fractions must be positive");
                sum += f;
            }
            if (std::fabs(sum - 1.0) > 1e-9) throw DataError(label + ": step fractions must sum to 1");
        }
    }
};

enum class Interpolation { linear, geometric };

struct GeneratorConfig {
    std::uint64_t seed = 1;
    std::uint32_t period_ms = kSamplePeriodMs;
    int sessions = 10;
    std::vector<SensorId> sensors = all_sensors();
    double fatigue_growth = 0.05;      // non-dominant spread gain per session
    double incident_amplitude_mv = 0.0;
    std::uint32_t incident_span_ms = 1000;
    Interpolation interpolation = Interpolation::linear;

    void validate() const {
        if (period_ms != kSamplePeriodMs) throw DataError("sample period must be 20 ms");
        if (sessions < 1 || sessions > kMaxSessionIndex) throw DataError("sessions must be in [1,10]");
        if (sensors.empty()) throw DataError("no sensors to emit");
        if (!(fatigue_growth >= 0.0)) throw DataError("fatigue growth must be non-negative");
    }
};

namespace detail {

inline double interpolate(double first, double last, int k, int sessions, Interpolation mode) {
    if (sessions <= 1) return first;
    const double f = static_cast<double>(k - 1) / static_cast<double>(sessions - 1);
    if (mode == Interpolation::geometric && first > 0.0 && last > 0.0) {
        return first * std::pow(last / first, f);
    }
    return first * (1.0 - f) + last * f;
}

inline void check_index(const SkillProfile& p, int k) {
    if (k < 1 || k > p.schedule_sessions) {
        throw DomainError("session index " + std::to_string(k) + " outside [1," +
                          std::to_string(p.schedule_sessions) + "]");
    }
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// E[max(X, 0)] for X ~ N(m, sigma^2).
inline double positive_part_mean(double m, double sigma) {
    const double z = m / sigma;
    return m * normal_cdf(z) + sigma * normal_pdf(z);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Mean of N(location, sigma^2) clipped to [0, ceiling].
inline double clipped_normal_mean(double location, double sigma, double ceiling = kSupplyMillivolt) {
    if (sigma == 0.0) return std::clamp(location, 0.0, ceiling);
    return detail::positive_part_mean(location, sigma) -
           detail::positive_part_mean(location - ceiling, sigma);
}

// Location whose clipped normal has the requested mean.
inline double clipped_normal_location(double target_mean, double sigma,
                                      double ceiling = kSupplyMillivolt) {
    if (!(target_mean > 0.0 && target_mean < ceiling)) {
        return std::clamp(target_mean, 0.0, ceiling);
    }
    if (sigma == 0.0) return target_mean;
    double lo = -ceiling - 40.0 * sigma, hi = 2.0 * ceiling + 40.0 * sigma;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clipped_normal_mean(mid, sigma, ceiling) < target_mean ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct TargetStats {
    double mean;
    double sem;
};

// Per-sensor (mean, SEM) for session k, interpolated between the
// profile's first and last sessions.
inline std::array<TargetStats, kSensorCount> interpolate_profile(
    const SkillProfile& p, int k, Interpolation mode = Interpolation::linear) {
    detail::check_index(p, k);
    std::array<TargetStats, kSensorCount> out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& t = p.sensors[i];
        out[i] = {detail::interpolate(t.mean_first, t.mean_last, k, p.schedule_sessions, mode),
                  detail::interpolate(t.sem_first, t.sem_last, k, p.schedule_sessions, mode)};
    }
    return out;
}

inline double session_duration_s(const SkillProfile& p, int k, Interpolation mode = Interpolation::linear) {
    detail::check_index(p, k);
    return detail::interpolate(p.duration_first_s, p.duration_last_s, k, p.schedule_sessions, mode);
}

inline StepFractions step_fractions(const SkillProfile& p, int k) {
    detail::check_index(p, k);
    StepFractions f{};
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        f[j] = detail::interpolate(p.steps_first[j], p.steps_last[j], k, p.schedule_sessions,
                                   Interpolation::linear);
        sum += f[j];
    }
    for (auto& v : f) v /= sum;
    return f;
}

// Independent stream seed for one (user, hand, session).
inline std::uint64_t session_seed(std::uint64_t master, std::string_view user, Hand hand, int k) {
    std::uint64_t h = detail::splitmix64(master);
    h = detail::splitmix64(h ^ text::fnv1a(user));
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(hand == Hand::dominant ? 1 : 2));
    return detail::splitmix64(h ^ static_cast<std::uint64_t>(k));
}

inline Glove glove_for(const SkillProfile& p, Hand hand) {
    if (hand == Hand::dominant) return p.dominant_glove;
    return p.dominant_glove == Glove::left ? Glove::right : Glove::left;
}

inline std::size_t samples_per_sensor(double duration_s, std::uint32_t period_ms = kSamplePeriodMs) {
    const auto ms = static_cast<std::uint64_t>(std::llround(duration_s * 1000.0));
    return static_cast<std::size_t>(ms / period_ms);
}

inline Session simulate_session(const SkillProfile& profile, const GeneratorConfig& config,
                                int session_index, Hand hand = Hand::dominant) {
    profile.validate();
    config.validate();
    detail::check_index(profile, session_index);

    std::mt19937_64 rng(session_seed(config.seed, profile.label, hand, session_index));
    const auto targets = interpolate_profile(profile, session_index, config.interpolation);
    const double duration_s = session_duration_s(profile, session_index, config.interpolation);
    const std::size_t n = samples_per_sensor(duration_s, config.period_ms);
    if (n == 0) throw DataError("session shorter than one sample period");
    const auto end_ms = static_cast<std::uint32_t>(n) * config.period_ms;

    Session s;
    s.user = profile.label;
    s.hand = hand;
    s.index = session_index;

    // Task steps at the interpolated fractions of the session.
    const auto fractions = step_fractions(profile, session_index);
    s.annotations.push_back({0, Event::start});
    double cumulative = 0.0;
    constexpr std::array steps{Event::step1, Event::step2, Event::step3, Event::step4};
    for (std::size_t j = 0; j < steps.size(); ++j) {
        s.annotations.push_back({static_cast<std::uint32_t>(std::llround(cumulative * end_ms)), steps[j]});
        cumulative += fractions[j];
    }

    // Incidents: scheduled ones plus a Poisson number at the profile rate.
    std::size_t incidents = static_cast<std::size_t>(std::ranges::count_if(
        profile.scheduled_incidents,
        [&](const ScheduledIncident& i) { return i.hand == hand && i.session == session_index; }));
    if (profile.incident_rate > 0.0) {
        incidents += std::poisson_distribution<std::size_t>(profile.incident_rate)(rng);
    }
    std::vector<std::uint32_t> incident_times;
    std::uniform_int_distribution<std::uint32_t> when(0, static_cast<std::uint32_t>(n - 1));
    for (std::size_t i = 0; i < incidents; ++i) incident_times.push_back(when(rng) * config.period_ms);
    std::ranges::sort(incident_times);
    for (auto t : incident_times) s.annotations.push_back({t, Event::incident});
    s.annotations.push_back({end_ms, Event::end});
    std::ranges::stable_sort(s.annotations, {}, &Annotation::t_ms);

    std::vector<SensorId> sensors = config.sensors;
    std::ranges::sort(sensors);
    sensors.erase(std::unique(sensors.begin(), sensors.end()), sensors.end());

    const double fatigue = hand == Hand::non_dominant ? 1.0 + config.fatigue_growth * (session_index - 1) : 1.0;
    struct Noise {
        double location;
        double sigma;
    };
    std::vector<Noise> noise;
    for (auto sensor : sensors) {
        const auto& t = targets[static_cast<std::size_t>(sensor.index() - 1)];
        const double sigma = t.sem * std::sqrt(static_cast<double>(n)) * fatigue;
        noise.push_back({clipped_normal_location(t.mean, sigma), sigma});
    }

    const Glove glove = glove_for(profile, hand);
    std::normal_distribution<double> gauss(0.0, 1.0);
    s.samples.reserve(n * sensors.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = static_cast<std::uint32_t>(i) * config.period_ms;
        double bump = 0.0;
        if (config.incident_amplitude_mv != 0.0) {
            for (auto it : incident_times) {
                if (t >= it && t < it + config.incident_span_ms) bump = config.incident_amplitude_mv;
            }
        }
        for (std::size_t k = 0; k < sensors.size(); ++k) {
            double v = noise[k].location + noise[k].sigma * gauss(rng) + bump;
            v = std::clamp(std::round(v), 0.0, kSupplyMillivolt);
            s.samples.push_back({glove, sensors[k], t, static_cast<std::uint16_t>(v)});
        }
    }
    return s;
}

// All sessions for both users and hands, ordered expert d, expert n,
// novice d, novice n, each by session index.
inline std::vector<Session> simulate_cohort(const SkillProfile& expert, const SkillProfile& novice,
                                            const GeneratorConfig& config) {
    config.validate();
    if (expert.label == novice.label) throw DataError("profiles need distinct labels");
    std::vector<Session> out;
    for (const auto* p : {&expert, &novice}) {
        if (config.sessions > p->schedule_sessions) {
            throw DataError(p->label + ": profile covers only " + std::to_string(p->schedule_sessions) +
                            " sessions");
        }
        for (Hand hand : {Hand::dominant, Hand::non_dominant}) {
            for (int k = 1; k <= config.sessions; ++k) out.push_back(simulate_session(*p, config, k, hand));
        }
    }
    return out;
}

// Placeholder targets for sensors without published statistics: the expert
// keeps them low and steady, the novice recruits them broadly.
inline SkillProfile expert_profile() {
    SkillProfile p;
    p.label = "expert";
    p.dominant_glove = Glove::left;
    p.duration_first_s = 10.20;
    p.duration_last_s = 7.48;
    p.incident_rate = 0.0;
    p.scheduled_incidents = {{Hand::non_dominant, 8}, {Hand::non_dominant, 9}, {Hand::non_dominant, 10}};
    p.steps_first = {0.30, 0.25, 0.25, 0.20};
    p.steps_last = {0.28, 0.26, 0.26, 0.20};
    p.sensors = {{
        {4.0, 0.15, 4.0, 0.15},      // S1
        {180.0, 3.0, 150.0, 3.0},    // S2
        {120.0, 2.5, 110.0, 2.5},    // S3
        {4.0, 0.15, 4.0, 0.15},      // S4
        {241.0, 4.3, 78.0, 4.9},     // S5
        {576.0, 3.8, 474.0, 4.5},    // S6
        {594.0, 1.8, 609.0, 2.2},    // S7
        {210.0, 2.8, 190.0, 2.8},    // S8
        {90.0, 2.0, 85.0, 2.0},      // S9
        {330.0, 3.5, 300.0, 3.5},    // S10
        {260.0, 3.0, 240.0, 3.0},    // S11
        {150.0, 2.5, 140.0, 2.5},    // S12
    }};
    return p;
}

inline SkillProfile novice_profile() {
    SkillProfile p;
    p.label = "novice";
    p.dominant_glove = Glove::right;
    p.duration_first_s = 24.56;
    p.duration_last_s = 18.78;
    p.incident_rate = 1.0;
    p.steps_first = {0.45, 0.20, 0.20, 0.15};
    p.steps_last = {0.35, 0.22, 0.25, 0.18};
    p.sensors = {{
        {4.0, 0.15, 4.0, 0.15},      // S1
        {520.0, 9.0, 460.0, 8.0},    // S2
        {410.0, 8.0, 380.0, 7.5},    // S3
        {4.0, 0.15, 4.0, 0.15},      // S4
        {790.0, 2.7, 640.0, 3.6},    // S5
        {504.0, 2.4, 445.0, 3.3},    // S6
        {98.0, 1.2, 78.0, 1.6},      // S7
        {600.0, 9.5, 560.0, 9.0},    // S8
        {350.0, 8.0, 320.0, 7.5},    // S9
        {820.0, 10.0, 760.0, 9.5},   // S10
        {690.0, 9.5, 640.0, 9.0},    // S11
        {470.0, 8.5, 430.0, 8.0},    // S12
    }};
    return p;
}

// Profile file: "# gripforge-profile v1" then "key = value" lines.
//
//   label = expert
//   dominant_glove = left|right
//   sessions = 10
//   duration_s = <first> <last>
//   incident_rate = <expected per session>
//   incidents = n:8 n:9 d:3        (hand:session, repeat for several)
//   steps_first = f1 f2 f3 f4
//   steps_last = f1 f2 f3 f4
//   S<k> = <mean_first> <sem_first> <mean_last> <sem_last>

inline void write_profile(std::ostream& out, const SkillProfile& p) {
    using text::format_number;
    out << "# gripforge-profile v1\n";
    out << "label = " << p.label << '\n';
    out << "dominant_glove = " << (p.dominant_glove == Glove::left ? "left" : "right") << '\n';
    out << "sessions = " << p.schedule_sessions << '\n';
    out << "duration_s = " << format_number(p.duration_first_s) << ' ' << format_number(p.duration_last_s) << '\n';
    out << "incident_rate = " << format_number(p.incident_rate) << '\n';
    out << "incidents =";
    for (const auto& i : p.scheduled_incidents) out << ' ' << hand_code(i.hand) << ':' << i.session;
    out << '\n';
    auto steps = [&](const char* key, const StepFractions& f) {
        out << key << " =";
        for (double v : f) out << ' ' << format_number(v);
        out << '\n';
    };
    steps("steps_first", p.steps_first);
    steps("steps_last", p.steps_last);
    for (int i = 1; i <= kSensorCount; ++i) {
        const auto& t = p.sensors[static_cast<std::size_t>(i - 1)];
        out << 'S' << i << " = " << format_number(t.mean_first) << ' ' << format_number(t.sem_first) << ' '
            << format_number(t.mean_last) << ' ' << format_number(t.sem_last) << '\n';
    }
}

inline SkillProfile read_profile(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || text::trim(line) != "# gripforge-profile v1") {
        throw ParseError(1, "expected header '# gripforge-profile v1'");
    }
    SkillProfile p;
    std::array<bool, kSensorCount> seen{};
    bool have_label = false, have_glove = false, have_duration = false;
    auto numbers = [&](std::string_view v, std::size_t count) {
        auto tokens = text::split_ws(v);
        if (tokens.size() != count) {
            throw ParseError(line_no, "expected " + std::to_string(count) + " number(s)");
        }
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (!text::parse_double(tokens[i], out[i])) throw ParseError(line_no, "bad number");
        }
        return out;
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        auto key = text::trim(t.substr(0, eq));
        auto value = text::trim(t.substr(eq + 1));
        if (key == "label") {
            p.label = std::string(value);
            have_label = true;
        } else if (key == "dominant_glove") {
            if (value != "left" && value != "right") throw ParseError(line_no, "glove must be left or right");
            p.dominant_glove = value == "left" ? Glove::left : Glove::right;
            have_glove = true;
        } else if (key == "sessions") {
            if (!text::parse_int(value, p.schedule_sessions)) throw ParseError(line_no, "bad session count");
        } else if (key == "duration_s") {
            auto v = numbers(value, 2);
            p.duration_first_s = v[0];
            p.duration_last_s = v[1];
            have_duration = true;
        } else if (key == "incident_rate") {
            p.incident_rate = numbers(value, 1)[0];
        } else if (key == "incidents") {
            p.scheduled_incidents.clear();
            for (auto token : text::split_ws(value)) {
                auto colon = token.find(':');
                ScheduledIncident inc{};
                if (colon == std::string_view::npos || !text::parse_int(token.substr(colon + 1), inc.session)) {
                    throw ParseError(line_no, "incident must be <d|n>:<session>");
                }
                try {
                    inc.hand = parse_hand(token.substr(0, colon));
                } catch (const DomainError& e) {
                    throw ParseError(line_no, e.what());
                }
                p.scheduled_incidents.push_back(inc);
            }
        } else if (key == "steps_first" || key == "steps_last") {
            auto v = numbers(value, 4);
            auto& dst = key == "steps_first" ? p.steps_first : p.steps_last;
            std::ranges::copy(v, dst.begin());
        } else if (key.starts_with("S") || key.starts_with("s")) {
            int idx = 0;
            if (!text::parse_int(key.substr(1), idx) || idx < 1 || idx > kSensorCount) {
                throw ParseError(line_no, "unknown sensor key '" + std::string(key) + "'");
            }
            auto v = numbers(value, 4);
            p.sensors[static_cast<std::size_t>(idx - 1)] = {v[0], v[1], v[2], v[3]};
            seen[static_cast<std::size_t>(idx - 1)] = true;
        } else {
            throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
        }
    }
    if (!have_label || !have_glove || !have_duration) {
        throw ParseError(0, "profile needs label, dominant_glove and duration_s");
    }
    for (int i = 0; i < kSensorCount; ++i) {
        if (!seen[static_cast<std::size_t>(i)]) {
            throw ParseError(0, "profile lacks targets for S" + std::to_string(i + 1));
        }
    }
    p.validate();
    return p;
}

}  // namespace gripforge::sim
