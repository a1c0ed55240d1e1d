#pragma once

// Recorded task sessions and their CSV storage.
//
// File layout (UTF-8):
//
//   # gripforge-session v1 user=<label> hand=<d|n> index=<k> link_bps=115200
//   @<t_ms>,<event>          one per annotation
//   <t_ms>,<sensor>,<L|R>,<v_mv>
//
// Samples must appear sorted by (t_ms, sensor). Tensions are raw mV.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "gripforge/error.hpp"
#include "gripforge/frame.hpp"
#include "gripforge/sensor.hpp"
#include "gripforge/text.hpp"

namespace gripforge {

enum class Hand { dominant, non_dominant };

inline char hand_code(Hand h) { return h == Hand::dominant ? 'd' : 'n'; }

inline Hand parse_hand(std::string_view s) {
    if (s == "d" || s == "dominant") return Hand::dominant;
    if (s == "n" || s == "non_dominant" || s == "nondominant") return Hand::non_dominant;
    throw DomainError("unknown hand '" + std::string(s) + "' (expected d or n)");
}

inline char glove_code(Glove g) { return g == Glove::left ? 'L' : 'R'; }

enum class Event { start, step1, step2, step3, step4, incident, gap, end };

inline std::string_view to_string(Event e) {
    switch (e) {
        case Event::start: return "start";
        case Event::step1: return "step1";
        case Event::step2: return "step2";
        case Event::step3: return "step3";
        case Event::step4: return "step4";
        case Event::incident: return "incident";
        case Event::gap: return "gap";
        case Event::end: return "end";
    }
    return "?";
}

inline std::optional<Event> parse_event(std::string_view s) {
    for (auto e : {Event::start, Event::step1, Event::step2, Event::step3, Event::step4,
                   Event::incident, Event::gap, Event::end}) {
        if (to_string(e) == s) return e;
    }
    return std::nullopt;
}

struct Annotation {
    std::uint32_t t_ms;
    Event event;

    bool operator==(const Annotation&) const = default;
};

struct Sample {
    Glove glove;
    SensorId sensor;
    std::uint32_t t_ms;
    std::uint16_t v_mv;

    bool operator==(const Sample&) const = default;
};

struct SessionMeta {
    std::string user;
    Hand hand = Hand::dominant;
    int index = 1;
};

inline constexpr int kMaxSessionIndex = 10;

struct Session {
    std::string user;
    Hand hand = Hand::dominant;
    int index = 1;
    std::uint32_t link_bps = kLinkRateBps;
    std::vector<Sample> samples;          // sorted by (t_ms, sensor)
    std::vector<Annotation> annotations;  // sorted by t_ms, stable

    bool operator==(const Session&) const = default;

    [[nodiscard]] std::optional<std::uint32_t> time_of(Event e) const {
        for (const auto& a : annotations) {
            if (a.event == e) return a.t_ms;
        }
        return std::nullopt;
    }

    [[nodiscard]] std::uint32_t start_ms() const {
        auto t = time_of(Event::start);
        if (!t) throw DataError(key() + ": no start annotation");
        return *t;
    }

    [[nodiscard]] std::uint32_t end_ms() const {
        auto t = time_of(Event::end);
        if (!t) throw DataError(key() + ": no end annotation");
        return *t;
    }

    [[nodiscard]] double duration_s() const { return (end_ms() - start_ms()) / 1000.0; }

    // "<user>_<d|n>_<index>", used as the session column in outputs.
    [[nodiscard]] std::string key() const {
        return user + '_' + hand_code(hand) + '_' + std::to_string(index);
    }

    [[nodiscard]] std::size_t count(Event e) const {
        return static_cast<std::size_t>(
            std::ranges::count(annotations, e, &Annotation::event));
    }

    // Throws DataError on the first violated invariant.
    void validate() const {
        if (user.empty() || user.find_first_of(" \t,=\r\n") != std::string::npos) {
            throw DataError("user label must be a non-empty token without spaces, ',' or '='");
        }
        if (index < 1 || index > kMaxSessionIndex) {
            throw DataError("session index out of range [1,10]: " + std::to_string(index));
        }
        if (count(Event::start) != 1 || count(Event::end) != 1) {
            throw DataError(key() + ": need exactly one start and one end annotation");
        }
        if (!(start_ms() < end_ms())) throw DataError(key() + ": start must precede end");
        if (!std::ranges::is_sorted(annotations, {}, &Annotation::t_ms)) {
            throw DataError(key() + ": annotations out of time order");
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            if (s.v_mv > kSupplyMillivolt) {
                throw DataError(key() + ": tension above 3300 mV at t=" + std::to_string(s.t_ms));
            }
            if (s.t_ms % kSamplePeriodMs != 0) {
                throw DataError(key() + ": sample off the 20 ms grid at t=" + std::to_string(s.t_ms));
            }
            if (s.glove != samples.front().glove) {
                throw DataError(key() + ": samples from both gloves in one session");
            }
            if (i > 0) {
                const auto& p = samples[i - 1];
                if (std::tie(p.t_ms, p.sensor) >= std::tie(s.t_ms, s.sensor)) {
                    throw DataError(key() + ": samples not strictly sorted by (t_ms, sensor) at t=" +
                                    std::to_string(s.t_ms));
                }
            }
        }
    }
};

// Assembles one glove's frames into a session on the 20 ms grid.
// Sample times follow the sequence counter; missing sequence numbers become
// gap annotations rather than interpolated samples.
inline Session stream_to_session(std::span<const Frame> frames, const SessionMeta& meta) {
    if (frames.empty()) throw DataError("no frames to assemble");
    Session session;
    session.user = meta.user;
    session.hand = meta.hand;
    session.index = meta.index;
    const Glove glove = frames.front().glove;
    session.annotations.push_back({0, Event::start});

    std::uint32_t slot = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& f = frames[i];
        if (f.glove != glove) throw DataError("frames from more than one glove");
        if (i > 0) {
            auto step = static_cast<std::uint16_t>(f.sequence - frames[i - 1].sequence);
            if (step == 0 || step > 0x8000) {
                throw DataError("sequence number repeats or runs backwards at frame " +
                                std::to_string(i));
            }
            for (std::uint16_t missing = 1; missing < step; ++missing) {
                session.annotations.push_back({(slot + missing) * kSamplePeriodMs, Event::gap});
            }
            slot += step;
        }
        for (int s = 0; s < kSensorCount; ++s) {
            session.samples.push_back(
                {glove, SensorId(s + 1), slot * kSamplePeriodMs, f.v_mv[static_cast<std::size_t>(s)]});
        }
    }
    session.annotations.push_back({(slot + 1) * kSamplePeriodMs, Event::end});
    session.validate();
    return session;
}

// Split a mixed byte stream's frames by glove header.
inline std::vector<Frame> frames_of(std::span<const Frame> frames, Glove glove) {
    std::vector<Frame> out;
    std::ranges::copy_if(frames, std::back_inserter(out),
                         [glove](const Frame& f) { return f.glove == glove; });
    return out;
}

inline void write_session(std::ostream& out, const Session& session) {
    session.validate();
    out << "# gripforge-session v1 user=" << session.user << " hand=" << hand_code(session.hand)
        << " index=" << session.index << " link_bps=" << session.link_bps << '\n';
    for (const auto& a : session.annotations) {
        out << '@' << a.t_ms << ',' << to_string(a.event) << '\n';
    }
    for (const auto& s : session.samples) {
        out << s.t_ms << ',' << s.sensor.index() << ',' << glove_code(s.glove) << ',' << s.v_mv
            << '\n';
    }
}

inline Session read_session(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(1, "empty session file");
    auto header = text::parse_header(line, "# gripforge-session v1", line_no);
    Session session;
    auto field = [&](std::string_view key) -> const std::string& {
        auto it = header.find(key);
        if (it == header.end()) throw ParseError(1, "header lacks " + std::string(key) + "=");
        return it->second;
    };
    session.user = field("user");
    try {
        session.hand = parse_hand(field("hand"));
    } catch (const DomainError& e) {
        throw ParseError(1, e.what());
    }
    if (!text::parse_int(field("index"), session.index)) throw ParseError(1, "bad index");
    if (header.contains("link_bps") && !text::parse_int(field("link_bps"), session.link_bps)) {
        throw ParseError(1, "bad link_bps");
    }

    while (std::getline(in, line)) {
        ++line_no;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '@') {
            auto f = text::split(t.substr(1), ',');
            Annotation a{};
            std::optional<Event> ev;
            if (f.size() != 2 || !text::parse_int(f[0], a.t_ms) || !(ev = parse_event(f[1]))) {
                throw ParseError(line_no, "expected '@<t_ms>,<event>'");
            }
            a.event = *ev;
            session.annotations.push_back(a);
            continue;
        }
        auto f = text::split(t, ',');
        std::uint32_t t_ms = 0;
        int sensor = 0;
        unsigned v = 0;
        if (f.size() != 4 || !text::parse_int(f[0], t_ms) || !text::parse_int(f[1], sensor) ||
            !text::parse_int(f[3], v) || (f[2] != "L" && f[2] != "R")) {
            throw ParseError(line_no, "expected 't_ms,sensor,glove,v_mv'");
        }
        if (sensor < 1 || sensor > kSensorCount) throw ParseError(line_no, "sensor out of range");
        if (v > kSupplyMillivolt) throw ParseError(line_no, "tension above 3300 mV");
        session.samples.push_back({f[2] == "L" ? Glove::left : Glove::right, SensorId(sensor),
                                   t_ms, static_cast<std::uint16_t>(v)});
    }
    session.validate();
    return session;
}

inline void write_session(const std::filesystem::path& path, const Session& session) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    write_session(out, session);
    if (!out) throw Error("write failed: " + path.string());
}

inline Session read_session(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());
    try {
        return read_session(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.filename().string() + ": " + e.detail());
    } catch (const DataError& e) {
        throw DataError(path.filename().string() + ": " + e.what());
    }
}

}  // namespace gripforge
