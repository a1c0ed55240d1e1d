#pragma once

// File-level commands behind the gripforge CLI: simulate, ingest, profile,
// somqe and compare. Each reads and writes the formats of the owning
// modules and is deterministic for fixed inputs and seeds.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gripforge/error.hpp"
#include "gripforge/frame.hpp"
#include "gripforge/profiling.hpp"
#include "gripforge/session.hpp"
#include "gripforge/simulator.hpp"
#include "gripforge/som.hpp"
#include "gripforge/stats.hpp"
#include "gripforge/svg.hpp"
#include "gripforge/text.hpp"

namespace gripforge::pipeline {

namespace fs = std::filesystem;

inline constexpr const char* kProfileDirEnv = "GRIPFORGE_PROFILE_DIR";

namespace detail {

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory: " + dir.string());
}

inline void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

inline std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());
    return in;
}

struct SessionKey {
    std::string user;
    Hand hand;
    int index;
};

// Inverse of Session::key(): "<user>_<d|n>_<index>".
inline SessionKey parse_session_key(std::string_view key) {
    auto b = key.rfind('_');
    auto a = b == std::string_view::npos || b == 0 ? std::string_view::npos : key.rfind('_', b - 1);
    SessionKey k{};
    if (a == std::string_view::npos || a == 0 || !text::parse_int(key.substr(b + 1), k.index)) {
        throw DataError("malformed session key '" + std::string(key) + "'");
    }
    k.user = std::string(key.substr(0, a));
    k.hand = parse_hand(key.substr(a + 1, b - a - 1));
    return k;
}

inline std::string group_name(const std::string& user, Hand hand) {
    return user + '_' + hand_code(hand);
}

// Rows of a simple comma-separated file with a header line.
inline std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                                      std::string_view expected_header) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != expected_header) {
        throw ParseError(1, path.filename().string() + ": expected header '" + std::string(expected_header) + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    const auto columns = text::split(expected_header, ',').size();
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto f = text::split(line, ',');
        if (f.size() != columns) throw ParseError(line_no, path.filename().string() + ": wrong column count");
        rows.emplace_back(f.begin(), f.end());
    }
    return rows;
}

}  // namespace detail

// Session files in a directory (by file name), or a single session file.
inline std::vector<Session> load_sessions(const fs::path& in) {
    std::vector<fs::path> files;
    if (fs::is_directory(in)) {
        for (const auto& entry : fs::directory_iterator(in)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
            std::ifstream probe(entry.path());
            std::string first;
            std::getline(probe, first);
            if (first.starts_with("# gripforge-session")) files.push_back(entry.path());
        }
        std::ranges::sort(files);
    } else if (fs::is_regular_file(in)) {
        files.push_back(in);
    } else {
        throw Error("no such file or directory: " + in.string());
    }
    if (files.empty()) throw DataError("no session files in " + in.string());
    std::vector<Session> sessions;
    for (const auto& f : files) sessions.push_back(read_session(f));
    return sessions;
}

// ---------------------------------------------------------------- simulate

struct SimulateConfig {
    fs::path out;
    std::uint64_t seed = 1;
    int sessions = 10;
    std::optional<fs::path> expert_profile;
    std::optional<fs::path> novice_profile;
    double fatigue_growth = 0.05;
    bool streams = false;  // also write each session as a binary frame stream
};

struct SimulateResult {
    std::vector<fs::path> session_files;
    std::vector<fs::path> stream_files;
    fs::path manifest;
};

struct ResolvedProfile {
    sim::SkillProfile profile;
    std::string source;
};

// Explicit path, else <GRIPFORGE_PROFILE_DIR>/<label>.profile, else built in.
inline ResolvedProfile resolve_profile(const std::optional<fs::path>& explicit_path,
                                       const sim::SkillProfile& builtin) {
    std::optional<fs::path> path = explicit_path;
    if (!path) {
        if (const char* dir = std::getenv(kProfileDirEnv); dir && *dir) {
            fs::path candidate = fs::path(dir) / (builtin.label + ".profile");
            if (fs::is_regular_file(candidate)) path = candidate;
        }
    }
    if (!path) return {builtin, "builtin"};
    auto in = detail::open_in(*path);
    try {
        return {sim::read_profile(in), path->string()};
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path->filename().string() + ": " + e.detail());
    }
}

inline std::vector<std::uint8_t> session_stream(const Session& s) {
    std::map<std::uint32_t, Frame> frames;
    for (const auto& sample : s.samples) {
        auto& f = frames[sample.t_ms];
        f.glove = sample.glove;
        f.t_ms = sample.t_ms;
        f.sequence = static_cast<std::uint16_t>(sample.t_ms / kSamplePeriodMs);
        f.v_mv[static_cast<std::size_t>(sample.sensor.index() - 1)] = sample.v_mv;
    }
    std::vector<std::uint8_t> bytes;
    bytes.reserve(frames.size() * kFrameSize);
    for (const auto& [t, f] : frames) {
        auto b = encode_frame(f);
        bytes.insert(bytes.end(), b.begin(), b.end());
    }
    return bytes;
}

inline SimulateResult cmd_simulate(const SimulateConfig& cfg) {
    auto expert = resolve_profile(cfg.expert_profile, sim::expert_profile());
    auto novice = resolve_profile(cfg.novice_profile, sim::novice_profile());
    sim::GeneratorConfig gen;
    gen.seed = cfg.seed;
    gen.sessions = cfg.sessions;
    gen.fatigue_growth = cfg.fatigue_growth;
    const auto cohort = sim::simulate_cohort(expert.profile, novice.profile, gen);

    detail::ensure_dir(cfg.out);
    SimulateResult result;
    std::ostringstream manifest;
    manifest << "# gripforge-manifest v1\n"
             << "seed = " << cfg.seed << '\n'
             << "sessions = " << cfg.sessions << '\n'
             << "fatigue_growth = " << text::format_number(cfg.fatigue_growth) << '\n'
             << "link_bps = " << kLinkRateBps << '\n'
             << "expert_profile = " << expert.source << '\n'
             << "novice_profile = " << novice.source << '\n';
    for (const auto& s : cohort) {
        const auto file = cfg.out / (s.key() + ".csv");
        write_session(file, s);
        result.session_files.push_back(file);
        manifest << "file = " << file.filename().string()
                 << " seed=" << sim::session_seed(cfg.seed, s.user, s.hand, s.index) << '\n';
        if (cfg.streams) {
            const auto bytes = session_stream(s);
            const auto bin = cfg.out / (s.key() + ".bin");
            detail::write_text(bin, std::string(bytes.begin(), bytes.end()));
            result.stream_files.push_back(bin);
        }
    }
    for (const auto* p : {&expert.profile, &novice.profile}) {
        std::ostringstream o;
        sim::write_profile(o, *p);
        detail::write_text(cfg.out / (p->label + ".profile"), o.str());
    }
    result.manifest = cfg.out / "manifest.txt";
    detail::write_text(result.manifest, manifest.str());
    return result;
}

// ------------------------------------------------------------------ ingest

struct IngestConfig {
    fs::path in;
    fs::path out;
    std::string user;
    std::optional<Hand> hand;             // required for single-glove streams
    std::optional<Glove> dominant_glove;  // required for two-glove streams
    int index = 1;
};

struct IngestResult {
    std::vector<fs::path> files;
    FrameDecoder::Stats stats;
    std::size_t gaps = 0;
};

inline IngestResult cmd_ingest(const IngestConfig& cfg) {
    auto in = detail::open_in(cfg.in);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    IngestResult result;
    const auto frames = decode_stream(bytes, &result.stats);
    if (frames.empty()) throw DataError(cfg.in.string() + ": no valid frames");

    std::vector<Glove> gloves;
    for (Glove g : {Glove::left, Glove::right}) {
        if (std::ranges::any_of(frames, [g](const Frame& f) { return f.glove == g; })) gloves.push_back(g);
    }
    if (gloves.size() == 2 && !cfg.dominant_glove) {
        throw DataError("stream carries both gloves; say which one is dominant");
    }
    if (gloves.size() == 1 && !cfg.hand && !cfg.dominant_glove) {
        throw DataError("single-glove stream; give the hand it belongs to");
    }
    detail::ensure_dir(cfg.out);
    for (Glove g : gloves) {
        Hand hand = cfg.dominant_glove ? (g == *cfg.dominant_glove ? Hand::dominant : Hand::non_dominant)
                                       : *cfg.hand;
        const auto mine = frames_of(frames, g);
        auto session = stream_to_session(mine, {cfg.user, hand, cfg.index});
        result.gaps += session.count(Event::gap);
        const auto file = cfg.out / (session.key() + ".csv");
        write_session(file, session);
        result.files.push_back(file);
    }
    return result;
}

// ----------------------------------------------------------------- profile

struct ProfileConfig {
    fs::path in;
    fs::path out;
    std::vector<SensorId> sensors = analysis_sensors();
    std::uint32_t window_ms = kDefaultWindowMs;
    bool include_gaps = false;
    bool plot = false;
};

struct ProfileResult {
    fs::path amv_csv;
    fs::path std_csv;
    fs::path metrics_csv;
    std::vector<fs::path> plots;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<const Session*> sorted_sessions(const std::vector<Session>& sessions) {
    std::vector<const Session*> out;
    for (const auto& s : sessions) out.push_back(&s);
    std::ranges::stable_sort(out, [](const Session* a, const Session* b) {
        return std::tuple(a->user, a->hand, a->index) < std::tuple(b->user, b->hand, b->index);
    });
    return out;
}

inline std::string amv_plot(const Session& s, const std::vector<SensorId>& sensors, std::uint32_t window_ms) {
    svg::LineChart chart;
    chart.title = "AmV " + s.key() + " (" + std::to_string(window_ms) + " ms windows)";
    chart.x_label = "time (s)";
    chart.y_label = "AmV (mV)";
    std::size_t c = 0;
    for (auto sensor : sensors) {
        auto prof = window_amv(series_of(s, sensor), window_ms);
        svg::Series line{sensor.name(), svg::palette()[c++ % svg::palette().size()], {}};
        for (const auto& w : prof.windows) {
            if (!w.has_gap) line.points.push_back({(w.start_ms + window_ms / 2.0) / 1000.0, w.amv_mv});
        }
        chart.series.push_back(std::move(line));
    }
    constexpr std::array steps{Event::step1, Event::step2, Event::step3, Event::step4};
    for (std::size_t k = 0; k < steps.size(); ++k) {
        auto begin = s.time_of(steps[k]);
        if (!begin) continue;
        std::uint32_t until = s.end_ms();
        for (std::size_t j = k + 1; j < steps.size(); ++j) {
            if (auto next = s.time_of(steps[j])) {
                until = *next;
                break;
            }
        }
        chart.bands.push_back({*begin / 1000.0, until / 1000.0, svg::band_palette()[k], "step " + std::to_string(k + 1)});
    }
    return svg::render(chart);
}

}  // namespace detail

inline ProfileResult cmd_profile(const ProfileConfig& cfg) {
    if (cfg.window_ms == 0 || cfg.window_ms % kSamplePeriodMs != 0) {
        throw DomainError("window length must be a positive multiple of 20 ms");
    }
    const auto sessions = load_sessions(cfg.in);
    const auto ordered = detail::sorted_sessions(sessions);
    detail::ensure_dir(cfg.out);
    ProfileResult result;

    std::vector<SensorId> sensors;
    for (auto s : cfg.sensors) {
        if (s.excluded()) {
            result.warnings.push_back(s.name() + " is excluded from analysis (too little output); ignored");
        } else if (std::ranges::find(sensors, s) == sensors.end()) {
            sensors.push_back(s);
        }
    }
    if (sensors.empty()) throw DomainError("no analysis-eligible sensors selected");

    std::ostringstream amv, sd, metrics;
    amv << "session,sensor,window_start_ms,amv_mv\n";
    sd << "session,sensor,std_mv\n";
    metrics << "session,duration_s,incidents,step1_s,step2_s,step3_s,step4_s\n";
    std::map<std::string, svg::Series> std_lines;
    for (const Session* s : ordered) {
        for (auto sensor : sensors) {
            auto series = series_of(*s, sensor);
            if (series.empty()) throw DataError(s->key() + ": no samples for " + sensor.name());
            auto prof = window_amv(series, cfg.window_ms);
            for (const auto& w : prof.windows) {
                if (w.has_gap && !cfg.include_gaps) continue;
                amv << s->key() << ',' << sensor.name() << ',' << w.start_ms << ','
                    << text::format_number(w.amv_mv) << '\n';
            }
        }
        auto curve = variability_curve(std::span(s, 1), sensors, VariabilityMode::per_sensor);
        double pooled = 0.0;
        for (const auto& p : curve.points) {
            sd << p.session << ',' << p.sensor->name() << ',' << text::format_number(p.std_mv) << '\n';
            pooled += p.std_mv;
        }
        pooled /= static_cast<double>(curve.points.size());
        sd << s->key() << ",pooled," << text::format_number(pooled) << '\n';
        auto& line = std_lines[detail::group_name(s->user, s->hand)];
        line.points.push_back({static_cast<double>(s->index), pooled});

        auto m = task_metrics(*s);
        metrics << s->key() << ',' << text::format_number(m.duration_s) << ',' << m.incidents;
        for (const auto& step : m.step_s) metrics << ',' << (step ? text::format_number(*step) : "");
        metrics << '\n';
    }
    result.amv_csv = cfg.out / "amv.csv";
    result.std_csv = cfg.out / "std.csv";
    result.metrics_csv = cfg.out / "metrics.csv";
    detail::write_text(result.amv_csv, amv.str());
    detail::write_text(result.std_csv, sd.str());
    detail::write_text(result.metrics_csv, metrics.str());

    if (cfg.plot) {
        svg::LineChart chart;
        chart.title = "Grip-force variability per session";
        chart.x_label = "session";
        chart.y_label = "pooled STD (mV)";
        std::size_t c = 0;
        for (auto& [name, line] : std_lines) {
            line.name = name;
            line.color = svg::palette()[c++ % svg::palette().size()];
            chart.series.push_back(line);
        }
        result.plots.push_back(cfg.out / "variability.svg");
        detail::write_text(result.plots.back(), svg::render(chart));

        // First and last session of each user's dominant hand.
        std::map<std::string, std::pair<const Session*, const Session*>> span;
        for (const Session* s : ordered) {
            if (s->hand != Hand::dominant) continue;
            auto& [first, last] = span[s->user];
            if (!first || s->index < first->index) first = s;
            if (!last || s->index > last->index) last = s;
        }
        for (const auto& [user, fl] : span) {
            for (const Session* s : {fl.first, fl.second}) {
                auto path = cfg.out / ("amv_" + s->key() + ".svg");
                if (std::ranges::find(result.plots, path) != result.plots.end()) continue;
                detail::write_text(path, detail::amv_plot(*s, sensors, cfg.window_ms));
                result.plots.push_back(path);
            }
        }
    }
    return result;
}

// ------------------------------------------------------------------- somqe

struct SomQeConfig {
    fs::path in;
    fs::path out;
    som::QeOptions options;
    std::optional<Hand> hand = Hand::dominant;  // nullopt: both hands
    std::optional<fs::path> grid_in;
    bool plot = false;
};

struct SomQeResult {
    fs::path qe_csv;
    std::vector<fs::path> grid_files;
    std::optional<fs::path> plot;
    std::vector<som::QeRow> rows;
};

inline std::vector<som::SessionGroup> group_sessions(const std::vector<Session>& sessions,
                                                     std::optional<Hand> hand) {
    std::map<std::string, som::SessionGroup> groups;
    for (const auto& s : sessions) {
        if (hand && s.hand != *hand) continue;
        auto name = detail::group_name(s.user, s.hand);
        auto& g = groups[name];
        g.name = name;
        g.sessions.push_back(s);
    }
    std::vector<som::SessionGroup> out;
    for (auto& [name, g] : groups) out.push_back(std::move(g));
    if (out.empty()) throw DataError("no sessions for the selected hand");
    return out;
}

inline SomQeResult cmd_somqe(const SomQeConfig& cfg) {
    const auto sessions = load_sessions(cfg.in);
    const auto groups = group_sessions(sessions, cfg.hand);
    detail::ensure_dir(cfg.out);
    SomQeResult result;

    if (cfg.grid_in) {
        auto in = detail::open_in(*cfg.grid_in);
        auto snap = som::read_snapshot(in);
        auto opt = cfg.options;
        opt.input = snap.input;
        if (snap.trained.grid.dim() != opt.sensors.size()) {
            throw DataError("grid dimension does not match the selected sensors");
        }
        result.rows = som::qe_with_grid(snap.trained, groups, opt);
    } else {
        auto curve = som::som_qe_curve(groups, cfg.options);
        result.rows = curve.rows;
        for (std::size_t i = 0; i < curve.grids.size(); ++i) {
            const auto name = cfg.options.mode == som::GridMode::reference
                                  ? std::string("grid.txt")
                                  : "grid_" + groups[i].name + ".txt";
            std::ostringstream o;
            som::write_snapshot(o, {curve.grids[i], cfg.options.schedule, cfg.options.input});
            result.grid_files.push_back(cfg.out / name);
            detail::write_text(result.grid_files.back(), o.str());
        }
    }

    std::ostringstream csv;
    csv << "group,session,qe_mv\n";
    for (const auto& r : result.rows) csv << r.group << ',' << r.session << ',' << text::format_number(r.qe) << '\n';
    result.qe_csv = cfg.out / "qe.csv";
    detail::write_text(result.qe_csv, csv.str());

    if (cfg.plot) {
        svg::LineChart chart;
        chart.title = "SOM quantization error per session";
        chart.x_label = "session";
        chart.y_label = cfg.options.normalize ? "QE (z units)" : "QE (mV)";
        std::map<std::string, svg::Series> lines;
        for (const auto& r : result.rows) lines[r.group].points.push_back({static_cast<double>(r.session), r.qe});
        std::size_t c = 0;
        for (auto& [name, line] : lines) {
            line.name = name;
            line.color = svg::palette()[c++ % svg::palette().size()];
            chart.series.push_back(line);
        }
        result.plot = cfg.out / "qe.svg";
        detail::write_text(*result.plot, svg::render(chart));
    }
    return result;
}

// ----------------------------------------------------------------- compare

enum class AnovaUnit { samples, windows };

struct CompareConfig {
    std::optional<fs::path> std_csv;
    std::optional<fs::path> qe_csv;
    std::optional<fs::path> sessions;
    fs::path out;
    std::string expert = "expert";
    std::string novice = "novice";
    AnovaUnit anova_unit = AnovaUnit::windows;
    std::uint32_t window_ms = kDefaultWindowMs;
};

struct TRow {
    std::string analysis;  // "std" or "qe"
    Hand hand;
    stats::TwoGroupResult result;
};

struct AnovaRow {
    SensorId sensor;
    stats::Anova2x2Result result;
};

struct CompareResult {
    std::vector<TRow> t_tests;
    std::vector<AnovaRow> anovas;
    fs::path report_txt;
    fs::path report_csv;
};

namespace detail {

// Values per (user, hand), ordered by session index.
using SeriesByGroup = std::map<std::pair<std::string, Hand>, std::map<int, double>>;

inline SeriesByGroup read_std_series(const fs::path& path) {
    SeriesByGroup out;
    for (const auto& row : read_csv(path, "session,sensor,std_mv")) {
        if (row[1] != "pooled") continue;
        auto key = parse_session_key(row[0]);
        double v = 0.0;
        if (!text::parse_double(row[2], v)) throw DataError(path.filename().string() + ": bad std value");
        out[{key.user, key.hand}][key.index] = v;
    }
    return out;
}

inline SeriesByGroup read_qe_series(const fs::path& path) {
    SeriesByGroup out;
    for (const auto& row : read_csv(path, "group,session,qe_mv")) {
        auto sep = row[0].rfind('_');
        if (sep == std::string::npos || sep == 0) throw DataError("malformed group '" + row[0] + "'");
        int index = 0;
        double v = 0.0;
        if (!text::parse_int(row[1], index) || !text::parse_double(row[2], v)) {
            throw DataError(path.filename().string() + ": bad qe row");
        }
        out[{row[0].substr(0, sep), parse_hand(row[0].substr(sep + 1))}][index] = v;
    }
    return out;
}

inline std::vector<double> values(const std::map<int, double>& m) {
    std::vector<double> v;
    for (const auto& [k, x] : m) v.push_back(x);
    return v;
}

inline void t_rows(const SeriesByGroup& data, const std::string& analysis, const CompareConfig& cfg,
                   std::vector<TRow>& out) {
    for (Hand hand : {Hand::dominant, Hand::non_dominant}) {
        auto e = data.find({cfg.expert, hand});
        auto n = data.find({cfg.novice, hand});
        if (e == data.end() && n == data.end()) continue;
        if (e == data.end() || n == data.end()) {
            throw DataError(analysis + ": only one group present for hand " + hand_code(hand));
        }
        auto a = values(e->second), b = values(n->second);
        if (a.size() < 2 || b.size() < 2) {
            throw DataError(analysis + ": each group needs at least 2 sessions");
        }
        out.push_back({analysis, hand, stats::two_group_t(a, b)});
    }
}

inline std::vector<double> anova_values(const Session& s, SensorId sensor, const CompareConfig& cfg) {
    auto series = series_of(s, sensor);
    if (series.empty()) throw DataError(s.key() + ": no samples for " + sensor.name());
    if (cfg.anova_unit == AnovaUnit::samples) return series.v_mv;
    return window_amv(series, cfg.window_ms).values();
}

}  // namespace detail

inline CompareResult cmd_compare(const CompareConfig& cfg) {
    if (!cfg.std_csv && !cfg.qe_csv && !cfg.sessions) {
        throw DomainError("nothing to compare: give STD, QE or session inputs");
    }
    CompareResult result;
    if (cfg.std_csv) detail::t_rows(detail::read_std_series(*cfg.std_csv), "std", cfg, result.t_tests);
    if (cfg.qe_csv) detail::t_rows(detail::read_qe_series(*cfg.qe_csv), "qe", cfg, result.t_tests);

    if (cfg.sessions) {
        const auto sessions = load_sessions(*cfg.sessions);
        // First and last dominant-hand session per user.
        auto pick = [&](const std::string& user) {
            const Session* first = nullptr;
            const Session* last = nullptr;
            for (const auto& s : sessions) {
                if (s.user != user || s.hand != Hand::dominant) continue;
                if (!first || s.index < first->index) first = &s;
                if (!last || s.index > last->index) last = &s;
            }
            if (!first || first == last) {
                throw DataError(user + ": need two dominant-hand sessions for the first/last ANOVA");
            }
            return std::pair{first, last};
        };
        const auto expert = pick(cfg.expert);
        const auto novice = pick(cfg.novice);
        for (int idx : {5, 6, 7}) {
            SensorId sensor(idx);
            stats::Cells2x2 cells{{{detail::anova_values(*expert.first, sensor, cfg),
                                    detail::anova_values(*expert.second, sensor, cfg)},
                                   {detail::anova_values(*novice.first, sensor, cfg),
                                    detail::anova_values(*novice.second, sensor, cfg)}}};
            std::size_t n = cells[0][0].size();
            for (const auto& row : cells) {
                for (const auto& c : row) n = std::min(n, c.size());
            }
            // Balanced design: every cell keeps its first n observations.
            for (auto& row : cells) {
                for (auto& c : row) c.resize(n);
            }
            result.anovas.push_back({sensor, stats::anova_2x2(cells)});
        }
    }

    detail::ensure_dir(cfg.out);
    std::ostringstream txt, csv;
    csv << "analysis,hand,sensor,effect,statistic,df1,df2,value,p\n";
    txt << "Skill comparison: " << cfg.expert << " vs " << cfg.novice << "\n\n";
    if (!result.t_tests.empty()) {
        txt << "Two-sample t (pooled variance)\n";
        txt << "  measure  hand  mean_" << cfg.expert << "  mean_" << cfg.novice << "  t  df  p\n";
    }
    for (const auto& r : result.t_tests) {
        const auto& t = r.result;
        txt << "  " << r.analysis << "  " << hand_code(r.hand) << "  " << text::format_fixed(t.mean_a, 3) << "  "
            << text::format_fixed(t.mean_b, 3) << "  t(" << text::format_number(t.df)
            << ")=" << text::format_fixed(t.t, 2) << "  " << stats::format_p(t.p) << "\n";
        csv << r.analysis << ',' << hand_code(r.hand) << ",,expertise,t," << text::format_number(t.df) << ",,"
            << text::format_number(t.t) << ',' << text::format_number(t.p) << '\n';
    }
    if (!result.anovas.empty()) {
        txt << "\nTwo-way ANOVA, dominant hand, expertise x session (first vs last), n="
            << result.anovas.front().result.n_per_cell << " per cell ("
            << (cfg.anova_unit == AnovaUnit::samples ? "samples" : "AmV windows") << ")\n";
    }
    for (const auto& a : result.anovas) {
        const auto& r = a.result;
        txt << "  " << a.sensor.name() << "  cell means (mV): " << cfg.expert << " first="
            << text::format_fixed(r.cell_means[0][0], 1) << " last=" << text::format_fixed(r.cell_means[0][1], 1)
            << "; " << cfg.novice << " first=" << text::format_fixed(r.cell_means[1][0], 1)
            << " last=" << text::format_fixed(r.cell_means[1][1], 1) << '\n';
        const std::array<std::pair<const char*, const stats::Effect*>, 3> effects{
            {{"expertise", &r.a}, {"session", &r.b}, {"interaction", &r.interaction}}};
        for (const auto& [name, e] : effects) {
            txt << "    " << name << "  F(" << text::format_number(e->df) << ','
                << text::format_number(r.df_error) << ")=" << text::format_fixed(e->f, 2) << "  "
                << stats::format_p(e->p) << '\n';
            csv << "anova,d," << a.sensor.name() << ',' << name << ",F," << text::format_number(e->df) << ','
                << text::format_number(r.df_error) << ',' << text::format_number(e->f) << ','
                << text::format_number(e->p) << '\n';
        }
    }
    result.report_txt = cfg.out / "report.txt";
    result.report_csv = cfg.out / "report.csv";
    detail::write_text(result.report_txt, txt.str());
    detail::write_text(result.report_csv, csv.str());
    return result;
}

}  // namespace gripforge::pipeline
