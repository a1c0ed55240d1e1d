// gripforge: simulate, ingest, profile, SOM-QE and compare grip-force sessions.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gripforge/pipeline.hpp"

namespace gf = gripforge;
namespace pl = gripforge::pipeline;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<gf::SensorId> parse_sensors(const std::vector<std::string>& names) {
    std::vector<gf::SensorId> out;
    for (const auto& n : names) {
        try {
            out.push_back(gf::SensorId::parse(n));
        } catch (const gf::Error&) {
            throw UsageError("unknown sensor '" + n + "' (expected S1..S12)");
        }
    }
    return out;
}

gf::Hand parse_hand_arg(const std::string& s) {
    if (s == "d" || s == "dominant") return gf::Hand::dominant;
    if (s == "n" || s == "non-dominant") return gf::Hand::non_dominant;
    throw UsageError("hand must be d|n");
}

void check_window(std::uint32_t window_ms) {
    if (window_ms == 0 || window_ms % gf::kSamplePeriodMs != 0) {
        throw UsageError("--window-ms must be a positive multiple of 20");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grip-force session analytics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "gripforge 0.1.0");

    // simulate
    pl::SimulateConfig sim;
    std::string sim_out, sim_expert, sim_novice;
    auto* simulate = app.add_subcommand("simulate", "Generate an expert/novice cohort of session files");
    simulate->add_option("--seed", sim.seed, "Master seed")->default_val(1);
    simulate->add_option("--out", sim_out, "Output directory")->required();
    simulate->add_option("--sessions", sim.sessions, "Sessions per hand")->default_val(10)->check(CLI::Range(1, gf::kMaxSessionIndex));
    simulate->add_option("--expert-profile", sim_expert, "Expert profile file");
    simulate->add_option("--novice-profile", sim_novice, "Novice profile file");
    simulate->add_option("--fatigue", sim.fatigue_growth, "Non-dominant spread growth per session")->default_val(0.05);
    simulate->add_flag("--streams", sim.streams, "Also write binary frame streams");

    // ingest
    pl::IngestConfig ing;
    std::string ing_in, ing_out, ing_hand, ing_dominant;
    auto* ingest = app.add_subcommand("ingest", "Decode a binary frame stream into session files");
    ingest->add_option("input", ing_in, "Frame stream")->required();
    ingest->add_option("--out", ing_out, "Output directory")->required();
    ingest->add_option("--user", ing.user, "User label")->required();
    ingest->add_option("--index", ing.index, "Session index")->default_val(1)->check(CLI::Range(1, gf::kMaxSessionIndex));
    ingest->add_option("--hand", ing_hand, "Hand of a single-glove stream (d|n)");
    ingest->add_option("--dominant", ing_dominant, "Dominant glove of a two-glove stream (L|R)");
    double battery_v = -1.0;
    ingest->add_option("--battery", battery_v, "Battery voltage reading to check (V)");

    // profile
    pl::ProfileConfig prof;
    std::string prof_in, prof_out;
    std::vector<std::string> prof_sensors;
    auto* profile = app.add_subcommand("profile", "Windowed AmV, per-session STD and task metrics");
    profile->add_option("input", prof_in, "Session file or directory")->required();
    profile->add_option("--out", prof_out, "Output directory")->required();
    profile->add_option("--sensors", prof_sensors, "Sensor filter, e.g. S5,S6,S7")->delimiter(',');
    profile->add_option("--window-ms", prof.window_ms, "AmV window length")->default_val(gf::kDefaultWindowMs);
    profile->add_flag("--include-gaps", prof.include_gaps, "Keep gap-flagged windows in amv.csv");
    profile->add_flag("--plot", prof.plot, "Write SVG plots");

    // somqe
    pl::SomQeConfig qe;
    std::string qe_in, qe_out, qe_grid, qe_mode = "pooled", qe_hand = "d", qe_input = "raw";
    std::vector<std::string> qe_sensors;
    auto& sched = qe.options.schedule;
    auto* somqe = app.add_subcommand("somqe", "Per-session SOM quantization error");
    somqe->add_option("input", qe_in, "Session file or directory")->required();
    somqe->add_option("--out", qe_out, "Output directory")->required();
    somqe->add_option("--seed", sched.seed, "Training seed")->default_val(1);
    somqe->add_option("--epochs", sched.epochs, "Training epochs")->default_val(100);
    somqe->add_option("--alpha0", sched.alpha0, "Initial learning rate")->default_val(0.5);
    somqe->add_option("--sigma0", sched.sigma0, "Initial neighborhood radius")->default_val(3.5);
    somqe->add_option("--sensors", qe_sensors, "Input sensors, e.g. S5,S6,S7")->delimiter(',');
    somqe->add_option("--mode", qe_mode, "pooled: one reference grid; per-group: one grid per group")
        ->check(CLI::IsMember({"pooled", "per-group"}));
    somqe->add_option("--hand", qe_hand, "d, n or both")->check(CLI::IsMember({"d", "n", "both"}));
    somqe->add_option("--input-mode", qe_input, "raw samples or per-window summary")->check(CLI::IsMember({"raw", "summary"}));
    somqe->add_flag("--normalize", qe.options.normalize, "z-score inputs before training");
    somqe->add_option("--grid", qe_grid, "Score against a saved grid snapshot");
    somqe->add_flag("--plot", qe.plot, "Write qe.svg");

    // compare
    pl::CompareConfig cmp;
    std::string cmp_std, cmp_qe, cmp_sessions, cmp_out, cmp_unit = "windows";
    auto* compare = app.add_subcommand("compare", "t tests on STD/QE series and first-vs-last ANOVA");
    compare->add_option("--std", cmp_std, "std.csv from profile");
    compare->add_option("--qe", cmp_qe, "qe.csv from somqe");
    compare->add_option("--sessions", cmp_sessions, "Session directory for the ANOVA");
    compare->add_option("--out", cmp_out, "Output directory")->required();
    compare->add_option("--expert", cmp.expert, "Expert user label")->default_val("expert");
    compare->add_option("--novice", cmp.novice, "Novice user label")->default_val("novice");
    compare->add_option("--anova-unit", cmp_unit, "windows (AmV) or samples")->check(CLI::IsMember({"windows", "samples"}));
    compare->add_option("--window-ms", cmp.window_ms, "AmV window length")->default_val(gf::kDefaultWindowMs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*simulate) {
            sim.out = sim_out;
            if (!sim_expert.empty()) sim.expert_profile = sim_expert;
            if (!sim_novice.empty()) sim.novice_profile = sim_novice;
            auto r = pl::cmd_simulate(sim);
            std::cout << "wrote " << r.session_files.size() << " sessions and " << r.manifest.string() << '\n';
        } else if (*ingest) {
            ing.in = ing_in;
            ing.out = ing_out;
            if (!ing_hand.empty()) ing.hand = parse_hand_arg(ing_hand);
            if (!ing_dominant.empty()) {
                if (ing_dominant != "L" && ing_dominant != "R") throw UsageError("--dominant must be L|R");
                ing.dominant_glove = ing_dominant == "L" ? gf::Glove::left : gf::Glove::right;
            }
            if (battery_v >= 0.0) {
                auto b = gf::battery_check(battery_v);
                if (b.state == gf::BatteryState::warn_change_battery) {
                    std::cerr << "warning: battery at " << battery_v << " V, change battery\n";
                }
            }
            auto r = pl::cmd_ingest(ing);
            std::cout << "decoded " << r.stats.frames << " frames (" << r.stats.skipped_bytes << " bytes skipped, "
                      << r.stats.corrupt_frames << " corrupt), " << r.gaps << " gaps\n";
            for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
        } else if (*profile) {
            check_window(prof.window_ms);
            prof.in = prof_in;
            prof.out = prof_out;
            if (!prof_sensors.empty()) prof.sensors = parse_sensors(prof_sensors);
            auto r = pl::cmd_profile(prof);
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << "wrote " << r.amv_csv.string() << ", " << r.std_csv.string() << ", "
                      << r.metrics_csv.string() << " and " << r.plots.size() << " plots\n";
        } else if (*somqe) {
            qe.in = qe_in;
            qe.out = qe_out;
            qe.options.mode = qe_mode == "pooled" ? gf::som::GridMode::reference : gf::som::GridMode::per_group;
            qe.options.input = qe_input == "raw" ? gf::som::InputMode::raw : gf::som::InputMode::summary;
            if (qe_hand == "both") {
                qe.hand.reset();
            } else {
                qe.hand = parse_hand_arg(qe_hand);
            }
            if (!qe_sensors.empty()) {
                std::vector<gf::SensorId> kept;
                for (auto s : parse_sensors(qe_sensors)) {
                    if (s.excluded()) {
                        std::cerr << "warning: " << s.name() << " is excluded from analysis; ignored\n";
                    } else {
                        kept.push_back(s);
                    }
                }
                if (kept.empty()) throw UsageError("no analysis-eligible sensors selected");
                qe.options.sensors = kept;
            }
            try {
                sched.validate();
            } catch (const gf::DomainError& e) {
                throw UsageError(e.what());
            }
            if (!qe_grid.empty()) qe.grid_in = qe_grid;
            auto r = pl::cmd_somqe(qe);
            std::cout << "wrote " << r.rows.size() << " QE rows to " << r.qe_csv.string() << '\n';
        } else if (*compare) {
            check_window(cmp.window_ms);
            if (!cmp_std.empty()) cmp.std_csv = cmp_std;
            if (!cmp_qe.empty()) cmp.qe_csv = cmp_qe;
            if (!cmp_sessions.empty()) cmp.sessions = cmp_sessions;
            if (!cmp.std_csv && !cmp.qe_csv && !cmp.sessions) {
                throw UsageError("compare needs at least one of --std, --qe, --sessions");
            }
            cmp.out = cmp_out;
            cmp.anova_unit = cmp_unit == "windows" ? pl::AnovaUnit::windows : pl::AnovaUnit::samples;
            auto r = pl::cmd_compare(cmp);
            std::ifstream report(r.report_txt);
            std::cout << report.rdbuf();
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
