#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gripforge/pipeline.hpp"

using namespace gripforge;
namespace pl = gripforge::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("gripforge_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GRIPFORGE_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const fs::path& cohort_dir() {
    static const fs::path dir = [] {
        auto d = scratch("cohort");
        pl::cmd_simulate({.out = d, .seed = 3});
        return d;
    }();
    return dir;
}

}  // namespace

TEST_CASE("simulate writes a reproducible cohort", "[pipeline]") {
    const auto a = scratch("sim_a"), b = scratch("sim_b");
    auto ra = pl::cmd_simulate({.out = a, .seed = 11, .streams = true});
    pl::cmd_simulate({.out = b, .seed = 11, .streams = true});
    REQUIRE(ra.session_files.size() == 40);
    REQUIRE(ra.stream_files.size() == 40);
    REQUIRE(fs::exists(a / "manifest.txt"));
    REQUIRE(fs::exists(a / "expert.profile"));
    for (const auto& entry : fs::directory_iterator(a)) {
        REQUIRE(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
    REQUIRE(slurp(a / "manifest.txt").find("seed = 11") != std::string::npos);

    const auto c = scratch("sim_c");
    REQUIRE(pl::cmd_simulate({.out = c, .seed = 11, .sessions = 3}).session_files.size() == 12);

    // a decoded stream reproduces its session file
    const auto ing = scratch("ingest");
    auto r = pl::cmd_ingest({.in = a / "novice_d_2.bin", .out = ing, .user = "novice", .hand = Hand::dominant, .index = 2});
    REQUIRE(r.files.size() == 1);
    REQUIRE(r.gaps == 0);
    // the stream carries samples only; task annotations stay in the CSV
    const auto decoded = read_session(r.files[0]);
    const auto original = read_session(a / "novice_d_2.csv");
    REQUIRE(decoded.samples == original.samples);
    REQUIRE(decoded.end_ms() == original.end_ms());
    REQUIRE(decoded.key() == original.key());
    REQUIRE_THROWS_AS(pl::cmd_ingest({.in = a / "novice_d_2.bin", .out = ing, .user = "novice"}), DataError);
}

TEST_CASE("profile directory resolution", "[pipeline]") {
    const auto dir = scratch("profiles");
    auto p = sim::expert_profile();
    p.target(SensorId(5)).mean_first = 1000;
    {
        std::ofstream o(dir / "expert.profile");
        sim::write_profile(o, p);
    }
    ::setenv(pl::kProfileDirEnv, dir.c_str(), 1);
    auto resolved = pl::resolve_profile(std::nullopt, sim::expert_profile());
    ::unsetenv(pl::kProfileDirEnv);
    REQUIRE(resolved.profile == p);
    REQUIRE(resolved.source == (dir / "expert.profile").string());
    REQUIRE(pl::resolve_profile(std::nullopt, sim::novice_profile()).source == "builtin");
}

TEST_CASE("profile outputs", "[pipeline]") {
    const auto out = scratch("profile");
    auto r = pl::cmd_profile({.in = cohort_dir(), .out = out, .plot = true});
    REQUIRE(r.warnings.empty());
    const auto std_csv = slurp(r.std_csv);
    REQUIRE(std_csv.starts_with("session,sensor,std_mv\n"));
    // 40 sessions x (10 sensors + pooled) rows plus header
    REQUIRE(std::ranges::count(std_csv, '\n') == 40 * 11 + 1);
    REQUIRE(fs::exists(out / "variability.svg"));
    REQUIRE(r.plots.size() >= 5);

    const auto three = scratch("profile3");
    r = pl::cmd_profile({.in = cohort_dir(), .out = three, .sensors = {SensorId(5), SensorId(6), SensorId(7)}});
    REQUIRE(std::ranges::count(slurp(r.std_csv), '\n') == 40 * 4 + 1);

    const auto filtered = scratch("profile_s1");
    r = pl::cmd_profile({.in = cohort_dir(), .out = filtered, .sensors = {SensorId(1), SensorId(5)}});
    REQUIRE(r.warnings.size() == 1);

    // a constant session has zero variability
    const auto flat_dir = scratch("flat");
    Session s;
    s.user = "flat";
    s.annotations = {{0, Event::start}, {4000, Event::end}};
    for (std::uint32_t t = 0; t < 4000; t += 20) {
        for (auto id : analysis_sensors()) s.samples.push_back({Glove::left, id, t, 700});
    }
    write_session(flat_dir / "flat.csv", s);
    r = pl::cmd_profile({.in = flat_dir / "flat.csv", .out = flat_dir / "out"});
    REQUIRE(slurp(r.std_csv).find("flat_d_1,pooled,0\n") != std::string::npos);
    REQUIRE(slurp(r.amv_csv).find("flat_d_1,S5,2000,700\n") != std::string::npos);
}

TEST_CASE("somqe and grid reuse", "[pipeline]") {
    const auto out = scratch("somqe");
    pl::SomQeConfig cfg{.in = cohort_dir(), .out = out};
    cfg.options.schedule.epochs = 10;
    auto r = pl::cmd_somqe(cfg);
    REQUIRE(r.rows.size() == 20);
    REQUIRE(r.grid_files.size() == 1);

    pl::SomQeConfig again = cfg;
    again.out = scratch("somqe_again");
    again.grid_in = out / "grid.txt";
    auto reused = pl::cmd_somqe(again);
    REQUIRE(slurp(reused.qe_csv) == slurp(r.qe_csv));

    cfg.out = scratch("somqe_both");
    cfg.hand.reset();
    cfg.options.mode = som::GridMode::per_group;
    r = pl::cmd_somqe(cfg);
    REQUIRE(r.rows.size() == 40);
    REQUIRE(r.grid_files.size() == 4);
}

TEST_CASE("compare on the simulated cohort", "[pipeline]") {
    const auto prof = scratch("cmp_profile");
    pl::cmd_profile({.in = cohort_dir(), .out = prof});
    auto r = pl::cmd_compare({.std_csv = prof / "std.csv", .sessions = cohort_dir(), .out = scratch("cmp")});
    REQUIRE(r.t_tests.size() == 2);
    for (const auto& t : r.t_tests) REQUIRE(t.result.df == 18.0);
    REQUIRE(r.t_tests[0].hand == Hand::dominant);
    REQUIRE(r.t_tests[0].result.p < 0.001);
    REQUIRE(r.anovas.size() == 3);
    const auto& s6 = r.anovas[1].result;
    REQUIRE(s6.cell_means[0][0] > s6.cell_means[0][1]);
    REQUIRE(s6.cell_means[1][0] > s6.cell_means[1][1]);
    REQUIRE(s6.df_error == 4.0 * (static_cast<double>(s6.n_per_cell) - 1));
    REQUIRE(slurp(r.report_csv).starts_with("analysis,hand,sensor,effect,statistic,df1,df2,value,p\n"));

    // identical groups give t = 0
    const auto same = scratch("cmp_same");
    std::ofstream o(same / "std.csv");
    o << "session,sensor,std_mv\n";
    for (const char* user : {"a", "b"}) {
        for (int k = 1; k <= 3; ++k) o << user << "_d_" << k << ",pooled," << k * 1.5 << '\n';
    }
    o.close();
    r = pl::cmd_compare({.std_csv = same / "std.csv", .out = same, .expert = "a", .novice = "b"});
    REQUIRE(r.t_tests.size() == 1);
    REQUIRE(r.t_tests[0].result.t == 0.0);
    REQUIRE(r.t_tests[0].result.p == 1.0);
}

TEST_CASE("cli exit codes", "[pipeline][cli]") {
    const auto out = scratch("cli");
    REQUIRE(run_cli("") == 1);
    REQUIRE(run_cli("frobnicate") == 1);
    REQUIRE(run_cli("simulate --sessions 2 --seed 5 --out " + (out / "sim").string()) == 0);
    REQUIRE(fs::exists(out / "sim" / "expert_d_2.csv"));
    REQUIRE(run_cli("profile " + (out / "sim").string() + " --out " + (out / "p").string() + " --window-ms 30") == 1);
    REQUIRE(run_cli("profile " + (out / "nowhere").string() + " --out " + (out / "p").string()) == 2);
    REQUIRE(run_cli("profile " + (out / "sim").string() + " --out " + (out / "p").string() + " --sensors S1,S5") == 0);
    REQUIRE(run_cli("profile " + (out / "sim").string() + " --out " + (out / "p").string() + " --sensors S13") == 1);
    REQUIRE(run_cli("somqe " + (out / "sim").string() + " --out " + (out / "q").string() + " --epochs 2") == 0);
    REQUIRE(run_cli("somqe " + (out / "sim").string() + " --out " + (out / "q").string() + " --sigma0 0") == 1);
    REQUIRE(run_cli("compare --out " + (out / "c").string()) == 1);
    REQUIRE(run_cli("compare --std " + (out / "p" / "std.csv").string() + " --out " + (out / "c").string()) == 0);

    std::ofstream(out / "garbage.bin") << "not frames";
    REQUIRE(run_cli("ingest " + (out / "garbage.bin").string() + " --user x --hand d --out " + (out / "i").string()) == 2);
}
