// Simulates one expert and one novice dominant-hand session, then prints
// per-sensor AmV and the pooled STD for each.

#include <iostream>

#include "gripforge/profiling.hpp"
#include "gripforge/simulator.hpp"

int main() {
    using namespace gripforge;
    sim::GeneratorConfig config;
    config.seed = 7;
    const std::array sensors{SensorId(5), SensorId(6), SensorId(7)};

    for (const auto& profile : {sim::expert_profile(), sim::novice_profile()}) {
        const Session s = sim::simulate_session(profile, config, 1);
        std::cout << s.key() << "  " << s.duration_s() << " s, " << s.count(Event::incident) << " incidents\n";
        for (auto id : sensors) {
            const auto amv = window_amv(series_of(s, id)).values();
            std::cout << "  " << id.name() << " AmV:";
            for (double v : amv) std::cout << ' ' << text::format_fixed(v, 1);
            std::cout << '\n';
        }
        const auto curve = variability_curve(std::span(&s, 1), analysis_sensors());
        std::cout << "  pooled STD " << text::format_fixed(curve.points.front().std_mv, 2) << " mV\n";
    }
}
