#pragma once

// FSR glove sensors: layout table, voltage-divider physics and
// force/tension calibration curves.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "gripforge/error.hpp"
#include "gripforge/text.hpp"

namespace gripforge {

inline constexpr int kSensorCount = 12;
inline constexpr double kSupplyMillivolt = 3300.0;

enum class Locus { fingertip, middle_phalanx, palm };
enum class FingerRole { gross_grip, support, precision, other };

struct SensorInfo {
    int index;
    int diameter_mm;
    Locus locus;
    FingerRole role;
    bool excluded;  // produced too little output to be analysed
};

namespace detail {
// Eight 10 mm sensors on palm and fingertips, four 5 mm on middle phalanxes.
inline constexpr std::array<SensorInfo, kSensorCount> kLayout{{
    {1, 10, Locus::fingertip, FingerRole::other, true},
    {2, 10, Locus::fingertip, FingerRole::other, false},
    {3, 5, Locus::middle_phalanx, FingerRole::other, false},
    {4, 5, Locus::middle_phalanx, FingerRole::other, true},
    {5, 10, Locus::fingertip, FingerRole::gross_grip, false},
    {6, 10, Locus::fingertip, FingerRole::support, false},
    {7, 10, Locus::fingertip, FingerRole::precision, false},
    {8, 5, Locus::middle_phalanx, FingerRole::other, false},
    {9, 5, Locus::middle_phalanx, FingerRole::other, false},
    {10, 10, Locus::palm, FingerRole::other, false},
    {11, 10, Locus::palm, FingerRole::other, false},
    {12, 10, Locus::palm, FingerRole::other, false},
}};
}  // namespace detail

// Index of one of the twelve glove sensors, S1..S12.
class SensorId {
public:
    constexpr explicit SensorId(int index) : index_(static_cast<std::uint8_t>(index)) {
        if (index < 1 || index > kSensorCount) {
            throw DomainError("sensor index out of range [1,12]: " + std::to_string(index));
        }
    }

    [[nodiscard]] constexpr int index() const noexcept { return index_; }
    [[nodiscard]] constexpr const SensorInfo& info() const noexcept {
        return detail::kLayout[index_ - 1];
    }
    [[nodiscard]] constexpr bool excluded() const noexcept { return info().excluded; }
    [[nodiscard]] std::string name() const { return "S" + std::to_string(index_); }

    // Accepts "S7", "s7" or "7".
    static SensorId parse(std::string_view text) {
        auto body = text;
        if (!body.empty() && (body.front() == 'S' || body.front() == 's')) body.remove_prefix(1);
        int value = 0;
        if (!text::parse_int(body, value)) {
            throw DomainError("not a sensor name: '" + std::string(text) + "'");
        }
        return SensorId(value);
    }

    constexpr auto operator<=>(const SensorId&) const = default;

private:
    std::uint8_t index_;
};

// S2, S3, S5..S12 in the fixed order used for map input vectors.
inline std::vector<SensorId> analysis_sensors() {
    std::vector<SensorId> out;
    for (const auto& s : detail::kLayout) {
        if (!s.excluded) out.emplace_back(s.index);
    }
    return out;
}

inline std::vector<SensorId> all_sensors() {
    std::vector<SensorId> out;
    for (int i = 1; i <= kSensorCount; ++i) out.emplace_back(i);
    return out;
}

struct DividerParams {
    double r_pulldown_ohm = 10'000.0;
    double v_supply_mv = kSupplyMillivolt;
};

// Output of the FSR / pull-down divider read by the analog input.
inline double fsr_to_voltage(double r_fsr_ohm, const DividerParams& params = {}) {
    if (!(r_fsr_ohm > 0.0)) throw DomainError("FSR resistance must be positive");
    if (!(params.r_pulldown_ohm > 0.0) || !(params.v_supply_mv > 0.0)) {
        throw DomainError("divider resistance and supply must be positive");
    }
    return params.r_pulldown_ohm * params.v_supply_mv / (params.r_pulldown_ohm + r_fsr_ohm);
}

struct CalibrationKnot {
    double force_g;
    double tension_mv;

    bool operator==(const CalibrationKnot&) const = default;
};

struct CalibrationCurve {
    std::vector<CalibrationKnot> knots;
    double linear_lo_mv = 0.0;
    double linear_hi_mv = 1500.0;

    bool operator==(const CalibrationCurve&) const = default;
};

inline constexpr double kRequiredForceCoverageG = 1100.0;

enum class CalibrationFinding {
    too_few_knots,
    missing_zero_knot,
    force_not_increasing,
    tension_not_increasing,
    insufficient_coverage,
};

inline std::string_view to_string(CalibrationFinding f) {
    switch (f) {
        case CalibrationFinding::too_few_knots: return "too_few_knots";
        case CalibrationFinding::missing_zero_knot: return "missing_zero_knot";
        case CalibrationFinding::force_not_increasing: return "force_not_increasing";
        case CalibrationFinding::tension_not_increasing: return "tension_not_increasing";
        case CalibrationFinding::insufficient_coverage: return "insufficient_coverage";
    }
    return "unknown";
}

struct CalibrationIssue {
    CalibrationFinding finding;
    std::string detail;
};

struct CalibrationReport {
    std::vector<CalibrationIssue> issues;

    [[nodiscard]] bool passed() const noexcept { return issues.empty(); }
    [[nodiscard]] bool has(CalibrationFinding f) const {
        return std::ranges::any_of(issues, [f](const auto& i) { return i.finding == f; });
    }
};

inline CalibrationReport validate_calibration(const CalibrationCurve& curve) {
    CalibrationReport report;
    const auto& k = curve.knots;
    if (k.size() < 2) {
        report.issues.push_back({CalibrationFinding::too_few_knots,
                                 std::to_string(k.size()) + " knot(s), need at least 2"});
    }
    if (k.empty() || k.front().force_g != 0.0 || k.front().tension_mv != 0.0) {
        report.issues.push_back({CalibrationFinding::missing_zero_knot,
                                 "first knot must be (0 g, 0 mV)"});
    }
    for (std::size_t i = 1; i < k.size(); ++i) {
        if (!(k[i].force_g > k[i - 1].force_g)) {
            report.issues.push_back({CalibrationFinding::force_not_increasing,
                                     "knot " + std::to_string(i) + " force does not increase"});
        }
        if (!(k[i].tension_mv > k[i - 1].tension_mv)) {
            report.issues.push_back({CalibrationFinding::tension_not_increasing,
                                     "knot " + std::to_string(i) + " tension does not increase"});
        }
    }
    double max_force = 0.0;
    for (const auto& knot : k) max_force = std::max(max_force, knot.force_g);
    if (max_force < kRequiredForceCoverageG) {
        report.issues.push_back({CalibrationFinding::insufficient_coverage,
                                 "maximum force " + text::format_number(max_force) +
                                     " g is below 1100 g"});
    }
    return report;
}

// Piecewise-linear inverse calibration. Exact at knots, never extrapolates.
inline double voltage_to_force(double v_mv, const CalibrationCurve& curve) {
    if (auto report = validate_calibration(curve); !report.passed()) {
        throw DataError("invalid calibration curve: " + report.issues.front().detail);
    }
    if (!(v_mv >= 0.0)) throw DomainError("tension must be non-negative");
    const auto& k = curve.knots;
    if (v_mv > k.back().tension_mv) {
        throw RangeError("tension " + text::format_number(v_mv) +
                         " mV above the last calibration knot");
    }
    auto hi = std::ranges::lower_bound(k, v_mv, {}, &CalibrationKnot::tension_mv);
    if (hi->tension_mv == v_mv) return hi->force_g;
    auto lo = std::prev(hi);
    double frac = (v_mv - lo->tension_mv) / (hi->tension_mv - lo->tension_mv);
    return lo->force_g + frac * (hi->force_g - lo->force_g);
}

// Synthetic reference curve: linear up to 1100 g / 1500 mV, saturating above.
inline CalibrationCurve default_calibration() {
    return CalibrationCurve{{{0.0, 0.0},
                             {275.0, 375.0},
                             {550.0, 750.0},
                             {825.0, 1125.0},
                             {1100.0, 1500.0},
                             {1500.0, 1850.0},
                             {2000.0, 2150.0}}};
}

// Text format: "# calibration v1 sensor=<id>" then "force_gram,tension_mv" lines.

inline void write_calibration(std::ostream& out, const CalibrationCurve& curve, SensorId sensor) {
    out << "# calibration v1 sensor=" << sensor.name() << '\n';
    for (const auto& k : curve.knots) {
        out << text::format_number(k.force_g) << ',' << text::format_number(k.tension_mv) << '\n';
    }
}

struct LoadedCalibration {
    SensorId sensor;
    CalibrationCurve curve;
};

inline LoadedCalibration read_calibration(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty calibration file");
    ++line_no;
    auto header = text::parse_header(line, "# calibration v1", line_no);
    auto it = header.find("sensor");
    if (it == header.end()) throw ParseError(line_no, "header lacks sensor=<id>");
    LoadedCalibration loaded{SensorId::parse(it->second), {}};
    while (std::getline(in, line)) {
        ++line_no;
        auto trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        auto fields = text::split(trimmed, ',');
        CalibrationKnot knot{};
        if (fields.size() != 2 || !text::parse_double(fields[0], knot.force_g) ||
            !text::parse_double(fields[1], knot.tension_mv)) {
            throw ParseError(line_no, "expected 'force_gram,tension_mv'");
        }
        loaded.curve.knots.push_back(knot);
    }
    return loaded;
}

}  // namespace gripforge
