#pragma once

// Self-organizing map on a rectangular lattice (7 x 7 by default) with
// winner-take-all learning and the quantization error (QE) metric.
//
// Learning step for every unit i, with c the best-matching unit of x(t):
//
//   m_i(t+1) = m_i(t) + alpha(t) * h_ci(t) * (x(t) - m_i(t))
//
// h_ci is a Gaussian over lattice coordinates whose radius shrinks over
// training. QE is the mean Euclidean distance from each input to its BMU.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gripforge/error.hpp"
#include "gripforge/profiling.hpp"
#include "gripforge/session.hpp"
#include "gripforge/text.hpp"

namespace gripforge::som {

inline constexpr std::size_t kMapSide = 7;

// Row-major collection of equal-length real vectors.
class InputSet {
public:
    InputSet() = default;
    explicit InputSet(std::size_t dim) : dim_(dim) {}

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] std::span<const double> operator[](std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }
    [[nodiscard]] std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    void push_back(std::span<const double> x) {
        if (x.size() != dim_) throw DomainError("input dimension mismatch");
        data_.insert(data_.end(), x.begin(), x.end());
    }

    void append(const InputSet& other) {
        if (other.empty()) return;
        if (other.dim_ != dim_) throw DomainError("input dimension mismatch");
        data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    }

    [[nodiscard]] std::span<const double> flat() const noexcept { return data_; }

    bool operator==(const InputSet&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

struct LatticePoint {
    int row;
    int col;
};

class SomGrid {
public:
    SomGrid(std::size_t width, std::size_t height, std::size_t dim)
        : width_(width), height_(height), dim_(dim), models_(width * height * dim, 0.0) {
        if (width == 0 || height == 0 || dim == 0) throw DomainError("grid sides and dimension must be positive");
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::size_t units() const noexcept { return width_ * height_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    [[nodiscard]] std::span<const double> model(std::size_t unit) const {
        return {models_.data() + unit * dim_, dim_};
    }
    [[nodiscard]] std::span<double> model(std::size_t unit) { return {models_.data() + unit * dim_, dim_}; }

    [[nodiscard]] LatticePoint coord(std::size_t unit) const noexcept {
        return {static_cast<int>(unit / width_), static_cast<int>(unit % width_)};
    }

    [[nodiscard]] bool all_finite() const {
        return std::ranges::all_of(models_, [](double v) { return std::isfinite(v); });
    }

    bool operator==(const SomGrid&) const = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::size_t dim_;
    std::vector<double> models_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Best-matching unit; ties go to the smallest row-major index.
inline std::size_t bmu(const SomGrid& grid, std::span<const double> x) {
    if (x.size() != grid.dim()) {
        throw DomainError("input has dimension " + std::to_string(x.size()) + ", grid expects " +
                          std::to_string(grid.dim()));
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.units(); ++i) {
        const double d = squared_distance(grid.model(i), x);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline double neighborhood(LatticePoint c, LatticePoint i, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("neighborhood radius must be positive");
    const double dr = c.row - i.row;
    const double dc = c.col - i.col;
    return std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
}

// One learning step on a single model vector: m += rate * (x - m).
inline void apply_update(std::span<double> model, std::span<const double> x, double rate) {
    for (std::size_t k = 0; k < model.size(); ++k) model[k] += rate * (x[k] - model[k]);
}

struct TrainingSchedule {
    std::size_t epochs = 100;
    double alpha0 = 0.5;
    double alpha_final = 0.01;
    double sigma0 = 3.5;
    double sigma_final = 0.5;
    std::uint64_t seed = 1;

    void validate() const {
        if (epochs == 0) throw DomainError("schedule needs at least one epoch");
        if (!(alpha0 >= 0.0 && alpha0 <= 1.0 && alpha_final >= 0.0 && alpha_final <= alpha0)) {
            throw DomainError("learning rate must satisfy 0 <= alpha_final <= alpha0 <= 1");
        }
        if (!(sigma_final > 0.0 && sigma_final <= sigma0)) {
            throw DomainError("radius must satisfy 0 < sigma_final <= sigma0");
        }
    }

    // Both decay linearly over the total number of presentations.
    [[nodiscard]] double alpha(std::size_t step, std::size_t total) const {
        return lerp(alpha0, alpha_final, step, total);
    }
    [[nodiscard]] double sigma(std::size_t step, std::size_t total) const {
        return lerp(sigma0, sigma_final, step, total);
    }

private:
    static double lerp(double from, double to, std::size_t step, std::size_t total) {
        if (total <= 1) return from;
        const double f = static_cast<double>(step) / static_cast<double>(total - 1);
        return from + (to - from) * f;
    }
};

// Models drawn uniformly within each dimension's [min, max] over the inputs.
inline void initialize_uniform(SomGrid& grid, const InputSet& inputs, std::mt19937_64& rng) {
    if (inputs.empty()) throw DomainError("cannot initialize from empty inputs");
    if (inputs.dim() != grid.dim()) throw DomainError("input dimension mismatch");
    std::vector<double> lo(grid.dim(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(grid.dim(), -std::numeric_limits<double>::infinity());
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        auto x = inputs[n];
        for (std::size_t k = 0; k < grid.dim(); ++k) {
            lo[k] = std::min(lo[k], x[k]);
            hi[k] = std::max(hi[k], x[k]);
        }
    }
    for (std::size_t i = 0; i < grid.units(); ++i) {
        auto m = grid.model(i);
        for (std::size_t k = 0; k < grid.dim(); ++k) {
            std::uniform_real_distribution<double> dist(lo[k], std::nextafter(hi[k], hi[k] + 1.0));
            m[k] = lo[k] == hi[k] ? lo[k] : dist(rng);
        }
    }
}

// Sequential training; presentation order is reshuffled every epoch from
// rng, so a fixed seed reproduces the same grid.
inline SomGrid train(SomGrid grid, const InputSet& inputs, const TrainingSchedule& schedule,
                     std::mt19937_64& rng) {
    schedule.validate();
    if (inputs.empty()) throw DomainError("cannot train on empty inputs");
    if (inputs.dim() != grid.dim()) throw DomainError("input dimension mismatch");

    const std::size_t units = grid.units();
    std::vector<double> lattice_d2(units * units);
    for (std::size_t c = 0; c < units; ++c) {
        for (std::size_t i = 0; i < units; ++i) {
            auto a = grid.coord(c), b = grid.coord(i);
            const double dr = a.row - b.row, dc = a.col - b.col;
            lattice_d2[c * units + i] = dr * dr + dc * dc;
        }
    }

    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t total = schedule.epochs * inputs.size();
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t n : order) {
            const auto x = inputs[n];
            const double alpha = schedule.alpha(step, total);
            const double sigma = schedule.sigma(step, total);
            ++step;
            if (alpha == 0.0) continue;
            const std::size_t c = bmu(grid, x);
            const double inv = 1.0 / (2.0 * sigma * sigma);
            const double* row = lattice_d2.data() + c * units;
            for (std::size_t i = 0; i < units; ++i) {
                const double h = std::exp(-row[i] * inv);
                apply_update(grid.model(i), x, alpha * h);
            }
        }
    }
    return grid;
}

inline SomGrid train(SomGrid grid, const InputSet& inputs, const TrainingSchedule& schedule) {
    std::mt19937_64 rng(schedule.seed);
    return train(std::move(grid), inputs, schedule, rng);
}

inline double quantization_error(const SomGrid& grid, const InputSet& inputs) {
    if (inputs.empty()) throw DomainError("quantization error of empty inputs");
    if (inputs.dim() != grid.dim()) throw DomainError("input dimension mismatch");
    double total = 0.0;
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        const auto x = inputs[n];
        total += std::sqrt(squared_distance(grid.model(bmu(grid, x)), x));
    }
    return total / static_cast<double>(inputs.size());
}

struct BuiltInputs {
    InputSet inputs;
    std::vector<std::uint32_t> t_ms;
    std::size_t skipped = 0;  // grid timestamps with at least one sensor missing
};

// One vector of simultaneous tensions per grid timestamp at which every
// requested sensor has a sample.
inline BuiltInputs build_inputs(const Session& session,
                                std::span<const SensorId> sensors) {
    for (auto s : sensors) {
        if (s.excluded()) throw DomainError(s.name() + " is not an analysis sensor");
    }
    std::vector<bool> present(kSensorCount + 1, false);
    for (const auto& s : session.samples) present[static_cast<std::size_t>(s.sensor.index())] = true;
    std::size_t available = 0;
    for (auto s : sensors) available += present[static_cast<std::size_t>(s.index())] ? 1 : 0;
    if (sensors.empty() || available < sensors.size()) {
        throw DataError(session.key() + ": " + std::to_string(available) + " of " +
                        std::to_string(sensors.size()) + " input sensors present");
    }

    std::vector<int> slot(kSensorCount + 1, -1);
    for (std::size_t k = 0; k < sensors.size(); ++k) slot[static_cast<std::size_t>(sensors[k].index())] = static_cast<int>(k);

    BuiltInputs out{InputSet(sensors.size()), {}, 0};
    std::vector<double> x(sensors.size());
    std::size_t i = 0;
    const auto& samples = session.samples;
    while (i < samples.size()) {
        const std::uint32_t t = samples[i].t_ms;
        std::size_t filled = 0;
        for (; i < samples.size() && samples[i].t_ms == t; ++i) {
            int k = slot[static_cast<std::size_t>(samples[i].sensor.index())];
            if (k >= 0) {
                x[static_cast<std::size_t>(k)] = samples[i].v_mv;
                ++filled;
            }
        }
        if (filled == sensors.size()) {
            out.inputs.push_back(x);
            out.t_ms.push_back(t);
        } else {
            ++out.skipped;
        }
    }
    return out;
}

inline BuiltInputs build_inputs(const Session& session) {
    const auto sensors = analysis_sensors();
    return build_inputs(session, sensors);
}

// Variability summary inputs: per window, the population STD of each sensor.
inline InputSet build_summary_inputs(const Session& session, std::span<const SensorId> sensors,
                                     std::uint32_t window_ms = kDefaultWindowMs) {
    if (window_ms == 0 || window_ms % kSamplePeriodMs != 0) {
        throw DomainError("window length must be a positive multiple of 20 ms");
    }
    InputSet out(sensors.size());
    std::vector<SensorSeries> series;
    for (auto s : sensors) series.push_back(series_of(session, s));
    const auto start = session.start_ms();
    const std::size_t windows = (session.end_ms() - start) / window_ms;
    std::vector<double> x(sensors.size());
    std::vector<double> buf;
    for (std::size_t w = 0; w < windows; ++w) {
        const auto lo = start + static_cast<std::uint32_t>(w) * window_ms;
        const auto hi = lo + window_ms;
        bool complete = true;
        for (std::size_t k = 0; k < sensors.size(); ++k) {
            buf.clear();
            const auto& s = series[k];
            for (std::size_t j = 0; j < s.size(); ++j) {
                if (s.t_ms[j] >= lo && s.t_ms[j] < hi) buf.push_back(s.v_mv[j]);
            }
            if (buf.empty()) {
                complete = false;
                break;
            }
            x[k] = session_std(buf);
        }
        if (complete) out.push_back(x);
    }
    return out;
}

// Per-dimension z-scoring fitted on training inputs.
struct Normalization {
    std::vector<double> mean;
    std::vector<double> scale;

    [[nodiscard]] bool active() const noexcept { return !mean.empty(); }

    static Normalization fit(const InputSet& inputs) {
        if (inputs.empty()) throw DomainError("cannot fit normalization on empty inputs");
        const std::size_t d = inputs.dim();
        Normalization z{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
        const double n = static_cast<double>(inputs.size());
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            for (std::size_t k = 0; k < d; ++k) z.mean[k] += inputs[i][k];
        }
        for (auto& m : z.mean) m /= n;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                const double dev = inputs[i][k] - z.mean[k];
                z.scale[k] += dev * dev;
            }
        }
        for (auto& s : z.scale) {
            s = std::sqrt(s / n);
            if (s == 0.0) s = 1.0;
        }
        return z;
    }

    void apply(InputSet& inputs) const {
        if (!active()) return;
        if (inputs.dim() != mean.size()) throw DomainError("normalization dimension mismatch");
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            auto x = inputs[i];
            for (std::size_t k = 0; k < x.size(); ++k) x[k] = (x[k] - mean[k]) / scale[k];
        }
    }
};

enum class GridMode { reference, per_group };
enum class InputMode { raw, summary };

struct QeOptions {
    TrainingSchedule schedule;
    GridMode mode = GridMode::reference;
    InputMode input = InputMode::raw;
    bool normalize = false;
    std::size_t width = kMapSide;
    std::size_t height = kMapSide;
    std::vector<SensorId> sensors = analysis_sensors();
};

struct SessionGroup {
    std::string name;
    std::vector<Session> sessions;
};

struct QeRow {
    std::string group;
    int session;
    double qe;
};

struct TrainedGrid {
    SomGrid grid;
    Normalization norm;
};

struct QeCurve {
    std::vector<QeRow> rows;
    std::vector<TrainedGrid> grids;  // one in reference mode, else one per group
};

inline InputSet session_inputs(const Session& s, const QeOptions& opt) {
    if (opt.input == InputMode::summary) return build_summary_inputs(s, opt.sensors);
    return build_inputs(s, opt.sensors).inputs;
}

inline TrainedGrid fit_grid(const InputSet& pooled, const QeOptions& opt) {
    InputSet train_set = pooled;
    Normalization norm;
    if (opt.normalize) {
        norm = Normalization::fit(train_set);
        norm.apply(train_set);
    }
    std::mt19937_64 rng(opt.schedule.seed);
    SomGrid grid(opt.width, opt.height, train_set.dim());
    initialize_uniform(grid, train_set, rng);
    return {train(std::move(grid), train_set, opt.schedule, rng), norm};
}

inline double session_qe(const TrainedGrid& trained, const Session& s, const QeOptions& opt) {
    auto inputs = session_inputs(s, opt);
    if (inputs.empty()) throw DataError(s.key() + ": no complete input vectors");
    trained.norm.apply(inputs);
    return quantization_error(trained.grid, inputs);
}

namespace detail {
inline std::vector<const Session*> by_index(const SessionGroup& g) {
    std::vector<const Session*> out;
    for (const auto& s : g.sessions) out.push_back(&s);
    std::ranges::stable_sort(out, {}, [](const Session* s) { return s->index; });
    return out;
}
}  // namespace detail

// Per-session QE for each group. Reference mode trains one grid on all
// groups' pooled inputs so every session is scored on a common scale.
inline QeCurve som_qe_curve(std::span<const SessionGroup> groups, const QeOptions& opt) {
    if (groups.empty()) throw DomainError("no session groups");
    for (const auto& g : groups) {
        if (g.sessions.empty()) throw DomainError("group '" + g.name + "' has no sessions");
    }
    QeCurve curve;
    auto pooled_of = [&](const SessionGroup& g, InputSet& into) {
        for (const auto& s : g.sessions) into.append(session_inputs(s, opt));
    };
    if (opt.mode == GridMode::reference) {
        InputSet pooled(opt.sensors.size());
        for (const auto& g : groups) pooled_of(g, pooled);
        curve.grids.push_back(fit_grid(pooled, opt));
    }
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        if (opt.mode == GridMode::per_group) {
            InputSet pooled(opt.sensors.size());
            pooled_of(g, pooled);
            curve.grids.push_back(fit_grid(pooled, opt));
        }
        const auto& trained = curve.grids.back();
        for (const Session* s : detail::by_index(g)) {
            curve.rows.push_back({g.name, s->index, session_qe(trained, *s, opt)});
        }
    }
    return curve;
}

// Scores every session against an existing grid.
inline std::vector<QeRow> qe_with_grid(const TrainedGrid& trained, std::span<const SessionGroup> groups,
                                       const QeOptions& opt) {
    std::vector<QeRow> rows;
    for (const auto& g : groups) {
        for (const Session* s : detail::by_index(g)) {
            rows.push_back({g.name, s->index, session_qe(trained, *s, opt)});
        }
    }
    return rows;
}

// Snapshot file:
//   # gripforge-som v1 width=W height=H dim=D seed=.. epochs=.. alpha0=.. alpha_final=..
//     sigma0=.. sigma_final=.. input=raw|summary norm=none|zscore
//   [mean v1 .. vD]       only when norm=zscore
//   [scale v1 .. vD]
//   W*H rows of D space-separated values, row-major unit order

struct GridSnapshot {
    TrainedGrid trained;
    TrainingSchedule schedule;
    InputMode input = InputMode::raw;
};

inline void write_snapshot(std::ostream& out, const GridSnapshot& snap) {
    const auto& g = snap.trained.grid;
    const auto& s = snap.schedule;
    out << "# gripforge-som v1 width=" << g.width() << " height=" << g.height() << " dim=" << g.dim()
        << " seed=" << s.seed << " epochs=" << s.epochs << " alpha0=" << text::format_number(s.alpha0)
        << " alpha_final=" << text::format_number(s.alpha_final)
        << " sigma0=" << text::format_number(s.sigma0)
        << " sigma_final=" << text::format_number(s.sigma_final)
        << " input=" << (snap.input == InputMode::raw ? "raw" : "summary")
        << " norm=" << (snap.trained.norm.active() ? "zscore" : "none") << '\n';
    auto row = [&](std::span<const double> v) {
        for (std::size_t k = 0; k < v.size(); ++k) out << (k ? " " : "") << text::format_number(v[k]);
        out << '\n';
    };
    if (snap.trained.norm.active()) {
        out << "mean ";
        row(snap.trained.norm.mean);
        out << "scale ";
        row(snap.trained.norm.scale);
    }
    for (std::size_t i = 0; i < g.units(); ++i) row(g.model(i));
}

inline GridSnapshot read_snapshot(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(1, "empty grid snapshot");
    auto h = text::parse_header(line, "# gripforge-som v1", 1);
    auto get = [&](const char* key) -> const std::string& {
        auto it = h.find(key);
        if (it == h.end()) throw ParseError(1, std::string("header lacks ") + key + "=");
        return it->second;
    };
    std::size_t w = 0, ht = 0, d = 0;
    GridSnapshot snap{TrainedGrid{SomGrid(1, 1, 1), {}}, {}, InputMode::raw};
    auto& s = snap.schedule;
    if (!text::parse_int(get("width"), w) || !text::parse_int(get("height"), ht) ||
        !text::parse_int(get("dim"), d) || !text::parse_int(get("seed"), s.seed) ||
        !text::parse_int(get("epochs"), s.epochs) || !text::parse_double(get("alpha0"), s.alpha0) ||
        !text::parse_double(get("alpha_final"), s.alpha_final) ||
        !text::parse_double(get("sigma0"), s.sigma0) ||
        !text::parse_double(get("sigma_final"), s.sigma_final) || w == 0 || ht == 0 || d == 0) {
        throw ParseError(1, "bad grid header values");
    }
    const auto& input = get("input");
    if (input != "raw" && input != "summary") throw ParseError(1, "bad input mode");
    snap.input = input == "raw" ? InputMode::raw : InputMode::summary;
    const auto& norm = get("norm");
    if (norm != "none" && norm != "zscore") throw ParseError(1, "bad norm");

    auto read_row = [&](std::string_view prefix) {
        if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of snapshot");
        ++line_no;
        std::string_view body = text::trim(line);
        if (!prefix.empty()) {
            if (!body.starts_with(prefix)) throw ParseError(line_no, "expected '" + std::string(prefix) + "' row");
            body.remove_prefix(prefix.size());
        }
        auto tokens = text::split_ws(body);
        if (tokens.size() != d) throw ParseError(line_no, "expected " + std::to_string(d) + " values");
        std::vector<double> v(d);
        for (std::size_t k = 0; k < d; ++k) {
            if (!text::parse_double(tokens[k], v[k])) throw ParseError(line_no, "bad number");
        }
        return v;
    };
    if (norm == "zscore") {
        snap.trained.norm.mean = read_row("mean ");
        snap.trained.norm.scale = read_row("scale ");
    }
    SomGrid grid(w, ht, d);
    for (std::size_t i = 0; i < grid.units(); ++i) {
        auto v = read_row("");
        std::ranges::copy(v, grid.model(i).begin());
    }
    if (!grid.all_finite()) throw DataError("grid snapshot contains non-finite values");
    snap.trained.grid = std::move(grid);
    return snap;
}

}  // namespace gripforge::som
