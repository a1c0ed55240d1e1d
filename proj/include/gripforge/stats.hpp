#pragma once

// Inferential statistics for skill comparisons: Student t tests, balanced
// 2x2 factorial ANOVA, and the t / F distribution functions they need.

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gripforge/error.hpp"
#include "gripforge/text.hpp"

namespace gripforge::stats {

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz.
inline double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 20000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta needs x in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                       b * std::log1p(-x);
    double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(a, b, x) / a;
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

namespace detail {
inline void check_df(double df, const char* name) {
    if (!(df >= 1.0) || !std::isfinite(df)) {
        throw DomainError(std::string(name) + " must be a finite value >= 1");
    }
}
}  // namespace detail

// P(|T| >= |t|) for Student's t with df degrees of freedom.
inline double t_two_tailed(double t, double df) {
    detail::check_df(df, "degrees of freedom");
    if (std::isnan(t)) throw DomainError("t is NaN");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

inline double t_cdf(double t, double df) {
    double tail = 0.5 * t_two_tailed(t, df);
    return t > 0.0 ? 1.0 - tail : tail;
}

inline double f_cdf(double f, double df1, double df2) {
    detail::check_df(df1, "numerator df");
    detail::check_df(df2, "denominator df");
    if (std::isnan(f)) throw DomainError("F is NaN");
    if (f <= 0.0) return 0.0;
    if (std::isinf(f)) return 1.0;
    return incomplete_beta(df1 / 2.0, df2 / 2.0, df1 * f / (df1 * f + df2));
}

// Upper tail P(F' >= f), evaluated directly for precision at small p.
inline double f_sf(double f, double df1, double df2) {
    detail::check_df(df1, "numerator df");
    detail::check_df(df2, "denominator df");
    if (std::isnan(f)) throw DomainError("F is NaN");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

// "p<.001" style used in reports, else three decimals.
inline std::string format_p(double p) {
    if (p < 0.001) return "p<.001";
    return "p=" + text::format_fixed(p, 3);
}

inline double mean(std::span<const double> x) {
    if (x.empty()) throw DomainError("mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sum of squared deviations from the mean.
inline double sum_squares(std::span<const double> x) {
    double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss;
}

struct TwoGroupResult {
    double t;
    double df;
    double p;  // two-tailed
    double mean_a;
    double mean_b;
    std::size_t n_a;
    std::size_t n_b;
};

// Two-sample Student t with pooled variance; df = n_a + n_b - 2.
inline TwoGroupResult two_group_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw DomainError("each group needs at least 2 values");
    TwoGroupResult r{};
    r.n_a = a.size();
    r.n_b = b.size();
    r.mean_a = mean(a);
    r.mean_b = mean(b);
    r.df = static_cast<double>(r.n_a + r.n_b - 2);
    double pooled_var = (sum_squares(a) + sum_squares(b)) / r.df;
    double diff = r.mean_a - r.mean_b;
    if (pooled_var == 0.0) {
        if (diff != 0.0) throw DegenerateError("zero pooled variance with unequal means");
        r.t = 0.0;
        r.p = 1.0;
        return r;
    }
    r.t = diff / std::sqrt(pooled_var * (1.0 / r.n_a + 1.0 / r.n_b));
    r.p = t_two_tailed(r.t, r.df);
    return r;
}

// Paired t on a - b; df = n - 1.
inline TwoGroupResult paired_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DomainError("paired samples must have equal length");
    if (a.size() < 2) throw DomainError("paired t needs at least 2 pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    TwoGroupResult r{};
    r.n_a = r.n_b = a.size();
    r.mean_a = mean(a);
    r.mean_b = mean(b);
    r.df = static_cast<double>(d.size() - 1);
    double md = mean(d);
    double var = sum_squares(d) / r.df;
    if (var == 0.0) {
        if (md != 0.0) throw DegenerateError("constant nonzero paired differences");
        r.t = 0.0;
        r.p = 1.0;
        return r;
    }
    r.t = md / std::sqrt(var / static_cast<double>(d.size()));
    r.p = t_two_tailed(r.t, r.df);
    return r;
}

struct Effect {
    double ss;
    double df;
    double ms;
    double f;
    double p;
};

struct Anova2x2Result {
    Effect a;            // factor A, e.g. expertise
    Effect b;            // factor B, e.g. session
    Effect interaction;  // A x B
    double ss_error;
    double df_error;
    double ms_error;
    double ss_total;
    double grand_mean;
    std::array<std::array<double, 2>, 2> cell_means;  // [a][b]
    std::size_t n_per_cell;
};

// cells[a][b] holds the observations for level a of A and level b of B.
using Cells2x2 = std::array<std::array<std::vector<double>, 2>, 2>;

// Balanced two-way ANOVA with interaction from definitional sums of squares.
inline Anova2x2Result anova_2x2(const Cells2x2& cells) {
    const std::size_t n = cells[0][0].size();
    for (const auto& row : cells) {
        for (const auto& cell : row) {
            if (cell.size() != n) throw DomainError("unbalanced design: cells differ in size");
        }
    }
    if (n < 2) throw DomainError("need at least 2 observations per cell");

    Anova2x2Result r{};
    r.n_per_cell = n;
    double total = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r.cell_means[i][j] = mean(cells[i][j]);
            total += r.cell_means[i][j];
        }
    }
    r.grand_mean = total / 4.0;
    std::array<double, 2> mean_a{}, mean_b{};
    for (int i = 0; i < 2; ++i) {
        mean_a[i] = (r.cell_means[i][0] + r.cell_means[i][1]) / 2.0;
        mean_b[i] = (r.cell_means[0][i] + r.cell_means[1][i]) / 2.0;
    }
    const double nd = static_cast<double>(n);
    double ss_a = 0.0, ss_b = 0.0, ss_ab = 0.0, ss_e = 0.0, ss_t = 0.0;
    for (int i = 0; i < 2; ++i) {
        ss_a += 2.0 * nd * (mean_a[i] - r.grand_mean) * (mean_a[i] - r.grand_mean);
        ss_b += 2.0 * nd * (mean_b[i] - r.grand_mean) * (mean_b[i] - r.grand_mean);
        for (int j = 0; j < 2; ++j) {
            double dev = r.cell_means[i][j] - mean_a[i] - mean_b[j] + r.grand_mean;
            ss_ab += nd * dev * dev;
            for (double y : cells[i][j]) {
                ss_e += (y - r.cell_means[i][j]) * (y - r.cell_means[i][j]);
                ss_t += (y - r.grand_mean) * (y - r.grand_mean);
            }
        }
    }
    r.ss_error = ss_e;
    r.df_error = 4.0 * (nd - 1.0);
    r.ms_error = ss_e / r.df_error;
    r.ss_total = ss_t;
    if (r.ms_error == 0.0) throw DegenerateError("zero within-cell variance");

    auto effect = [&](double ss) {
        Effect e{ss, 1.0, ss, ss / r.ms_error, 0.0};
        e.p = f_sf(e.f, e.df, r.df_error);
        return e;
    };
    r.a = effect(ss_a);
    r.b = effect(ss_b);
    r.interaction = effect(ss_ab);
    return r;
}

}  // namespace gripforge::stats
