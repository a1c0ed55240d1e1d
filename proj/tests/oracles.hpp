#pragma once

// Independent reference computations shared by the unit and acceptance
// suites. Nothing here calls into gripforge's statistics code.

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace oracle {

struct AnovaSS {
    double a, b, ab, error, total;
};

// Sums of squares accumulated one observation at a time, with every mean
// taken directly over the raw observations it covers.
inline AnovaSS anova_brute_force(const std::array<std::array<std::vector<double>, 2>, 2>& cells) {
    double grand = 0.0, count = 0.0;
    std::array<double, 2> a_sum{}, a_n{}, b_sum{}, b_n{};
    std::array<std::array<double, 2>, 2> cell{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (double y : cells[i][j]) {
                s += y;
                grand += y;
                count += 1;
                a_sum[i] += y;
                a_n[i] += 1;
                b_sum[j] += y;
                b_n[j] += 1;
            }
            cell[i][j] = s / static_cast<double>(cells[i][j].size());
        }
    }
    grand /= count;
    AnovaSS ss{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double ma = a_sum[i] / a_n[i], mb = b_sum[j] / b_n[j];
            for (double y : cells[i][j]) {
                ss.a += (ma - grand) * (ma - grand);
                ss.b += (mb - grand) * (mb - grand);
                const double inter = cell[i][j] - ma - mb + grand;
                ss.ab += inter * inter;
                ss.error += (y - cell[i][j]) * (y - cell[i][j]);
                ss.total += (y - grand) * (y - grand);
            }
        }
    }
    return ss;
}

inline double t_two_tailed(double t, double df) {
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

inline double t_cdf(double t, double df) { return boost::math::cdf(boost::math::students_t(df), t); }

inline double f_cdf(double f, double d1, double d2) { return boost::math::cdf(boost::math::fisher_f(d1, d2), f); }

inline double f_sf(double f, double d1, double d2) {
    return boost::math::cdf(boost::math::complement(boost::math::fisher_f(d1, d2), f));
}

inline bool rel_close(double got, double want, double rel) {
    if (got == want) return true;
    return std::fabs(got - want) <= rel * std::max(std::fabs(got), std::fabs(want));
}

}  // namespace oracle
