#ifndef VOXCOR_ORACLE_HPP
#define VOXCOR_ORACLE_HPP

// Pseudo-oracle used for differential testing and the `verify` CLI mode.
// Shares only the type definitions in types.hpp with the primary statistics;
// every quantity is recomputed by a deliberately different route:
//   - Pearson: single-pass raw-moment accumulation in extended precision,
//     normalized by the product of standard deviations.
//   - Ranks: counting identity rank_i = #{a_j < a_i} + (#{a_j == a_i} + 1)/2.
//   - Quadrant: integer enumeration of sign products around the central rank.
// Keep it that way: including stats.hpp here would defeat the point.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "voxcor/types.hpp"

namespace voxcor::oracle {

using series_view = std::span<const double>;

namespace detail {

inline void check_pair(series_view a, series_view b) {
    if (a.size() != b.size())
        throw stats::stats_error(stats::errc::length_mismatch,
                                 "series lengths differ: " + std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()));
    if (a.size() < 2)
        throw stats::stats_error(stats::errc::too_short,
                                 "correlation needs at least 2 samples, got " +
                                     std::to_string(a.size()));
}

inline double clamp_unit(double rho) {
    const double overshoot = std::fabs(rho) - 1.0;
    if (overshoot <= 0.0) return rho;
    if (overshoot <= 4.0 * std::numeric_limits<double>::epsilon())
        return rho > 0.0 ? 1.0 : -1.0;
    throw stats::stats_error(stats::errc::consistency,
                             "oracle correlation magnitude exceeds 1 beyond rounding tolerance: " +
                                 std::to_string(rho));
}

constexpr int sign(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace detail

inline corr_value pearson(series_view a, series_view b) {
    detail::check_pair(a, b);
    const std::size_t n = a.size();
    long double sa = 0.0L, sb = 0.0L, saa = 0.0L, sbb = 0.0L, sab = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double la = a[i];
        const long double lb = b[i];
        sa += la;
        sb += lb;
        saa += la * la;
        sbb += lb * lb;
        sab += la * lb;
    }
    const long double ln = static_cast<long double>(n);
    const long double ma = sa / ln;
    const long double mb = sb / ln;
    const long double va = saa / ln - ma * ma;
    const long double vb = sbb / ln - mb * mb;
    if (va <= 0.0L) return {0.0, undef_reason::zero_variance_left};
    if (vb <= 0.0L) return {0.0, undef_reason::zero_variance_right};
    const long double cov = sab / ln - ma * mb;
    const long double rho = cov / (std::sqrt(va) * std::sqrt(vb));
    return {detail::clamp_unit(static_cast<double>(rho))};
}

inline std::vector<double> ranks(series_view a) {
    const std::size_t n = a.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t less = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            less += a[j] < a[i];
            equal += a[j] == a[i];
        }
        out[i] = static_cast<double>(less) + static_cast<double>(equal + 1) / 2.0;
    }
    return out;
}

inline corr_value spearman(series_view a, series_view b) {
    detail::check_pair(a, b);
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    return pearson(ra, rb);
}

inline corr_value quadrant(series_view a, series_view b) {
    detail::check_pair(a, b);
    const std::size_t n = a.size();
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double center = (static_cast<double>(n) + 1.0) / 2.0;
    long long sum = 0;
    bool any_product = false;
    bool left_all_zero = true;
    bool right_all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        const int sa = detail::sign(ra[i] - center);
        const int sb = detail::sign(rb[i] - center);
        left_all_zero = left_all_zero && sa == 0;
        right_all_zero = right_all_zero && sb == 0;
        const int prod = sa * sb;
        any_product = any_product || prod != 0;
        sum += prod;
    }
    if (!any_product) {
        const auto reason = right_all_zero && !left_all_zero
                                ? undef_reason::zero_variance_right
                                : undef_reason::zero_variance_left;
        return {0.0, reason};
    }
    return {static_cast<double>(sum) / static_cast<double>(n)};
}

} // namespace voxcor::oracle

#endif
