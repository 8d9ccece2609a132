#ifndef VOXCOR_STATS_HPP
#define VOXCOR_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "voxcor/types.hpp"

namespace voxcor::stats {

using series_view = std::span<const double>;

namespace detail {

inline void check_pair(series_view a, series_view b) {
    if (a.size() != b.size())
        throw stats_error(errc::length_mismatch,
                          "series lengths differ: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    if (a.size() < 2)
        throw stats_error(errc::too_short,
                          "correlation needs at least 2 samples, got " + std::to_string(a.size()));
}

// Coefficients may overshoot [-1,1] by a few ulp through rounding; anything
// larger is a genuine defect and must not be masked.
inline double clamp_unit(double rho) {
    const double overshoot = std::fabs(rho) - 1.0;
    if (overshoot <= 0.0) return rho;
    if (overshoot <= 4.0 * std::numeric_limits<double>::epsilon())
        return rho > 0.0 ? 1.0 : -1.0;
    throw stats_error(errc::consistency,
                      "correlation magnitude exceeds 1 beyond rounding tolerance: " +
                          std::to_string(rho));
}

constexpr int sign(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace detail

/// Sample mean.
inline double mean(series_view a) {
    if (a.empty())
        throw stats_error(errc::too_short, "mean needs at least one value");
    double sum = 0.0;
    for (double v : a) sum += v;
    return sum / static_cast<double>(a.size());
}

/// Nondecreasing copy of the input (same multiset of values).
inline std::vector<double> sort(series_view a) {
    std::vector<double> out(a.begin(), a.end());
    std::sort(out.begin(), out.end());
    return out;
}

/// Number of elements exactly equal to `probe`.
inline std::size_t count(double probe, series_view a) {
    return static_cast<std::size_t>(std::count(a.begin(), a.end(), probe));
}

/// 1-based positions of `probe` within an already-sorted series. Empty when
/// the value does not occur.
inline std::vector<std::size_t> index_set(double probe, series_view sorted) {
    const auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), probe);
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(hi - lo));
    for (auto it = lo; it != hi; ++it)
        out.push_back(static_cast<std::size_t>(it - sorted.begin()) + 1);
    return out;
}

/// Rank of one value: the mean of its 1-based positions in the sorted series,
/// so tied values share the average of the tied positions.
inline double rank(double a, series_view series) {
    const auto sorted = sort(series);
    const auto positions = index_set(a, sorted);
    if (positions.empty())
        throw stats_error(errc::element_absent, "rank: value does not occur in the series");
    double sum = 0.0;
    for (auto p : positions) sum += static_cast<double>(p);
    return sum / static_cast<double>(positions.size());
}

/// Ranks of all elements; element i equals rank(a[i], a).
inline std::vector<double> ranks(series_view a) {
    const std::size_t n = a.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return a[l] < a[r]; });

    std::vector<double> out(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && a[order[j + 1]] == a[order[i]]) ++j;
        // tied values occupy 1-based positions i+1 .. j+1; all get the average
        double sum = 0.0;
        for (std::size_t p = i + 1; p <= j + 1; ++p) sum += static_cast<double>(p);
        const double r = sum / static_cast<double>(j - i + 1);
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = r;
        i = j + 1;
    }
    return out;
}

/// Pearson correlation coefficient, computed in two passes: means first, then
/// centered sums of squares and products.
inline corr_value pearson(series_view a, series_view b) {
    detail::check_pair(a, b);
    const std::size_t n = a.size();
    const double ma = mean(a);
    const double mb = mean(b);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0) return {0.0, undef_reason::zero_variance_left};
    if (sbb == 0.0) return {0.0, undef_reason::zero_variance_right};
    return {detail::clamp_unit(sab / std::sqrt(saa * sbb))};
}

/// Spearman correlation: Pearson applied to the tie-averaged ranks.
inline corr_value spearman(series_view a, series_view b) {
    detail::check_pair(a, b);
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    return pearson(ra, rb);
}

/// Quadrant correlation: mean product of the signs of rank deviations from
/// the central rank (n+1)/2, with sign(0) = 0. Undefined when every sign
/// product vanishes.
inline corr_value quadrant(series_view a, series_view b) {
    detail::check_pair(a, b);
    const std::size_t n = a.size();
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double center = (static_cast<double>(n) + 1.0) / 2.0;
    double sum = 0.0;
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
        // attribute to the left operand when neither side alone explains it
        const auto reason = right_all_zero && !left_all_zero
                                ? undef_reason::zero_variance_right
                                : undef_reason::zero_variance_left;
        return {0.0, reason};
    }
    return {sum / static_cast<double>(n)};
}

} // namespace voxcor::stats

#endif
