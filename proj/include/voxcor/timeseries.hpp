#ifndef VOXCOR_TIMESERIES_HPP
#define VOXCOR_TIMESERIES_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "voxcor/types.hpp"

namespace voxcor::timeseries {

enum class errc { empty_series, non_numeric_token, constant_series, non_finite_value, io_failure };

class parse_error : public error {
public:
    parse_error(errc code, const std::string& what, std::size_t line = 0)
        : error(what), code_(code), line_(line) {}
    errc code() const { return code_; }
    std::size_t line() const { return line_; } // 1-based, 0 when not tied to a line

private:
    errc code_;
    std::size_t line_;
};

/// A user-supplied reference time series (the "ideal" signal).
struct ideal_series {
    std::string label;
    std::vector<double> values;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

} // namespace detail

/// One real value per non-empty, non-comment ('#') line; order preserved.
/// Constant series are rejected outright: a correlation against them is
/// undefined everywhere.
inline ideal_series parse_1d(std::string_view text, std::string label = {}) {
    ideal_series out{std::move(label), {}};
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto tok = detail::trim(raw);
        if (tok.empty() || tok.front() == '#') continue;
        if (tok.front() == '+') tok.remove_prefix(1); // from_chars takes no leading '+'

        double value = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (res.ec == std::errc::result_out_of_range)
            throw parse_error(errc::non_finite_value,
                              "value out of range at line " + std::to_string(line_no), line_no);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw parse_error(errc::non_numeric_token,
                              "non-numeric token '" + std::string(tok) + "' at line " +
                                  std::to_string(line_no),
                              line_no);
        if (!std::isfinite(value))
            throw parse_error(errc::non_finite_value,
                              "non-finite value at line " + std::to_string(line_no), line_no);
        out.values.push_back(value);
    }

    if (out.values.empty())
        throw parse_error(errc::empty_series, "series holds no values");
    bool constant = true;
    for (double v : out.values) constant = constant && v == out.values.front();
    if (constant)
        throw parse_error(errc::constant_series,
                          "series is constant; correlation against it is undefined");
    return out;
}

inline ideal_series read_1d(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw parse_error(errc::io_failure, "cannot open ideal file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_1d(buf.str(), path.stem().string());
}

/// Inverse of parse_1d for valid series: one value per line, round-trip exact.
inline std::string render(const ideal_series& series) {
    std::string out;
    char buf[48];
    for (double v : series.values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
        out += '\n';
    }
    return out;
}

} // namespace voxcor::timeseries

#endif
