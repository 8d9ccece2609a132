#ifndef VOXCOR_TYPES_HPP
#define VOXCOR_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace voxcor {

inline constexpr std::string_view tool_name = "voxcor";
inline constexpr std::string_view tool_version = "0.1.0";

/// Base class of every error thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

enum class statistic { pearson, spearman, quadrant };

constexpr std::string_view to_string(statistic s) {
    switch (s) {
        case statistic::pearson: return "pearson";
        case statistic::spearman: return "spearman";
        case statistic::quadrant: return "quadrant";
    }
    return "unknown";
}

inline std::optional<statistic> parse_statistic(std::string_view name) {
    if (name == "pearson") return statistic::pearson;
    if (name == "spearman") return statistic::spearman;
    if (name == "quadrant") return statistic::quadrant;
    return std::nullopt;
}

/// Why a correlation value could not be computed.
enum class undef_reason { zero_variance_left, zero_variance_right, too_short };

constexpr std::string_view to_string(undef_reason r) {
    switch (r) {
        case undef_reason::zero_variance_left: return "zero-variance-left";
        case undef_reason::zero_variance_right: return "zero-variance-right";
        case undef_reason::too_short: return "too-short";
    }
    return "unknown";
}

/// A correlation coefficient in [-1, 1], or undefined with a reason.
struct corr_value {
    double value = 0.0;
    std::optional<undef_reason> undefined{};

    bool defined() const { return !undefined.has_value(); }
};

namespace stats {

enum class errc { length_mismatch, too_short, element_absent, consistency };

class stats_error : public error {
public:
    stats_error(errc code, const std::string& what) : error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

} // namespace stats

/// One statistic evaluated at every voxel of a 3-D grid. Voxels where the
/// statistic is undefined carry value 0 and a cleared `defined` flag.
struct correlation_map {
    std::size_t nx = 0, ny = 0, nz = 0;
    statistic stat = statistic::pearson;
    std::vector<double> values;           // x fastest, then y, then z
    std::vector<std::uint8_t> defined;
    std::vector<std::int32_t> best_ideal; // per-voxel ideal index, -1 when undefined

    std::size_t voxel_count() const { return nx * ny * nz; }

    std::size_t linear(std::size_t i, std::size_t j, std::size_t k) const {
        return i + nx * (j + ny * k);
    }

    std::size_t defined_count() const {
        std::size_t n = 0;
        for (auto f : defined) n += f != 0;
        return n;
    }
};

} // namespace voxcor

#endif
