#ifndef VOXCOR_ASSUMPTIONS_HPP
#define VOXCOR_ASSUMPTIONS_HPP

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "voxcor/nifti.hpp"
#include "voxcor/timeseries.hpp"
#include "voxcor/types.hpp"

namespace voxcor::guard {

enum class check_kind { machine, user_obligation };
enum class check_status { pass, fail, acknowledged, unacknowledged };
enum class run_verdict { proceed, refuse };

constexpr std::string_view to_string(check_kind k) {
    return k == check_kind::machine ? "machine" : "user-obligation";
}

constexpr std::string_view to_string(check_status s) {
    switch (s) {
        case check_status::pass: return "pass";
        case check_status::fail: return "fail";
        case check_status::acknowledged: return "acknowledged";
        case check_status::unacknowledged: return "unacknowledged";
    }
    return "unknown";
}

constexpr std::string_view to_string(run_verdict v) {
    return v == run_verdict::proceed ? "proceed" : "refuse";
}

struct assumption_check {
    std::string id;
    check_kind kind = check_kind::machine;
    check_status status = check_status::fail;
    std::string detail;

    bool ok() const {
        return status == check_status::pass || status == check_status::acknowledged;
    }
};

struct assumption_report {
    std::vector<assumption_check> checks;
    run_verdict verdict = run_verdict::refuse;

    bool proceed() const { return verdict == run_verdict::proceed; }

    const assumption_check* find(std::string_view id) const {
        for (const auto& c : checks)
            if (c.id == id) return &c;
        return nullptr;
    }
};

// Statements of the operational assumptions behind the parametric model.
inline constexpr std::string_view assumption_a1 =
    "The variables should be either of type interval or ratio.";
inline constexpr std::string_view assumption_a2 =
    "There is a linear relationship between the two variables.";
inline constexpr std::string_view assumption_a3 =
    "The variables are bivariately normally distributed.";

/// Fixed reminder printed on every run. Names the three assumptions and
/// states what the software cannot decide for the user.
inline std::string_view warning_text() {
    static const std::string text = [] {
        std::string t;
        t += "---------------- OPERATIONAL ASSUMPTIONS ----------------\n";
        t += "The correlation statistics computed here rest on a parametric\n";
        t += "statistical model with these operational assumptions:\n";
        t += "  A1: ";
        t += assumption_a1;
        t += "\n  A2: ";
        t += assumption_a2;
        t += "\n  A3: ";
        t += assumption_a3;
        t += "\n";
        t += "Conditions open to automation (for example, that the measured\n";
        t += "activities are positive) are checked before any computation, but\n";
        t += "this software can never tell whether a parametric model is the\n";
        t += "right choice for your data. Judging that, and assumptions A1-A3,\n";
        t += "remains the user's responsibility; if a non-parametric model is\n";
        t += "more appropriate, use a different tool. Record acceptance of\n";
        t += "these obligations with --ack-assumptions.\n";
        t += "----------------------------------------------------------\n";
        return t;
    }();
    return text;
}

/// Run every operational-assumption check against parsed inputs. Machine
/// checks pass or fail on the data; the A1-A3 user obligations are only ever
/// acknowledged or unacknowledged. Refusal is a verdict, not an exception.
inline assumption_report check_inputs(const volume4d& volume,
                                      const std::vector<timeseries::ideal_series>& ideals,
                                      bool acknowledged) {
    assumption_report report;

    {
        assumption_check c{"GA.1.positivity", check_kind::machine, check_status::pass, {}};
        const std::size_t n = volume.sample_count();
        std::size_t bad = n;
        for (std::size_t s = 0; s < n; ++s) {
            if (!(volume.samples[s] > 0.0)) {
                bad = s;
                break;
            }
        }
        if (bad != n) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "sample %g at ", volume.samples[bad]);
            c.status = check_status::fail;
            c.detail = buf + nifti::detail::index4_text(bad, volume.nx, volume.ny, volume.nz);
        } else {
            c.detail = "all " + std::to_string(n) + " samples positive";
        }
        report.checks.push_back(std::move(c));
    }

    {
        assumption_check c{"GA.1.ideal_length", check_kind::machine, check_status::pass, {}};
        std::size_t mismatched = 0;
        for (std::size_t e = 0; e < ideals.size(); ++e) {
            if (ideals[e].values.size() == volume.nt) continue;
            ++mismatched;
            if (c.status == check_status::pass) {
                c.status = check_status::fail;
                c.detail = "ideal '" + ideals[e].label + "' (index " + std::to_string(e) +
                           ") has " + std::to_string(ideals[e].values.size()) +
                           " points, volume has " + std::to_string(volume.nt) + " frames";
            }
        }
        if (c.status == check_status::pass)
            c.detail = "every ideal matches the " + std::to_string(volume.nt) + "-frame volume";
        else if (mismatched > 1)
            c.detail += " (+" + std::to_string(mismatched - 1) + " more)";
        report.checks.push_back(std::move(c));
    }

    {
        assumption_check c{"GA.1.min_frames", check_kind::machine, check_status::pass, {}};
        if (volume.nt < 2) {
            c.status = check_status::fail;
            c.detail = "volume has " + std::to_string(volume.nt) +
                       " frame(s); correlation needs at least 2";
        } else {
            c.detail = std::to_string(volume.nt) + " frames";
        }
        report.checks.push_back(std::move(c));
    }

    {
        assumption_check c{"GA.1.ideal_count", check_kind::machine, check_status::pass, {}};
        if (ideals.empty()) {
            c.status = check_status::fail;
            c.detail = "no ideal time series supplied";
        } else {
            c.detail = std::to_string(ideals.size()) + " ideal(s) supplied";
        }
        report.checks.push_back(std::move(c));
    }

    const auto obligation = acknowledged ? check_status::acknowledged
                                         : check_status::unacknowledged;
    report.checks.push_back({"GA.2.interval_ratio", check_kind::user_obligation, obligation,
                             std::string(assumption_a1)});
    report.checks.push_back({"GA.2.linearity", check_kind::user_obligation, obligation,
                             std::string(assumption_a2)});
    report.checks.push_back({"GA.2.normality", check_kind::user_obligation, obligation,
                             std::string(assumption_a3)});

    bool all_ok = true;
    for (const auto& c : report.checks) all_ok = all_ok && c.ok();
    report.verdict = all_ok ? run_verdict::proceed : run_verdict::refuse;
    return report;
}

} // namespace voxcor::guard

#endif
