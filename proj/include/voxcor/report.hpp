#ifndef VOXCOR_REPORT_HPP
#define VOXCOR_REPORT_HPP

#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxcor/assumptions.hpp"
#include "voxcor/engine.hpp"
#include "voxcor/types.hpp"

namespace voxcor::report {

struct map_summary {
    statistic stat = statistic::pearson;
    std::string path;    // empty when the map was not written to disk
    std::string sidecar;
    std::size_t nx = 0, ny = 0, nz = 0;
    std::size_t defined = 0, undefined = 0;
    std::optional<engine::extrema_report> extrema;
};

struct verify_summary {
    double max_discrepancy = 0.0;
    double tolerance = 1e-12;
    std::size_t compared = 0;
    bool agreement = false;
    // first value above tolerance, when any
    bool has_violation = false;
    statistic violation_stat = statistic::pearson;
    std::array<std::size_t, 3> violation_index{};
};

struct run_report {
    std::string input_path;
    std::array<std::size_t, 4> dims{}; // nx, ny, nz, nt
    std::vector<std::string> ideal_labels;
    guard::assumption_report assumptions;
    std::vector<map_summary> maps;
    std::optional<verify_summary> oracle;
    bool analysis_completed = false;
    std::vector<std::string> notes;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string index_text(const std::array<std::size_t, 3>& i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%zu,%zu,%zu) (one-based (%zu,%zu,%zu))", i[0], i[1], i[2],
                  i[0] + 1, i[1] + 1, i[2] + 1);
    return buf;
}

} // namespace detail

/// The note every report carries about the quadrant statistic: its formula is
/// an interpretation, not a published definition.
inline std::string quadrant_note() {
    return "quadrant statistic: median-centered sign correlation over tie-averaged ranks; "
           "this rank-based definition is an interpretation chosen by this tool";
}

inline std::string convention_note() {
    return std::string("voxel storage convention assumed: x ") +
           std::string(storage_convention.x_sense) + ", y " +
           std::string(storage_convention.y_sense) + ", z " +
           std::string(storage_convention.z_sense) + "; indices zero-based";
}

/// Keys exposed to GSN evidence linking.
inline std::map<std::string, bool> gsn_keys(const run_report& r) {
    std::map<std::string, bool> keys;
    for (const auto& c : r.assumptions.checks) keys[c.id] = c.ok();
    keys["assumptions.verdict"] = r.assumptions.proceed();
    keys["analysis.completed"] = r.analysis_completed;
    if (r.oracle) keys["oracle.agreement"] = r.oracle->agreement;
    return keys;
}

inline std::string to_text(const run_report& r) {
    std::string out;
    out += std::string(tool_name) + " " + std::string(tool_version) + " run report\n";
    out += convention_note() + "\n";
    out += "input: " + r.input_path + " dims " + std::to_string(r.dims[0]) + "x" +
           std::to_string(r.dims[1]) + "x" + std::to_string(r.dims[2]) + " x " +
           std::to_string(r.dims[3]) + " frames\n";
    out += "ideals:";
    for (std::size_t e = 0; e < r.ideal_labels.size(); ++e)
        out += " [" + std::to_string(e) + "] " + r.ideal_labels[e];
    out += "\n\nassumption checks:\n";
    for (const auto& c : r.assumptions.checks) {
        out += "  [" + std::string(guard::to_string(c.status)) + "] " + c.id + " (" +
               std::string(guard::to_string(c.kind)) + "): " + c.detail + "\n";
    }
    out += "verdict: " + std::string(guard::to_string(r.assumptions.verdict)) + "\n";

    for (const auto& m : r.maps) {
        out += "\nmap " + std::string(to_string(m.stat)) + ": " + std::to_string(m.nx) + "x" +
               std::to_string(m.ny) + "x" + std::to_string(m.nz) + ", defined " +
               std::to_string(m.defined) + ", undefined " + std::to_string(m.undefined) + "\n";
        if (!m.path.empty()) {
            out += "  file: " + m.path + "\n";
            out += "  undefined-voxel sidecar: " + m.sidecar + "\n";
        }
        if (m.extrema) {
            out += "  max " + detail::fmt("%+.6f", m.extrema->max_value) + " at " +
                   detail::index_text(m.extrema->max_index) + " - " + m.extrema->max_anatomical +
                   "\n";
            out += "  min " + detail::fmt("%+.6f", m.extrema->min_value) + " at " +
                   detail::index_text(m.extrema->min_index) + " - " + m.extrema->min_anatomical +
                   "\n";
        }
    }

    if (r.oracle) {
        out += "\noracle differential check:\n";
        out += "  values compared: " + std::to_string(r.oracle->compared) + "\n";
        out += "  max relative discrepancy: " + detail::fmt("%.3e", r.oracle->max_discrepancy) +
               " (tolerance " + detail::fmt("%.1e", r.oracle->tolerance) + ")\n";
        out += std::string("  agreement: ") + (r.oracle->agreement ? "yes" : "NO") + "\n";
        if (r.oracle->has_violation)
            out += "  first violation: statistic " +
                   std::string(to_string(r.oracle->violation_stat)) + " at voxel " +
                   detail::index_text(r.oracle->violation_index) + "\n";
    }

    if (!r.notes.empty()) {
        out += "\nnotes:\n";
        for (const auto& n : r.notes) out += "  - " + n + "\n";
    }
    return out;
}

inline nlohmann::json to_json(const run_report& r) {
    nlohmann::json j;
    j["tool"] = {{"name", tool_name}, {"version", tool_version}};
    j["orientation"] = {{"x", storage_convention.x_sense},
                        {"y", storage_convention.y_sense},
                        {"z", storage_convention.z_sense},
                        {"indexing", "zero-based"}};
    j["input"] = {{"volume", r.input_path}, {"dims", r.dims}, {"ideals", r.ideal_labels}};

    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.assumptions.checks)
        checks.push_back({{"id", c.id},
                          {"kind", guard::to_string(c.kind)},
                          {"status", guard::to_string(c.status)},
                          {"detail", c.detail}});
    j["assumptions"] = {{"verdict", guard::to_string(r.assumptions.verdict)},
                        {"checks", std::move(checks)}};

    nlohmann::json maps = nlohmann::json::array();
    for (const auto& m : r.maps) {
        nlohmann::json e;
        e["statistic"] = to_string(m.stat);
        e["dims"] = {m.nx, m.ny, m.nz};
        e["defined"] = m.defined;
        e["undefined"] = m.undefined;
        if (!m.path.empty()) {
            e["path"] = m.path;
            e["sidecar"] = m.sidecar;
        }
        if (m.extrema) {
            e["extrema"] = {{"min",
                             {{"value", m.extrema->min_value},
                              {"index", m.extrema->min_index},
                              {"anatomical", m.extrema->min_anatomical}}},
                            {"max",
                             {{"value", m.extrema->max_value},
                              {"index", m.extrema->max_index},
                              {"anatomical", m.extrema->max_anatomical}}}};
        }
        maps.push_back(std::move(e));
    }
    j["maps"] = std::move(maps);

    if (r.oracle) {
        j["oracle"] = {{"max_discrepancy", r.oracle->max_discrepancy},
                       {"tolerance", r.oracle->tolerance},
                       {"compared", r.oracle->compared},
                       {"agreement", r.oracle->agreement}};
        if (r.oracle->has_violation) {
            j["oracle"]["first_violation"] = {{"statistic", to_string(r.oracle->violation_stat)},
                                              {"index", r.oracle->violation_index}};
        }
    }
    j["analysis_completed"] = r.analysis_completed;
    j["notes"] = r.notes;
    j["gsn_keys"] = gsn_keys(r);
    return j;
}

/// Extract evidence-link keys from a results document: either a structured
/// run report (its "gsn_keys" object) or a flat {"key": bool} map.
inline std::map<std::string, bool> load_results_keys(const nlohmann::json& doc) {
    std::map<std::string, bool> keys;
    const nlohmann::json* source = &doc;
    if (doc.is_object() && doc.contains("gsn_keys")) source = &doc.at("gsn_keys");
    if (!source->is_object())
        throw error("results document must be a JSON object of key -> boolean");
    for (const auto& [k, v] : source->items()) {
        if (v.is_boolean()) keys[k] = v.get<bool>();
    }
    return keys;
}

} // namespace voxcor::report

#endif
