// Command-line front end: analyze, verify (pseudo-oracle differential mode),
// and gsn-check subcommands.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxcor/voxcor.hpp"

namespace fs = std::filesystem;
using namespace voxcor;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_refused = 2;
constexpr int exit_input = 3;
constexpr int exit_internal = 4;
constexpr int exit_discrepancy = 5;
constexpr int exit_gsn_issues = 6;
constexpr int exit_gsn_violated = 7;

struct run_config {
    std::string input;
    std::vector<std::string> ideal_paths;
    std::vector<std::string> out_names{"pearson"};
    std::string prefix = "voxcor";
    bool ack = false;
    std::string workers = "1";
    std::string report_format = "text";
    std::string recheck_prefix;
};

// Everything is written to temporaries and renamed only when the whole run
// succeeded, so a nonzero exit leaves no output files behind.
class output_stager {
public:
    fs::path stage(const fs::path& final) {
        fs::path tmp = final;
        tmp += ".tmp";
        entries_.push_back({tmp, final});
        return tmp;
    }

    void commit() {
        std::size_t done = 0;
        try {
            for (; done < entries_.size(); ++done)
                fs::rename(entries_[done].tmp, entries_[done].final);
        } catch (...) {
            std::error_code ec;
            for (std::size_t i = 0; i < done; ++i) fs::remove(entries_[i].final, ec);
            for (std::size_t i = done; i < entries_.size(); ++i) fs::remove(entries_[i].tmp, ec);
            entries_.clear();
            throw;
        }
        entries_.clear();
    }

    ~output_stager() {
        std::error_code ec;
        for (const auto& e : entries_) fs::remove(e.tmp, ec);
    }

private:
    struct entry {
        fs::path tmp, final;
    };
    std::vector<entry> entries_;
};

std::vector<statistic> requested_statistics(const std::vector<std::string>& names) {
    std::vector<statistic> out;
    for (const auto& name : names) {
        if (name == "all") {
            out = {statistic::pearson, statistic::spearman, statistic::quadrant};
            return out;
        }
        const auto s = parse_statistic(name);
        if (!s) throw error("unknown statistic '" + name + "'");
        out.push_back(*s);
    }
    return out;
}

unsigned parse_workers(const std::string& text) {
    if (text == "auto") return 0;
    const auto n = std::stoul(text);
    if (n == 0) throw error("--workers must be positive or 'auto'");
    return static_cast<unsigned>(n);
}

fs::path map_path(const run_config& cfg, statistic s) {
    return cfg.prefix + "_" + std::string(to_string(s)) + ".nii";
}

void print_report(const report::run_report& rep, const run_config& cfg) {
    if (cfg.report_format == "structured")
        std::cout << report::to_json(rep).dump(2) << "\n";
    else
        std::cout << report::to_text(rep);
}

void write_report_file(const report::run_report& rep, const run_config& cfg,
                       const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("cannot create report file: " + path.string());
    if (cfg.report_format == "structured")
        out << report::to_json(rep).dump(2) << "\n";
    else
        out << report::to_text(rep);
    if (!out) throw error("write failed: " + path.string());
}

fs::path report_path(const run_config& cfg) {
    return cfg.prefix + std::string("_report.") +
           (cfg.report_format == "structured" ? "json" : "txt");
}

report::verify_summary oracle_check(const volume4d& vol,
                                    const std::vector<timeseries::ideal_series>& ideals,
                                    const std::vector<correlation_map>& maps,
                                    double tolerance, bool reselect) {
    report::verify_summary vs;
    vs.tolerance = tolerance;
    std::vector<double> series(vol.nt);
    for (const auto& map : maps) {
        for (std::size_t v = 0; v < map.voxel_count(); ++v) {
            if (!map.defined[v]) continue;
            engine::extract_series(vol, v, series);
            std::size_t e;
            if (reselect) {
                // map files carry no best-ideal channel; re-derive it
                int best = -1;
                double best_abs = -1.0;
                for (std::size_t cand = 0; cand < ideals.size(); ++cand) {
                    const auto rho = oracle::pearson(series, ideals[cand].values);
                    if (rho.defined() && std::fabs(rho.value) > best_abs) {
                        best_abs = std::fabs(rho.value);
                        best = static_cast<int>(cand);
                    }
                }
                if (best < 0) continue;
                e = static_cast<std::size_t>(best);
            } else {
                e = static_cast<std::size_t>(map.best_ideal[v]);
            }
            corr_value ref;
            switch (map.stat) {
                case statistic::pearson: ref = oracle::pearson(series, ideals[e].values); break;
                case statistic::spearman: ref = oracle::spearman(series, ideals[e].values); break;
                case statistic::quadrant: ref = oracle::quadrant(series, ideals[e].values); break;
            }
            double disc;
            if (!ref.defined()) {
                disc = std::numeric_limits<double>::infinity();
            } else {
                const double denom =
                    std::max({1.0, std::fabs(map.values[v]), std::fabs(ref.value)});
                disc = std::fabs(map.values[v] - ref.value) / denom;
            }
            ++vs.compared;
            if (disc > vs.max_discrepancy) vs.max_discrepancy = disc;
            if (disc > tolerance && !vs.has_violation) {
                vs.has_violation = true;
                vs.violation_stat = map.stat;
                vs.violation_index = {v % map.nx, (v / map.nx) % map.ny, v / (map.nx * map.ny)};
            }
        }
    }
    vs.agreement = !vs.has_violation;
    return vs;
}

std::vector<correlation_map> load_maps_for_recheck(const run_config& cfg,
                                                   const std::vector<statistic>& stats_list,
                                                   const volume4d& input) {
    std::vector<correlation_map> maps;
    for (const auto s : stats_list) {
        const fs::path path = cfg.recheck_prefix + "_" + std::string(to_string(s)) + ".nii";
        const auto vol = nifti::read_volume(path);
        if (vol.nx != input.nx || vol.ny != input.ny || vol.nz != input.nz)
            throw nifti::parse_error(nifti::errc::dim_mismatch,
                                     "map " + path.string() + " does not match the input volume");
        correlation_map map;
        map.nx = vol.nx;
        map.ny = vol.ny;
        map.nz = vol.nz;
        map.stat = s;
        map.values = vol.samples;
        map.defined.assign(map.voxel_count(), 1);
        map.best_ideal.assign(map.voxel_count(), 0);

        std::ifstream side(nifti::sidecar_path(path));
        if (!side)
            throw nifti::parse_error(nifti::errc::io_failure,
                                     "missing sidecar for " + path.string());
        std::size_t i, j, k;
        while (side >> i >> j >> k) {
            if (i >= map.nx || j >= map.ny || k >= map.nz)
                throw nifti::parse_error(nifti::errc::index_out_of_range,
                                         "sidecar index outside the map: " +
                                             nifti::sidecar_path(path).string());
            map.defined[map.linear(i, j, k)] = 0;
            map.best_ideal[map.linear(i, j, k)] = -1;
        }
        maps.push_back(std::move(map));
    }
    return maps;
}

int run_pipeline(const run_config& cfg, bool verify_mode) {
    std::cout << guard::warning_text();

    volume4d vol;
    nifti::header input_header;
    std::vector<timeseries::ideal_series> ideals;
    try {
        input_header = nifti::read_header(cfg.input);
        vol = nifti::read_volume(cfg.input);
        for (const auto& p : cfg.ideal_paths) ideals.push_back(timeseries::read_1d(p));
    } catch (const error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    }

    report::run_report rep;
    rep.input_path = cfg.input;
    rep.dims = {vol.nx, vol.ny, vol.nz, vol.nt};
    for (const auto& s : ideals) rep.ideal_labels.push_back(s.label);
    rep.notes.push_back(report::quadrant_note());
    rep.notes.push_back("best ideal per voxel: largest |pearson rho|, ties to the lowest "
                        "ideal index");

    rep.assumptions = guard::check_inputs(vol, ideals, cfg.ack);
    if (!rep.assumptions.proceed()) {
        print_report(rep, cfg);
        write_report_file(rep, cfg, report_path(cfg));
        std::cerr << "refusing to proceed: operational assumptions not satisfied\n";
        return exit_refused;
    }

    const auto stats_list = requested_statistics(cfg.out_names);
    engine::analyze_options opt;
    opt.statistics = stats_list;
    opt.workers = parse_workers(cfg.workers);

    std::vector<correlation_map> maps;
    const bool recheck = verify_mode && !cfg.recheck_prefix.empty();
    try {
        if (recheck)
            maps = load_maps_for_recheck(cfg, stats_list, vol);
        else
            maps = engine::analyze(vol, ideals, rep.assumptions, opt);
    } catch (const engine::engine_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const nifti::parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    }

    for (const auto& map : maps) {
        report::map_summary ms;
        ms.stat = map.stat;
        ms.nx = map.nx;
        ms.ny = map.ny;
        ms.nz = map.nz;
        ms.defined = map.defined_count();
        ms.undefined = map.voxel_count() - ms.defined;
        if (ms.defined > 0) ms.extrema = engine::extrema(map);
        rep.maps.push_back(std::move(ms));
    }

    if (verify_mode) {
        // float32 map files quantize values; widen the gate accordingly
        const double tolerance = recheck ? 1e-6 : 1e-12;
        rep.oracle = oracle_check(vol, ideals, maps, tolerance, recheck);
        rep.analysis_completed = true;
        print_report(rep, cfg);
        write_report_file(rep, cfg, report_path(cfg));
        if (!rep.oracle->agreement) {
            std::cerr << "oracle disagreement above tolerance\n";
            return exit_discrepancy;
        }
        return exit_ok;
    }

    output_stager stager;
    for (std::size_t m = 0; m < maps.size(); ++m) {
        const auto final_map = map_path(cfg, maps[m].stat);
        const auto final_side = nifti::sidecar_path(final_map);
        const auto tmp_map = stager.stage(final_map);
        const auto tmp_side = stager.stage(final_side);
        nifti::write_map(maps[m], input_header, tmp_map, tmp_side);
        rep.maps[m].path = final_map.string();
        rep.maps[m].sidecar = final_side.string();
    }
    rep.analysis_completed = true;
    write_report_file(rep, cfg, stager.stage(report_path(cfg)));
    stager.commit();

    print_report(rep, cfg);
    return exit_ok;
}

int run_gsn_check(const std::string& case_path, const std::string& results_path,
                  const std::string& emit_prefix) {
    std::ifstream in(case_path);
    if (!in) {
        std::cerr << "input error: cannot open case file: " << case_path << "\n";
        return exit_input;
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    gsn::assurance_case c;
    try {
        c = gsn::parse_case(buf.str());
    } catch (const gsn::gsn_error& e) {
        std::cerr << "case parse error: " << e.what() << "\n";
        return exit_input;
    }

    const auto issues = gsn::validate(c);
    std::size_t errors = 0;
    for (const auto& i : issues) {
        errors += i.severity == gsn::issue_severity::error;
        std::cout << (i.severity == gsn::issue_severity::error ? "issue" : "warning") << " ["
                  << gsn::to_string(i.kind) << "] " << i.message << "\n";
    }
    std::cout << "nodes: " << c.nodes.size() << ", issues: " << errors
              << ", warnings: " << issues.size() - errors << "\n";

    gsn::link_summary summary;
    if (!results_path.empty()) {
        std::map<std::string, bool> keys;
        try {
            std::ifstream rin(results_path);
            if (!rin) throw error("cannot open results file: " + results_path);
            nlohmann::json doc;
            rin >> doc;
            keys = report::load_results_keys(doc);
        } catch (const std::exception& e) {
            std::cerr << "results error: " << e.what() << "\n";
            return exit_input;
        }
        summary = gsn::link_evidence(c, keys);
        for (const auto& [label, status] : summary.evidence)
            std::cout << "evidence " << label << ": " << gsn::to_string(status) << "\n";
        std::cout << "evidence summary: " << summary.satisfied << " satisfied, "
                  << summary.violated << " violated, " << summary.missing << " missing, "
                  << summary.unkeyed << " unkeyed\n";
    }

    if (!emit_prefix.empty()) {
        nlohmann::json doc;
        doc["nodes"] = nlohmann::json::array();
        for (const auto& n : c.nodes) {
            nlohmann::json jn{{"label", n.label},
                              {"kind", gsn::to_string(n.kind)},
                              {"statement", n.statement},
                              {"supports", n.supports}};
            if (!n.evidence_key.empty()) jn["key"] = n.evidence_key;
            const auto it = summary.evidence.find(n.label);
            if (it != summary.evidence.end()) jn["link"] = gsn::to_string(it->second);
            doc["nodes"].push_back(std::move(jn));
        }
        doc["issues"] = nlohmann::json::array();
        for (const auto& i : issues)
            doc["issues"].push_back(
                {{"kind", gsn::to_string(i.kind)},
                 {"severity", i.severity == gsn::issue_severity::error ? "error" : "warning"},
                 {"message", i.message}});
        doc["summary"] = {{"satisfied", summary.satisfied},
                          {"violated", summary.violated},
                          {"missing", summary.missing},
                          {"unkeyed", summary.unkeyed}};
        std::ofstream jout(emit_prefix + ".json", std::ios::trunc);
        jout << doc.dump(2) << "\n";
        std::ofstream dout(emit_prefix + ".dot", std::ios::trunc);
        dout << gsn::to_dot(c, &summary);
        if (!jout || !dout) throw error("failed writing annotated case files");
    }

    if (errors > 0) return exit_gsn_issues;
    if (summary.violated > 0) return exit_gsn_violated;
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxel-wise correlation maps with guarded assumptions, a pseudo-oracle "
                 "differential mode, and assurance-case checking"};
    app.require_subcommand(1);

    run_config cfg;
    std::string case_path, results_path, emit_prefix;

    const auto add_pipeline_flags = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "4-D NIfTI-1 volume (.nii)")->required();
        sub->add_option("--ideal", cfg.ideal_paths,
                        "ideal time series file (.1D); repeatable, order = ideal index")
            ->required();
        sub->add_option("--out", cfg.out_names,
                        "statistic to map: pearson|spearman|quadrant|all (repeatable)");
        sub->add_option("--prefix", cfg.prefix, "output path prefix");
        sub->add_flag("--ack-assumptions", cfg.ack,
                      "acknowledge the user obligations named in the warning");
        sub->add_option("--workers", cfg.workers, "worker threads (positive integer or 'auto')");
        sub->add_option("--report", cfg.report_format, "report format: text|structured")
            ->check(CLI::IsMember({"text", "structured"}));
    };

    auto* analyze = app.add_subcommand("analyze", "compute and write correlation maps");
    add_pipeline_flags(analyze);

    auto* verify = app.add_subcommand(
        "verify", "recompute every map value with the independent pseudo-oracle");
    add_pipeline_flags(verify);
    verify->add_option("--recheck", cfg.recheck_prefix,
                       "verify previously written map files under this prefix instead of "
                       "in-memory results");

    auto* gsn_check = app.add_subcommand("gsn-check", "validate an assurance case and link "
                                                      "evidence to run results");
    gsn_check->add_option("--case", case_path, "GSN case file")->required();
    gsn_check->add_option("--results", results_path,
                          "structured run report or flat key->bool JSON");
    gsn_check->add_option("--emit", emit_prefix, "write annotated <prefix>.json and <prefix>.dot");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(analyze)) return run_pipeline(cfg, false);
        if (app.got_subcommand(verify)) return run_pipeline(cfg, true);
        return run_gsn_check(case_path, results_path, emit_prefix);
    } catch (const stats::stats_error& e) {
        std::cerr << "internal consistency error: " << e.what() << "\n";
        return exit_internal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_internal;
    }
}
