#ifndef VOXCOR_ENGINE_HPP
#define VOXCOR_ENGINE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "voxcor/assumptions.hpp"
#include "voxcor/nifti.hpp"
#include "voxcor/stats.hpp"
#include "voxcor/timeseries.hpp"
#include "voxcor/types.hpp"

namespace voxcor::engine {

enum class errc { no_defined_voxels, guard_not_passed };

class engine_error : public error {
public:
    engine_error(errc code, const std::string& what) : error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

struct analyze_options {
    std::vector<statistic> statistics{statistic::pearson};
    unsigned workers = 1; // 0 = one per hardware thread
};

struct extrema_report {
    double min_value = 0.0, max_value = 0.0;
    std::array<std::size_t, 3> min_index{}, max_index{};
    std::string min_anatomical, max_anatomical;
};

/// Copy the time series of one voxel (stride nx*ny*nz through the samples).
inline void extract_series(const volume4d& vol, std::size_t voxel, std::span<double> out) {
    const std::size_t stride = vol.spatial_count();
    for (std::size_t t = 0; t < vol.nt; ++t) out[t] = vol.samples[voxel + t * stride];
}

namespace detail {

// requested statistics in canonical order, deduplicated
inline std::vector<statistic> canonical_statistics(const std::vector<statistic>& requested) {
    std::vector<statistic> out;
    for (auto s : {statistic::pearson, statistic::spearman, statistic::quadrant}) {
        for (auto r : requested) {
            if (r == s) {
                out.push_back(s);
                break;
            }
        }
    }
    return out;
}

} // namespace detail

/// Correlate every voxel against every ideal, select the best ideal per voxel
/// (largest |Pearson rho|, ties to the lowest ideal index), and evaluate each
/// requested statistic between the voxel series and its best ideal. Voxels
/// are independent, so results are identical for any worker count.
inline std::vector<correlation_map> analyze(const volume4d& vol,
                                            const std::vector<timeseries::ideal_series>& ideals,
                                            const guard::assumption_report& clearance,
                                            const analyze_options& opt = {}) {
    if (!clearance.proceed())
        throw engine_error(errc::guard_not_passed,
                           "operational-assumption checks did not pass; analysis refused");
    const auto stats_list = detail::canonical_statistics(opt.statistics);
    if (stats_list.empty())
        throw error("no statistics requested");

    const std::size_t nvox = vol.spatial_count();
    std::vector<correlation_map> maps(stats_list.size());
    for (std::size_t m = 0; m < maps.size(); ++m) {
        maps[m].nx = vol.nx;
        maps[m].ny = vol.ny;
        maps[m].nz = vol.nz;
        maps[m].stat = stats_list[m];
        maps[m].values.assign(nvox, 0.0);
        maps[m].defined.assign(nvox, 0);
        maps[m].best_ideal.assign(nvox, -1);
    }

    unsigned workers = opt.workers != 0 ? opt.workers : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > nvox && nvox > 0) workers = static_cast<unsigned>(nvox);

    std::vector<std::uint8_t> chunk_found(workers, 0);
    std::vector<std::exception_ptr> chunk_error(workers);

    const auto run_chunk = [&](unsigned w, std::size_t lo, std::size_t hi) {
        try {
            std::vector<double> series(vol.nt);
            for (std::size_t v = lo; v < hi; ++v) {
                extract_series(vol, v, series);
                std::int32_t best = -1;
                double best_abs = -1.0;
                corr_value best_rho{};
                for (std::size_t e = 0; e < ideals.size(); ++e) {
                    const auto rho = stats::pearson(series, ideals[e].values);
                    if (!rho.defined()) continue;
                    const double mag = std::fabs(rho.value);
                    if (mag > best_abs) {
                        best_abs = mag;
                        best = static_cast<std::int32_t>(e);
                        best_rho = rho;
                    }
                }
                if (best < 0) continue; // constant voxel: undefined everywhere
                chunk_found[w] = 1;
                const auto& ideal = ideals[static_cast<std::size_t>(best)].values;
                for (auto& map : maps) {
                    corr_value r;
                    switch (map.stat) {
                        case statistic::pearson: r = best_rho; break;
                        case statistic::spearman: r = stats::spearman(series, ideal); break;
                        case statistic::quadrant: r = stats::quadrant(series, ideal); break;
                    }
                    map.best_ideal[v] = best;
                    if (r.defined()) {
                        map.values[v] = r.value;
                        map.defined[v] = 1;
                    }
                }
            }
        } catch (...) {
            chunk_error[w] = std::current_exception();
        }
    };

    if (workers <= 1) {
        run_chunk(0, 0, nvox);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = nvox * w / workers;
            const std::size_t hi = nvox * (w + 1) / workers;
            pool.emplace_back(run_chunk, w, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    for (const auto& err : chunk_error)
        if (err) std::rethrow_exception(err);

    bool any = false;
    for (auto f : chunk_found) any = any || f != 0;
    if (!any)
        throw engine_error(errc::no_defined_voxels,
                           "every voxel is constant; no correlation is defined");
    return maps;
}

/// Global minimum and maximum over defined voxels, ties broken by the
/// lexicographically smallest (i,j,k), with anatomical descriptions.
inline extrema_report extrema(const correlation_map& map) {
    const std::array<std::size_t, 3> dims{map.nx, map.ny, map.nz};
    extrema_report rep;
    bool found = false;
    for (std::size_t v = 0; v < map.voxel_count(); ++v) {
        if (!map.defined[v]) continue;
        const std::array<std::size_t, 3> idx{v % map.nx, (v / map.nx) % map.ny,
                                             v / (map.nx * map.ny)};
        const double val = map.values[v];
        if (!found) {
            found = true;
            rep.min_value = rep.max_value = val;
            rep.min_index = rep.max_index = idx;
            continue;
        }
        if (val < rep.min_value || (val == rep.min_value && idx < rep.min_index)) {
            rep.min_value = val;
            rep.min_index = idx;
        }
        if (val > rep.max_value || (val == rep.max_value && idx < rep.max_index)) {
            rep.max_value = val;
            rep.max_index = idx;
        }
    }
    if (!found)
        throw engine_error(errc::no_defined_voxels, "map has no defined voxels");
    rep.min_anatomical = nifti::voxel_to_anatomical(rep.min_index, dims);
    rep.max_anatomical = nifti::voxel_to_anatomical(rep.max_index, dims);
    return rep;
}

} // namespace voxcor::engine

#endif
