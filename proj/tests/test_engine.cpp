#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "voxcor/engine.hpp"
#include "voxcor/oracle.hpp"

#include "support/synth.hpp"

using namespace voxcor;
using Catch::Approx;

namespace {

volume4d noise_volume(std::mt19937& rng, std::size_t nx, std::size_t ny, std::size_t nz,
                      std::size_t nt, double baseline = 100.0) {
    volume4d vol;
    vol.nx = nx;
    vol.ny = ny;
    vol.nz = nz;
    vol.nt = nt;
    vol.samples = synth::positive_noise_samples(rng, nx * ny * nz * nt, baseline, 1.0);
    return vol;
}

void plant_series(volume4d& vol, std::size_t i, std::size_t j, std::size_t k,
                  const std::vector<double>& series) {
    const std::size_t voxel = i + vol.nx * (j + vol.ny * k);
    for (std::size_t t = 0; t < vol.nt; ++t)
        vol.samples[voxel + t * vol.spatial_count()] = series[t];
}

guard::assumption_report cleared(const volume4d& vol,
                                 const std::vector<timeseries::ideal_series>& ideals) {
    return guard::check_inputs(vol, ideals, true);
}

} // namespace

TEST_CASE("planted affine copy of the ideal yields rho 1 at its voxel", "[engine]") {
    std::mt19937 rng(60);
    auto vol = noise_volume(rng, 12, 10, 6, 30);
    const auto wave = synth::square_wave(30, 5);
    std::vector<double> planted(30);
    for (std::size_t t = 0; t < 30; ++t) planted[t] = 3.0 * wave[t] + 100.0;
    plant_series(vol, 5, 4, 3, planted);

    const std::vector<timeseries::ideal_series> ideals{{"wave", wave}};
    const auto maps = engine::analyze(vol, ideals, cleared(vol, ideals), {});
    REQUIRE(maps.size() == 1);
    const auto& map = maps[0];
    CHECK(map.stat == statistic::pearson);
    CHECK(map.values[map.linear(5, 4, 3)] == Approx(1.0).margin(1e-9));

    const auto ext = engine::extrema(map);
    CHECK(ext.max_index == std::array<std::size_t, 3>{5, 4, 3});
}

TEST_CASE("best ideal maximizes |rho| and records the negative match", "[engine]") {
    std::mt19937 rng(61);
    auto vol = noise_volume(rng, 6, 5, 4, 24);
    std::vector<double> series(24);
    for (std::size_t t = 0; t < 24; ++t) series[t] = 50.0 + 2.0 * std::sin(0.7 * t);
    plant_series(vol, 2, 3, 1, series);

    std::vector<double> mirrored(24);
    for (std::size_t t = 0; t < 24; ++t) mirrored[t] = -series[t];
    const std::vector<timeseries::ideal_series> ideals{
        {"noise", synth::random_series(rng, 24)}, {"mirror", mirrored}};

    const auto maps = engine::analyze(vol, ideals, cleared(vol, ideals), {});
    const auto v = maps[0].linear(2, 3, 1);
    CHECK(maps[0].best_ideal[v] == 1);
    CHECK(maps[0].values[v] == Approx(-1.0).margin(1e-12));
}

TEST_CASE("maps equal a full oracle recomputation on a random volume", "[engine]") {
    std::mt19937 rng(62);
    const auto vol = noise_volume(rng, 8, 8, 4, 20);
    const std::vector<timeseries::ideal_series> ideals{
        {"a", synth::random_series(rng, 20)}, {"b", synth::random_series(rng, 20)}};

    engine::analyze_options opt;
    opt.statistics = {statistic::pearson, statistic::spearman, statistic::quadrant};
    const auto maps = engine::analyze(vol, ideals, cleared(vol, ideals), opt);
    REQUIRE(maps.size() == 3);

    std::vector<double> series(vol.nt);
    for (std::size_t v = 0; v < vol.spatial_count(); ++v) {
        engine::extract_series(vol, v, series);
        // independent best-ideal selection via the oracle
        int best = -1;
        double best_abs = -1.0;
        for (std::size_t e = 0; e < ideals.size(); ++e) {
            const auto rho = oracle::pearson(series, ideals[e].values);
            if (rho.defined() && std::fabs(rho.value) > best_abs) {
                best_abs = std::fabs(rho.value);
                best = static_cast<int>(e);
            }
        }
        REQUIRE(best >= 0);
        for (const auto& map : maps) {
            REQUIRE(map.best_ideal[v] == best);
            REQUIRE(map.defined[v] == 1);
            corr_value expected;
            switch (map.stat) {
                case statistic::pearson:
                    expected = oracle::pearson(series, ideals[best].values);
                    REQUIRE(synth::rel_diff(map.values[v], expected.value) < 1e-12);
                    break;
                case statistic::spearman:
                    expected = oracle::spearman(series, ideals[best].values);
                    REQUIRE(synth::rel_diff(map.values[v], expected.value) < 1e-12);
                    break;
                case statistic::quadrant:
                    expected = oracle::quadrant(series, ideals[best].values);
                    REQUIRE(map.values[v] == expected.value); // exact
                    break;
            }
        }
    }
}

TEST_CASE("map values are reproducible by local recomputation", "[engine]") {
    std::mt19937 rng(63);
    const auto vol = noise_volume(rng, 10, 6, 5, 16);
    const std::vector<timeseries::ideal_series> ideals{{"a", synth::random_series(rng, 16)}};
    engine::analyze_options opt;
    opt.statistics = {statistic::pearson, statistic::spearman, statistic::quadrant};
    const auto maps = engine::analyze(vol, ideals, cleared(vol, ideals), opt);

    std::uniform_int_distribution<std::size_t> pick(0, vol.spatial_count() - 1);
    std::vector<double> series(vol.nt);
    for (int probe = 0; probe < 120; ++probe) {
        const auto v = pick(rng);
        engine::extract_series(vol, v, series);
        const auto e = static_cast<std::size_t>(maps[0].best_ideal[v]);
        REQUIRE(maps[0].values[v] == stats::pearson(series, ideals[e].values).value);
        REQUIRE(maps[1].values[v] == stats::spearman(series, ideals[e].values).value);
        const auto q = stats::quadrant(series, ideals[e].values);
        if (q.defined())
            REQUIRE(maps[2].values[v] == q.value);
        else
            REQUIRE(maps[2].defined[v] == 0);
    }
}

TEST_CASE("worker count never changes the result", "[engine]") {
    std::mt19937 rng(64);
    const auto vol = noise_volume(rng, 9, 7, 5, 18);
    const std::vector<timeseries::ideal_series> ideals{
        {"a", synth::random_series(rng, 18)}, {"b", synth::random_series(rng, 18)}};
    const auto clearance = cleared(vol, ideals);

    engine::analyze_options opt;
    opt.statistics = {statistic::pearson, statistic::spearman, statistic::quadrant};
    opt.workers = 1;
    const auto serial = engine::analyze(vol, ideals, clearance, opt);
    for (unsigned workers : {2u, 4u, 7u}) {
        opt.workers = workers;
        const auto parallel = engine::analyze(vol, ideals, clearance, opt);
        for (std::size_t m = 0; m < serial.size(); ++m) {
            REQUIRE(std::memcmp(serial[m].values.data(), parallel[m].values.data(),
                                serial[m].values.size() * sizeof(double)) == 0);
            REQUIRE(serial[m].defined == parallel[m].defined);
            REQUIRE(serial[m].best_ideal == parallel[m].best_ideal);
        }
    }
}

TEST_CASE("scaling an ideal by a positive factor changes nothing", "[engine]") {
    std::mt19937 rng(65);
    const auto vol = noise_volume(rng, 6, 6, 3, 20);
    const auto base = synth::random_series(rng, 20);
    std::vector<double> scaled(base);
    for (auto& v : scaled) v *= 3.5;

    const std::vector<timeseries::ideal_series> one{{"base", base}};
    const std::vector<timeseries::ideal_series> two{{"scaled", scaled}};
    const auto m1 = engine::analyze(vol, one, cleared(vol, one), {});
    const auto m2 = engine::analyze(vol, two, cleared(vol, two), {});
    REQUIRE(m1[0].best_ideal == m2[0].best_ideal);
    for (std::size_t v = 0; v < m1[0].voxel_count(); ++v)
        REQUIRE(m1[0].values[v] == Approx(m2[0].values[v]).margin(1e-9));
}

TEST_CASE("constant volume has no defined voxels", "[engine]") {
    volume4d vol;
    vol.nx = vol.ny = vol.nz = 2;
    vol.nt = 6;
    vol.samples.assign(vol.sample_count(), 5.0);
    const std::vector<timeseries::ideal_series> ideals{{"w", synth::square_wave(6, 2)}};
    CHECK_THROWS_MATCHES(engine::analyze(vol, ideals, cleared(vol, ideals), {}),
                         engine::engine_error,
                         Catch::Matchers::Predicate<engine::engine_error>([](const auto& e) {
                             return e.code() == engine::errc::no_defined_voxels;
                         }));
}

TEST_CASE("analysis refuses to run without guard clearance", "[engine]") {
    std::mt19937 rng(66);
    const auto vol = noise_volume(rng, 2, 2, 2, 6);
    const std::vector<timeseries::ideal_series> ideals{{"w", synth::square_wave(6, 2)}};
    const auto refused = guard::check_inputs(vol, ideals, false);
    CHECK_THROWS_MATCHES(engine::analyze(vol, ideals, refused, {}), engine::engine_error,
                         Catch::Matchers::Predicate<engine::engine_error>([](const auto& e) {
                             return e.code() == engine::errc::guard_not_passed;
                         }));
}

TEST_CASE("extrema of a single defined voxel", "[engine]") {
    correlation_map map;
    map.nx = 4;
    map.ny = 3;
    map.nz = 2;
    map.values.assign(map.voxel_count(), 0.0);
    map.defined.assign(map.voxel_count(), 0);
    map.values[map.linear(1, 1, 1)] = 0.7;
    map.defined[map.linear(1, 1, 1)] = 1;

    const auto ext = engine::extrema(map);
    CHECK(ext.min_value == 0.7);
    CHECK(ext.max_value == 0.7);
    CHECK(ext.min_index == std::array<std::size_t, 3>{1, 1, 1});
    CHECK(ext.max_index == std::array<std::size_t, 3>{1, 1, 1});
}

TEST_CASE("extrema picks planted extremes and breaks ties lexicographically", "[engine]") {
    correlation_map map;
    map.nx = 8;
    map.ny = 8;
    map.nz = 4;
    map.values.assign(map.voxel_count(), 0.01);
    map.defined.assign(map.voxel_count(), 1);
    map.values[map.linear(5, 6, 3)] = 1.0;
    map.values[map.linear(0, 0, 0)] = -1.0;

    auto ext = engine::extrema(map);
    CHECK(ext.max_index == std::array<std::size_t, 3>{5, 6, 3});
    CHECK(ext.min_index == std::array<std::size_t, 3>{0, 0, 0});

    // duplicate the maximum elsewhere: the lexicographically smaller wins
    map.values[map.linear(5, 2, 1)] = 1.0;
    ext = engine::extrema(map);
    CHECK(ext.max_index == std::array<std::size_t, 3>{5, 2, 1});
    map.values[map.linear(2, 7, 3)] = 1.0;
    ext = engine::extrema(map);
    CHECK(ext.max_index == std::array<std::size_t, 3>{2, 7, 3});
}

TEST_CASE("extrema matches a linear-scan oracle on random maps", "[engine]") {
    std::mt19937 rng(67);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        correlation_map map;
        map.nx = 5;
        map.ny = 4;
        map.nz = 3;
        map.values.resize(map.voxel_count());
        map.defined.resize(map.voxel_count());
        bool any = false;
        for (std::size_t v = 0; v < map.voxel_count(); ++v) {
            map.values[v] = val(rng);
            map.defined[v] = rng() % 4 != 0;
            any = any || map.defined[v];
        }
        if (!any) {
            CHECK_THROWS_AS(engine::extrema(map), engine::engine_error);
            continue;
        }
        const auto ext = engine::extrema(map);
        double lo = 2.0, hi = -2.0;
        for (std::size_t v = 0; v < map.voxel_count(); ++v) {
            if (!map.defined[v]) continue;
            lo = std::min(lo, map.values[v]);
            hi = std::max(hi, map.values[v]);
        }
        REQUIRE(ext.min_value == lo);
        REQUIRE(ext.max_value == hi);
        REQUIRE(map.values[map.linear(ext.min_index[0], ext.min_index[1], ext.min_index[2])] ==
                lo);
        REQUIRE(map.values[map.linear(ext.max_index[0], ext.max_index[1], ext.max_index[2])] ==
                hi);
        REQUIRE(map.defined[map.linear(ext.min_index[0], ext.min_index[1], ext.min_index[2])] ==
                1);
    }
}

TEST_CASE("extrema requires at least one defined voxel", "[engine]") {
    correlation_map map;
    map.nx = map.ny = map.nz = 2;
    map.values.assign(map.voxel_count(), 0.0);
    map.defined.assign(map.voxel_count(), 0);
    CHECK_THROWS_MATCHES(engine::extrema(map), engine::engine_error,
                         Catch::Matchers::Predicate<engine::engine_error>([](const auto& e) {
                             return e.code() == engine::errc::no_defined_voxels;
                         }));
}
