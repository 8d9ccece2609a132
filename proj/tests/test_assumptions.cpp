#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "voxcor/assumptions.hpp"

#include "support/synth.hpp"

using namespace voxcor;

namespace {

volume4d make_volume(std::size_t nx, std::size_t ny, std::size_t nz, std::size_t nt,
                     double fill = 1.0) {
    volume4d vol;
    vol.nx = nx;
    vol.ny = ny;
    vol.nz = nz;
    vol.nt = nt;
    vol.samples.assign(nx * ny * nz * nt, fill);
    return vol;
}

timeseries::ideal_series make_ideal(std::size_t nt, const std::string& label = "ideal") {
    timeseries::ideal_series s{label, synth::square_wave(nt, 2)};
    return s;
}

bool machine_checks_pass(const guard::assumption_report& r) {
    for (const auto& c : r.checks)
        if (c.kind == guard::check_kind::machine && c.status != guard::check_status::pass)
            return false;
    return true;
}

} // namespace

TEST_CASE("valid acknowledged inputs proceed", "[assumptions]") {
    const auto vol = make_volume(4, 4, 4, 8);
    const std::vector<timeseries::ideal_series> ideals{make_ideal(8)};
    const auto report = guard::check_inputs(vol, ideals, true);

    CHECK(report.proceed());
    CHECK(machine_checks_pass(report));
    for (const auto& c : report.checks) {
        if (c.kind == guard::check_kind::machine) {
            CHECK((c.status == guard::check_status::pass ||
                   c.status == guard::check_status::fail));
        } else {
            CHECK(c.status == guard::check_status::acknowledged);
        }
    }
}

TEST_CASE("negative sample fails positivity and names the voxel", "[assumptions]") {
    auto vol = make_volume(4, 4, 4, 2);
    vol.samples[1 + 4 * (2 + 4 * 3)] = -3.0; // voxel (1,2,3), frame 0
    const auto report = guard::check_inputs(vol, {make_ideal(2)}, true);

    REQUIRE_FALSE(report.proceed());
    const auto* pos = report.find("GA.1.positivity");
    REQUIRE(pos != nullptr);
    CHECK(pos->status == guard::check_status::fail);
    CHECK(pos->detail.find("(1,2,3)") != std::string::npos);
    CHECK(pos->detail.find("-3") != std::string::npos);
}

TEST_CASE("zero samples fail the strict positivity check", "[assumptions]") {
    auto vol = make_volume(2, 2, 2, 2);
    vol.samples[0] = 0.0;
    const auto report = guard::check_inputs(vol, {make_ideal(2)}, true);
    CHECK_FALSE(report.proceed());
    CHECK(report.find("GA.1.positivity")->status == guard::check_status::fail);
}

TEST_CASE("valid inputs without acknowledgment are refused", "[assumptions]") {
    const auto vol = make_volume(3, 3, 3, 6);
    const auto report = guard::check_inputs(vol, {make_ideal(6)}, false);

    REQUIRE_FALSE(report.proceed());
    CHECK(machine_checks_pass(report));
    for (const auto& c : report.checks)
        if (c.kind == guard::check_kind::user_obligation)
            CHECK(c.status == guard::check_status::unacknowledged);
}

TEST_CASE("ideal length mismatch is reported with the label", "[assumptions]") {
    const auto vol = make_volume(2, 2, 2, 10);
    const auto report =
        guard::check_inputs(vol, {make_ideal(10, "good"), make_ideal(7, "short")}, true);
    REQUIRE_FALSE(report.proceed());
    const auto* c = report.find("GA.1.ideal_length");
    REQUIRE(c != nullptr);
    CHECK(c->status == guard::check_status::fail);
    CHECK(c->detail.find("short") != std::string::npos);
    CHECK(c->detail.find("7") != std::string::npos);
    CHECK(c->detail.find("10") != std::string::npos);
}

TEST_CASE("single-frame volumes and missing ideals are refused", "[assumptions]") {
    const auto single = make_volume(2, 2, 2, 1);
    const auto r1 = guard::check_inputs(single, {make_ideal(2)}, true);
    CHECK_FALSE(r1.proceed());
    CHECK(r1.find("GA.1.min_frames")->status == guard::check_status::fail);

    const auto vol = make_volume(2, 2, 2, 4);
    const auto r2 = guard::check_inputs(vol, {}, true);
    CHECK_FALSE(r2.proceed());
    CHECK(r2.find("GA.1.ideal_count")->status == guard::check_status::fail);
}

TEST_CASE("reports are deterministic and sound", "[assumptions]") {
    std::mt19937 rng(50);
    std::uniform_real_distribution<double> val(-0.2, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto vol = make_volume(3, 2, 2, 4);
        for (auto& s : vol.samples) s = val(rng);
        const bool ack = trial % 2 == 0;
        const std::vector<timeseries::ideal_series> ideals{
            make_ideal(trial % 5 == 0 ? 3 : 4)};

        const auto a = guard::check_inputs(vol, ideals, ack);
        const auto b = guard::check_inputs(vol, ideals, ack);
        REQUIRE(a.verdict == b.verdict);
        REQUIRE(a.checks.size() == b.checks.size());
        for (std::size_t i = 0; i < a.checks.size(); ++i) {
            REQUIRE(a.checks[i].id == b.checks[i].id);
            REQUIRE(a.checks[i].status == b.checks[i].status);
            REQUIRE(a.checks[i].detail == b.checks[i].detail);
        }

        // refusal soundness: proceed implies every check ok and ack given
        bool all_ok = true;
        for (const auto& c : a.checks) all_ok = all_ok && c.ok();
        REQUIRE(a.proceed() == (all_ok && ack));
    }
}

TEST_CASE("machine checks and user obligations keep distinct statuses", "[assumptions]") {
    const auto vol = make_volume(2, 2, 2, 4);
    for (bool ack : {true, false}) {
        const auto report = guard::check_inputs(vol, {make_ideal(4)}, ack);
        for (const auto& c : report.checks) {
            if (c.kind == guard::check_kind::machine)
                CHECK((c.status == guard::check_status::pass ||
                       c.status == guard::check_status::fail));
            else
                CHECK((c.status == guard::check_status::acknowledged ||
                       c.status == guard::check_status::unacknowledged));
        }
    }
}

TEST_CASE("warning text names every assumption and the parametric caveat", "[assumptions]") {
    const auto text = guard::warning_text();
    CHECK(text.find(guard::assumption_a1) != std::string_view::npos);
    CHECK(text.find(guard::assumption_a2) != std::string_view::npos);
    CHECK(text.find(guard::assumption_a3) != std::string_view::npos);
    CHECK(text.find("parametric") != std::string_view::npos);
    CHECK(text.find("responsibility") != std::string_view::npos);

    // pure constant: same content and same storage on every call
    const auto again = guard::warning_text();
    CHECK(text.data() == again.data());
    CHECK(text == again);
}
