// Generates a ready-to-run demo data set: a synthetic 4-D volume with one
// planted signal voxel, a square-wave ideal, and a small assurance case wired
// to the run-report evidence keys.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voxcor/timeseries.hpp"

namespace fs = std::filesystem;

namespace {

void write_nifti4d_f32(const fs::path& path, std::size_t nx, std::size_t ny, std::size_t nz,
                       std::size_t nt, const std::vector<double>& samples) {
    const std::size_t data_offset = 352;
    std::vector<char> bytes(data_offset + 4 * samples.size(), 0);
    const auto put16 = [&](std::size_t off, std::int16_t v) { std::memcpy(&bytes[off], &v, 2); };
    const auto put32 = [&](std::size_t off, std::int32_t v) { std::memcpy(&bytes[off], &v, 4); };
    const auto putf = [&](std::size_t off, float v) { std::memcpy(&bytes[off], &v, 4); };

    put32(0, 348);
    put16(40, 4);
    put16(42, static_cast<std::int16_t>(nx));
    put16(44, static_cast<std::int16_t>(ny));
    put16(46, static_cast<std::int16_t>(nz));
    put16(48, static_cast<std::int16_t>(nt));
    for (std::size_t i = 5; i < 8; ++i) put16(40 + 2 * i, 1);
    put16(70, 16); // float32
    put16(72, 32);
    for (std::size_t i = 1; i <= 4; ++i) putf(76 + 4 * i, 1.0f);
    putf(108, 352.0f);
    std::memcpy(&bytes[344], "n+1\0", 4);
    for (std::size_t s = 0; s < samples.size(); ++s)
        putf(data_offset + 4 * s, static_cast<float>(samples[s]));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

const char* demo_case =
    "GOAL G \"Correlation maps from this run are trustworthy\"\n"
    "GOAL GA \"Inputs satisfy the defined operational assumptions\" supports G\n"
    "GOAL GI \"Computed statistics match an independent recomputation\" supports G\n"
    "EVIDENCE E_GA.1 \"automated input checks\" supports GA key=GA.1.positivity\n"
    "EVIDENCE E_GA.2 \"user acknowledgment of model-suitability obligations\" supports GA "
    "key=GA.2.normality\n"
    "EVIDENCE E_GI.1 \"pseudo-oracle differential agreement\" supports GI key=oracle.agreement\n"
    "EVIDENCE E_G.1 \"analysis completed with maps and report\" supports G "
    "key=analysis.completed\n";

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate demo inputs: phantom volume, ideal series, assurance case"};
    std::string dir = "phantom";
    std::size_t nx = 16, ny = 16, nz = 8, nt = 40;
    unsigned seed = 7;
    app.add_option("--dir", dir, "output directory");
    app.add_option("--nx", nx);
    app.add_option("--ny", ny);
    app.add_option("--nz", nz);
    app.add_option("--nt", nt);
    app.add_option("--seed", seed);
    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(dir);
        const fs::path base(dir);

        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> noise(-1.0, 1.0);
        std::vector<double> samples(nx * ny * nz * nt);
        for (auto& v : samples) v = 100.0 + noise(rng);

        std::vector<double> wave(nt);
        const std::size_t period = std::max<std::size_t>(2, nt / 8);
        for (std::size_t t = 0; t < nt; ++t) wave[t] = (t / period) % 2 == 0 ? 0.0 : 1.0;

        const std::size_t pi = nx / 3, pj = ny / 2, pk = nz / 2;
        const std::size_t voxel = pi + nx * (pj + ny * pk);
        std::uniform_real_distribution<double> jitter(-0.03, 0.03);
        for (std::size_t t = 0; t < nt; ++t)
            samples[voxel + t * nx * ny * nz] = 3.0 * wave[t] + 100.0 + jitter(rng);

        write_nifti4d_f32(base / "phantom.nii", nx, ny, nz, nt, samples);
        {
            std::ofstream out(base / "ideal.1D", std::ios::trunc);
            out << "# block-design reference signal\n";
            out << voxcor::timeseries::render({"ideal", wave});
        }
        {
            std::ofstream out(base / "correctness_case.gsn", std::ios::trunc);
            out << demo_case;
        }

        std::cout << "wrote " << (base / "phantom.nii").string() << " (" << nx << "x" << ny << "x"
                  << nz << ", " << nt << " frames; signal planted at voxel (" << pi << "," << pj
                  << "," << pk << "))\n";
        std::cout << "wrote " << (base / "ideal.1D").string() << "\n";
        std::cout << "wrote " << (base / "correctness_case.gsn").string() << "\n\n";
        std::cout << "next steps:\n";
        std::cout << "  voxcor analyze --input " << (base / "phantom.nii").string() << " --ideal "
                  << (base / "ideal.1D").string() << " --out all --prefix " << dir
                  << "/run --ack-assumptions\n";
        std::cout << "  voxcor verify  --input " << (base / "phantom.nii").string() << " --ideal "
                  << (base / "ideal.1D").string() << " --prefix " << dir
                  << "/run --ack-assumptions --report structured\n";
        std::cout << "  voxcor gsn-check --case " << (base / "correctness_case.gsn").string()
                  << " --results " << dir << "/run_report.json\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
