#ifndef VOXCOR_NIFTI_HPP
#define VOXCOR_NIFTI_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxcor/types.hpp"

namespace voxcor {

/// Fixed voxel-ordering convention of the stored grid: rows run from the
/// subject's right to left, rows stack front to back into slices, slices
/// stack top to bottom into volumes. Header orientation fields are ignored;
/// this convention is assumed and restated in every report.
struct anatomical_convention {
    std::string_view x_sense = "right-to-left";
    std::string_view y_sense = "anterior-to-posterior";
    std::string_view z_sense = "superior-to-inferior";
};

inline constexpr anatomical_convention storage_convention{};

/// 4-D voxel grid, x fastest, then y, z, t. All samples finite.
struct volume4d {
    std::size_t nx = 0, ny = 0, nz = 0, nt = 0;
    std::vector<double> samples;
    anatomical_convention orientation{};

    std::size_t spatial_count() const { return nx * ny * nz; }
    std::size_t sample_count() const { return spatial_count() * nt; }

    double sample(std::size_t i, std::size_t j, std::size_t k, std::size_t t) const {
        return samples[i + nx * (j + ny * (k + nz * t))];
    }
};

namespace nifti {

enum class errc {
    bad_magic,
    bad_header_size,
    unsupported_datatype,
    bad_rank,
    truncated_data,
    non_finite_sample,
    dim_mismatch,
    io_failure,
    index_out_of_range,
    header_pair_unsupported,
};

class parse_error : public error {
public:
    parse_error(errc code, const std::string& what) : error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

inline constexpr std::size_t header_size = 348;
inline constexpr std::int16_t dt_int16 = 4;
inline constexpr std::int16_t dt_float32 = 16;

// field offsets within the 348-byte header
inline constexpr std::size_t off_sizeof_hdr = 0;
inline constexpr std::size_t off_dim = 40;
inline constexpr std::size_t off_datatype = 70;
inline constexpr std::size_t off_bitpix = 72;
inline constexpr std::size_t off_pixdim = 76;
inline constexpr std::size_t off_vox_offset = 108;
inline constexpr std::size_t off_scl_slope = 112;
inline constexpr std::size_t off_scl_inter = 116;
inline constexpr std::size_t off_magic = 344;

/// Parsed, endian-normalized subset of the NIfTI-1 header.
struct header {
    std::array<std::int16_t, 8> dim{}; // dim[0] = rank, dim[1..4] = nx,ny,nz,nt
    std::int16_t datatype = 0;
    std::int16_t bitpix = 0;
    float scl_slope = 0.0f;
    float scl_inter = 0.0f;
    float vox_offset = 0.0f;
    std::array<char, 4> magic{};
    std::endian byte_order = std::endian::native;

    std::size_t rank() const { return static_cast<std::size_t>(dim[0]); }
    std::size_t nx() const { return static_cast<std::size_t>(dim[1]); }
    std::size_t ny() const { return static_cast<std::size_t>(dim[2]); }
    std::size_t nz() const { return static_cast<std::size_t>(dim[3]); }
    std::size_t nt() const { return rank() >= 4 ? static_cast<std::size_t>(dim[4]) : 1; }

    bool single_file() const {
        return std::string_view(magic.data(), 4) == std::string_view("n+1\0", 4);
    }

    bool operator==(const header&) const = default;
};

namespace detail {

constexpr std::uint16_t swap16(std::uint16_t v) {
    return static_cast<std::uint16_t>((v >> 8) | (v << 8));
}

constexpr std::uint32_t swap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0x0000ff00u) | ((v << 8) & 0x00ff0000u) | (v << 24);
}

inline std::int16_t load_i16(std::span<const std::byte> b, std::size_t off, bool swap) {
    std::uint16_t v;
    std::memcpy(&v, b.data() + off, 2);
    if (swap) v = swap16(v);
    return std::bit_cast<std::int16_t>(v);
}

inline std::int32_t load_i32(std::span<const std::byte> b, std::size_t off, bool swap) {
    std::uint32_t v;
    std::memcpy(&v, b.data() + off, 4);
    if (swap) v = swap32(v);
    return std::bit_cast<std::int32_t>(v);
}

inline float load_f32(std::span<const std::byte> b, std::size_t off, bool swap) {
    std::uint32_t v;
    std::memcpy(&v, b.data() + off, 4);
    if (swap) v = swap32(v);
    return std::bit_cast<float>(v);
}

inline void store_i16(std::vector<std::byte>& b, std::size_t off, std::int16_t value) {
    std::memcpy(b.data() + off, &value, 2);
}

inline void store_i32(std::vector<std::byte>& b, std::size_t off, std::int32_t value) {
    std::memcpy(b.data() + off, &value, 4);
}

inline void store_f32(std::vector<std::byte>& b, std::size_t off, float value) {
    std::memcpy(b.data() + off, &value, 4);
}

inline std::string index4_text(std::size_t s, std::size_t nx, std::size_t ny, std::size_t nz) {
    const std::size_t i = s % nx;
    const std::size_t j = (s / nx) % ny;
    const std::size_t k = (s / (nx * ny)) % nz;
    const std::size_t t = s / (nx * ny * nz);
    char buf[192];
    std::snprintf(buf, sizeof buf, "voxel (%zu,%zu,%zu) (one-based (%zu,%zu,%zu)), frame %zu", i,
                  j, k, i + 1, j + 1, k + 1, t);
    return buf;
}

} // namespace detail

/// Parse and endian-normalize a 348-byte header. Byte order is inferred by
/// testing whether dim[0] falls in 1..7 under the native order, else swapped.
inline header parse_header(std::span<const std::byte> bytes) {
    if (bytes.size() < header_size)
        throw parse_error(errc::bad_header_size,
                          "header requires 348 bytes, got " + std::to_string(bytes.size()));

    header h;
    std::memcpy(h.magic.data(), bytes.data() + off_magic, 4);
    const std::string_view magic(h.magic.data(), 4);
    if (magic != std::string_view("n+1\0", 4) && magic != std::string_view("ni1\0", 4))
        throw parse_error(errc::bad_magic, "magic is neither \"n+1\" nor \"ni1\"");

    const auto rank_ok = [](std::int16_t d) { return d >= 1 && d <= 7; };
    const bool native_ok = rank_ok(detail::load_i16(bytes, off_dim, false));
    const bool swapped_ok = rank_ok(detail::load_i16(bytes, off_dim, true));
    if (!native_ok && !swapped_ok) {
        if (detail::load_i32(bytes, off_sizeof_hdr, false) != 348 &&
            detail::load_i32(bytes, off_sizeof_hdr, true) != 348)
            throw parse_error(errc::bad_header_size, "sizeof_hdr is not 348 under either byte order");
        throw parse_error(errc::bad_rank, "dim[0] outside 1..7 under either byte order");
    }
    const bool swap = !native_ok;

    const auto size_field = detail::load_i32(bytes, off_sizeof_hdr, swap);
    if (size_field != 348)
        throw parse_error(errc::bad_header_size,
                          "sizeof_hdr is " + std::to_string(size_field) + ", expected 348");

    for (std::size_t i = 0; i < 8; ++i)
        h.dim[i] = detail::load_i16(bytes, off_dim + 2 * i, swap);
    h.datatype = detail::load_i16(bytes, off_datatype, swap);
    h.bitpix = detail::load_i16(bytes, off_bitpix, swap);
    h.vox_offset = detail::load_f32(bytes, off_vox_offset, swap);
    h.scl_slope = detail::load_f32(bytes, off_scl_slope, swap);
    h.scl_inter = detail::load_f32(bytes, off_scl_inter, swap);
    h.byte_order = swap ? (std::endian::native == std::endian::little ? std::endian::big
                                                                      : std::endian::little)
                        : std::endian::native;

    if (h.datatype != dt_int16 && h.datatype != dt_float32)
        throw parse_error(errc::unsupported_datatype,
                          "datatype code " + std::to_string(h.datatype) +
                              " not supported (expected 4=int16 or 16=float32)");
    const std::int16_t expected_bitpix = h.datatype == dt_int16 ? 16 : 32;
    if (h.bitpix != expected_bitpix)
        throw parse_error(errc::unsupported_datatype,
                          "bitpix " + std::to_string(h.bitpix) + " inconsistent with datatype " +
                              std::to_string(h.datatype));

    for (std::size_t i = 1; i <= h.rank(); ++i)
        if (h.dim[i] < 1)
            throw parse_error(errc::bad_rank,
                              "dim[" + std::to_string(i) + "] = " + std::to_string(h.dim[i]) +
                                  " must be positive");

    if (h.single_file()) {
        if (!(h.vox_offset >= 348.0f))
            throw parse_error(errc::bad_header_size,
                              "vox_offset " + std::to_string(h.vox_offset) +
                                  " below the 348-byte header");
        if (h.vox_offset != std::floor(h.vox_offset))
            throw parse_error(errc::bad_header_size, "vox_offset must be integral");
    }
    return h;
}

/// Parse just the header of a file on disk.
inline header read_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw parse_error(errc::io_failure, "cannot open: " + path.string());
    std::array<std::byte, header_size> buf{};
    in.read(reinterpret_cast<char*>(buf.data()), header_size);
    if (static_cast<std::size_t>(in.gcount()) < header_size)
        throw parse_error(errc::bad_header_size,
                          "file shorter than the 348-byte header: " + path.string());
    return parse_header(buf);
}

/// Load a 3-D or 4-D single-file image. Integer data are converted to real;
/// when scl_slope is nonzero every sample becomes scl_slope*raw + scl_inter.
/// Any non-finite sample is rejected.
inline volume4d read_volume(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in)
        throw parse_error(errc::io_failure, "cannot open: " + path.string());
    const auto file_size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::byte> bytes(file_size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(file_size));
    if (static_cast<std::size_t>(in.gcount()) != file_size)
        throw parse_error(errc::io_failure, "read failed: " + path.string());

    const header h = parse_header(bytes);
    if (!h.single_file())
        throw parse_error(errc::header_pair_unsupported,
                          "header-pair (ni1) layout not supported; supply a single-file image");
    if (h.rank() != 3 && h.rank() != 4)
        throw parse_error(errc::bad_rank,
                          "volume must be rank 3 or 4, got " + std::to_string(h.rank()));

    volume4d vol;
    vol.nx = h.nx();
    vol.ny = h.ny();
    vol.nz = h.nz();
    vol.nt = h.nt();
    const std::size_t count = vol.sample_count();
    const std::size_t bytes_per = static_cast<std::size_t>(h.bitpix) / 8;
    const std::size_t offset = static_cast<std::size_t>(h.vox_offset);
    if (bytes.size() < offset + count * bytes_per)
        throw parse_error(errc::truncated_data,
                          "expected " + std::to_string(count * bytes_per) + " data bytes at offset " +
                              std::to_string(offset) + ", file holds " +
                              std::to_string(bytes.size() > offset ? bytes.size() - offset : 0));

    const bool swap = h.byte_order != std::endian::native;
    const bool scaled = h.scl_slope != 0.0f;
    const double slope = static_cast<double>(h.scl_slope);
    const double inter = static_cast<double>(h.scl_inter);

    vol.samples.resize(count);
    for (std::size_t s = 0; s < count; ++s) {
        double v;
        if (h.datatype == dt_int16)
            v = static_cast<double>(detail::load_i16(bytes, offset + 2 * s, swap));
        else
            v = static_cast<double>(detail::load_f32(bytes, offset + 4 * s, swap));
        if (scaled) v = slope * v + inter;
        if (!std::isfinite(v))
            throw parse_error(errc::non_finite_sample,
                              "non-finite sample at " +
                                  detail::index4_text(s, vol.nx, vol.ny, vol.nz));
        vol.samples[s] = v;
    }
    return vol;
}

/// Sidecar file listing undefined voxels of a written map.
inline std::filesystem::path sidecar_path(const std::filesystem::path& map_path) {
    std::filesystem::path p = map_path;
    if (p.extension() == ".nii") p.replace_extension();
    p += "_undefined.txt";
    return p;
}

/// Write a map as a float32 single-file volume in native byte order.
/// Undefined voxels are stored as 0 and listed, one zero-based "i j k" triple
/// per line, in a sidecar text file (always written, empty when none).
inline void write_map(const correlation_map& map, const header& templ,
                      const std::filesystem::path& path,
                      const std::filesystem::path& sidecar = {}) {
    if (map.nx != templ.nx() || map.ny != templ.ny() || map.nz != templ.nz())
        throw parse_error(errc::dim_mismatch,
                          "map dims " + std::to_string(map.nx) + "x" + std::to_string(map.ny) +
                              "x" + std::to_string(map.nz) + " do not match template " +
                              std::to_string(templ.nx()) + "x" + std::to_string(templ.ny()) + "x" +
                              std::to_string(templ.nz()));

    const std::size_t count = map.voxel_count();
    const std::size_t data_offset = header_size + 4; // 4-byte extension indicator
    std::vector<std::byte> bytes(data_offset + count * 4, std::byte{0});

    detail::store_i32(bytes, off_sizeof_hdr, 348);
    detail::store_i16(bytes, off_dim + 0, 3);
    detail::store_i16(bytes, off_dim + 2, static_cast<std::int16_t>(map.nx));
    detail::store_i16(bytes, off_dim + 4, static_cast<std::int16_t>(map.ny));
    detail::store_i16(bytes, off_dim + 6, static_cast<std::int16_t>(map.nz));
    for (std::size_t i = 4; i < 8; ++i)
        detail::store_i16(bytes, off_dim + 2 * i, 1);
    detail::store_i16(bytes, off_datatype, dt_float32);
    detail::store_i16(bytes, off_bitpix, 32);
    for (std::size_t i = 1; i <= 3; ++i)
        detail::store_f32(bytes, off_pixdim + 4 * i, 1.0f);
    detail::store_f32(bytes, off_vox_offset, static_cast<float>(data_offset));
    detail::store_f32(bytes, off_scl_slope, 0.0f);
    detail::store_f32(bytes, off_scl_inter, 0.0f);
    std::memcpy(bytes.data() + off_magic, "n+1\0", 4);

    for (std::size_t v = 0; v < count; ++v) {
        const float f = map.defined[v] ? static_cast<float>(map.values[v]) : 0.0f;
        detail::store_f32(bytes, data_offset + 4 * v, f);
    }

    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw parse_error(errc::io_failure, "cannot create: " + path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw parse_error(errc::io_failure, "write failed: " + path.string());
    }

    const auto side = sidecar.empty() ? sidecar_path(path) : sidecar;
    std::ofstream out(side, std::ios::trunc);
    if (!out)
        throw parse_error(errc::io_failure, "cannot create sidecar: " + side.string());
    for (std::size_t v = 0; v < count; ++v) {
        if (map.defined[v]) continue;
        const std::size_t i = v % map.nx;
        const std::size_t j = (v / map.nx) % map.ny;
        const std::size_t k = v / (map.nx * map.ny);
        out << i << ' ' << j << ' ' << k << '\n';
    }
    if (!out)
        throw parse_error(errc::io_failure, "write failed: " + side.string());
}

/// Side-of-body description of a zero-based voxel index under the storage
/// convention: increasing i runs right to left, j front to back, k top to
/// bottom. The eight grid corners map to eight distinct descriptions.
inline std::string voxel_to_anatomical(std::array<std::size_t, 3> index,
                                       std::array<std::size_t, 3> dims) {
    for (std::size_t a = 0; a < 3; ++a)
        if (index[a] >= dims[a])
            throw parse_error(errc::index_out_of_range,
                              "index (" + std::to_string(index[0]) + "," +
                                  std::to_string(index[1]) + "," + std::to_string(index[2]) +
                                  ") outside dims (" + std::to_string(dims[0]) + "," +
                                  std::to_string(dims[1]) + "," + std::to_string(dims[2]) + ")");

    const auto term = [](std::size_t i, std::size_t n, const char* first, const char* low,
                         const char* high, const char* last) -> std::string {
        if (i == 0) return first;
        if (i == n - 1) return last;
        if (2 * i < n - 1) return low;
        if (2 * i == n - 1) return "mid";
        return high;
    };
    return term(index[0], dims[0], "rightmost", "right", "left", "leftmost") + ", " +
           term(index[1], dims[1], "most anterior", "anterior", "posterior", "most posterior") +
           ", " +
           term(index[2], dims[2], "most superior", "superior", "inferior", "most inferior");
}

} // namespace nifti
} // namespace voxcor

#endif
