#pragma once

#include <png.h>

#include <array>
#include <cctype>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>

#include "grid.hpp"
#include "metrics.hpp"

namespace holoflow {

enum class ImageFormat { pgm, png };

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw io_error("cannot open '" + path.string() + "'");
    return f;
}

// PGM token reader: skips whitespace and '#' comments.
inline std::string pgm_token(std::FILE* f) {
    std::string tok;
    int ch;
    while ((ch = std::fgetc(f)) != EOF) {
        if (ch == '#') {
            while ((ch = std::fgetc(f)) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty()) throw io_error("malformed header: unexpected end of file");
    return tok;
}

inline std::size_t pgm_number(std::FILE* f) {
    const std::string tok = pgm_token(f);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw io_error("malformed header: expected a number, got '" + tok + "'");
    return std::stoull(tok);
}

struct PixelImage {
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint8_t> pixels;  // row-major
};

inline PixelImage load_pgm(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    std::array<char, 2> magic{};
    if (std::fread(magic.data(), 1, 2, f.get()) != 2 || magic[0] != 'P' || magic[1] != '5')
        throw io_error("malformed header: '" + path.string() + "' is not a binary PGM (P5) file");
    PixelImage img;
    img.cols = pgm_number(f.get());
    img.rows = pgm_number(f.get());
    const std::size_t maxval = pgm_number(f.get());
    if (maxval == 0 || maxval > 255)
        throw io_error("unsupported depth: PGM maxval " + std::to_string(maxval) +
                       " (only 8-bit supported)");
    if (img.rows == 0 || img.cols == 0) throw io_error("malformed header: zero image dimension");
    img.pixels.resize(img.rows * img.cols);
    if (std::fread(img.pixels.data(), 1, img.pixels.size(), f.get()) != img.pixels.size())
        throw io_error("parse error: truncated PGM payload in '" + path.string() + "'");
    return img;
}

inline void save_pgm(const PixelImage& img, const std::filesystem::path& path) {
    FilePtr f = open_file(path, "wb");
    std::fprintf(f.get(), "P5\n%zu %zu\n255\n", img.cols, img.rows);
    if (std::fwrite(img.pixels.data(), 1, img.pixels.size(), f.get()) != img.pixels.size())
        throw io_error("failed writing '" + path.string() + "'");
}

inline PixelImage load_png(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    std::array<unsigned char, 8> sig{};
    if (std::fread(sig.data(), 1, 8, f.get()) != 8 || png_sig_cmp(sig.data(), 0, 8) != 0)
        throw io_error("malformed header: '" + path.string() + "' is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("libpng initialization failed");
    }
    PixelImage img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("parse error: corrupt PNG '" + path.string() + "'");
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    const png_byte color = png_get_color_type(png, info);
    if (depth != 8 || color != PNG_COLOR_TYPE_GRAY) {
        const std::string error =
            depth != 8 ? "unsupported depth: " + std::to_string(depth) + "-bit PNG"
                       : "unsupported color type: only 8-bit grayscale PNG is accepted";
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error(error);
    }
    img.cols = png_get_image_width(png, info);
    img.rows = png_get_image_height(png, info);
    img.pixels.resize(img.rows * img.cols);
    std::vector<png_bytep> row_ptrs(img.rows);
    for (std::size_t r = 0; r < img.rows; ++r) row_ptrs[r] = img.pixels.data() + r * img.cols;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

inline void save_png(const PixelImage& img, const std::filesystem::path& path) {
    FilePtr f = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw io_error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("failed writing '" + path.string() + "'");
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols), static_cast<png_uint_32>(img.rows),
                 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> row_ptrs(img.rows);
    for (std::size_t r = 0; r < img.rows; ++r)
        row_ptrs[r] = const_cast<png_bytep>(img.pixels.data() + r * img.cols);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_f64_le(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
}

inline double get_f64_le(const std::uint8_t* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

// 16-byte header (8-byte magic, two u32 extents; the second is 0 for 1D
// grids) followed by little-endian float64 payload.
inline void save_f64_grid(const char magic[8], const GridShape& shape,
                          const std::vector<double>& values, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(16 + 8 * values.size());
    bytes.insert(bytes.end(), magic, magic + 8);
    if (shape.is_2d()) {
        put_u32_le(bytes, static_cast<std::uint32_t>(shape.rows()));
        put_u32_le(bytes, static_cast<std::uint32_t>(shape.cols()));
    } else {
        put_u32_le(bytes, static_cast<std::uint32_t>(shape.total()));
        put_u32_le(bytes, 0);
    }
    for (double v : values) put_f64_le(bytes, v);
    FilePtr f = open_file(path, "wb");
    if (std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size())
        throw io_error("failed writing '" + path.string() + "'");
}

inline std::pair<GridShape, std::vector<double>> load_f64_grid(const char magic[8],
                                                               const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    std::array<std::uint8_t, 16> header{};
    if (std::fread(header.data(), 1, 16, f.get()) != 16)
        throw io_error("malformed header: '" + path.string() + "' shorter than 16 bytes");
    if (std::memcmp(header.data(), magic, 8) != 0)
        throw io_error("bad magic in '" + path.string() + "'");
    const std::uint32_t d0 = get_u32_le(header.data() + 8);
    const std::uint32_t d1 = get_u32_le(header.data() + 12);
    const GridShape shape = d1 == 0 ? GridShape::line(d0) : GridShape::plane(d0, d1);
    shape.validate();

    std::vector<std::uint8_t> payload(8 * shape.total());
    if (std::fread(payload.data(), 1, payload.size(), f.get()) != payload.size())
        throw io_error("dimension mismatch: '" + path.string() + "' payload shorter than header claims");
    if (std::fgetc(f.get()) != EOF)
        throw io_error("dimension mismatch: '" + path.string() + "' payload longer than header claims");

    std::vector<double> values(shape.total());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_f64_le(payload.data() + 8 * i);
    return {shape, std::move(values)};
}

inline constexpr char hologram_magic[8] = {'H', 'F', 'P', 'H', 'A', 'S', 'E', '1'};
inline constexpr char raw_intensity_magic[8] = {'H', 'F', 'I', 'N', 'T', 'N', 'S', '1'};

}  // namespace detail

/// Loads an 8-bit grayscale image (binary PGM or grayscale PNG, by content),
/// maps pixels to [0,1] as intensities, and energy-normalizes the result.
inline IntensityGrid load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw io_error("missing file '" + path.string() + "'");

    detail::PixelImage img;
    {
        detail::FilePtr probe = detail::open_file(path, "rb");
        std::array<unsigned char, 2> head{};
        if (std::fread(head.data(), 1, 2, probe.get()) != 2)
            throw io_error("malformed header: '" + path.string() + "' too short");
        probe.reset();
        if (head[0] == 'P' && head[1] == '5') img = detail::load_pgm(path);
        else if (head[0] == 0x89 && head[1] == 'P') img = detail::load_png(path);
        else throw io_error("malformed header: '" + path.string() + "' is neither PGM P5 nor PNG");
    }

    IntensityGrid raw(GridShape::plane(img.rows, img.cols));
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<double>(img.pixels[i]) / 255.0;
    return normalize_target(raw);
}

/// Writes an intensity grid as an 8-bit image, linearly mapped by its own
/// maximum (an all-zero grid maps to an all-zero image). 1D grids are written
/// as single-row images.
inline void save_intensity(const IntensityGrid& grid, const std::filesystem::path& path,
                           ImageFormat format) {
    double max = 0.0;
    for (double v : grid.data) max = std::max(max, v);
    const double scale = max > 0.0 ? 255.0 / max : 0.0;

    detail::PixelImage img;
    img.rows = grid.shape.is_2d() ? grid.shape.rows() : 1;
    img.cols = grid.shape.cols();
    img.pixels.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const long q = std::lround(grid[i] * scale);
        img.pixels[i] = static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
    }
    format == ImageFormat::pgm ? detail::save_pgm(img, path) : detail::save_png(img, path);
}

/// Binary hologram file: phase values, exact round trip.
inline void save_hologram(const PhaseGrid& phases, const std::filesystem::path& path) {
    detail::save_f64_grid(detail::hologram_magic, phases.shape, phases.data, path);
}

inline PhaseGrid load_hologram(const std::filesystem::path& path) {
    auto [shape, values] = detail::load_f64_grid(detail::hologram_magic, path);
    return PhaseGrid(shape, std::move(values));
}

/// Raw float64 intensity file: exact target values, same 16-byte header
/// layout as holograms with its own magic.
inline void save_raw_intensity(const IntensityGrid& grid, const std::filesystem::path& path) {
    detail::save_f64_grid(detail::raw_intensity_magic, grid.shape, grid.data, path);
}

inline IntensityGrid load_raw_intensity(const std::filesystem::path& path) {
    auto [shape, values] = detail::load_f64_grid(detail::raw_intensity_magic, path);
    return IntensityGrid(shape, std::move(values));
}

}  // namespace holoflow
