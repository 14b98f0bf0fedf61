#ifndef PANOSWEEP_IO_HPP
#define PANOSWEEP_IO_HPP

// Image and table files.
//
// Depth maps are grayscale PFM: "Pf\n", "W H\n", "-1.0\n", then W*H
// little-endian float32 values, bottom row first. Invalid pixels are
// written as -1. Colour images are 8-bit RGB PNG through libpng.

#include "panosweep/raster.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace panosweep {

namespace detail {

/// Largest accepted raster edge; keeps W * H * 4 far from size_t overflow.
inline constexpr long long kMaxPfmDim = 1 << 20;
inline constexpr long long kMaxPfmPixels = 1LL << 31;

inline std::uint32_t to_little_endian(std::uint32_t v)
{
    if constexpr (std::endian::native == std::endian::big)
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    return v;
}

/// Reads one whitespace-delimited header token, skipping leading
/// whitespace. Leaves the stream on the delimiter that ended the token.
inline std::string pfm_token(std::istream& in, const std::string& what, const std::string& path)
{
    std::string tok;
    int c = in.get();
    while (c != EOF && std::isspace(c))
        c = in.get();
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        if (tok.size() > 64)
            throw IoError(path + ": malformed PFM header (" + what + " too long)");
        c = in.get();
    }
    if (tok.empty())
        throw IoError(path + ": malformed PFM header (missing " + what + ")");
    if (c == EOF)
        throw IoError(path + ": truncated PFM header after " + what);
    return tok;
}

inline long long pfm_dim(const std::string& tok, const std::string& what, const std::string& path)
{
    long long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec == std::errc::result_out_of_range)
        throw IoError(path + ": PFM " + what + " overflows");
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw IoError(path + ": malformed PFM " + what + " '" + tok + "'");
    if (v <= 0)
        throw IoError(path + ": PFM " + what + " must be positive");
    if (v > kMaxPfmDim)
        throw IoError(path + ": PFM " + what + " " + tok + " exceeds the supported maximum");
    return v;
}

} // namespace detail

inline void write_depth_pfm(const std::string& path, const DepthMap& depth)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    const int w = depth.width(), h = depth.height();
    out << "Pf\n" << w << ' ' << h << "\n-1.0\n";
    std::vector<std::uint32_t> row(static_cast<std::size_t>(w));
    for (int y = h - 1; y >= 0; --y) {
        for (int x = 0; x < w; ++x) {
            const float v = depth.is_valid(x, y) ? static_cast<float>(depth.depth(x, y)) : -1.0f;
            row[static_cast<std::size_t>(x)] = detail::to_little_endian(std::bit_cast<std::uint32_t>(v));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    }
    if (!out)
        throw IoError("write failed: " + path);
}

/// Negative or non-finite samples load as invalid pixels; other samples are
/// valid when they fall inside [d_min, d_max].
inline DepthMap read_depth_pfm(const std::string& path, double d_min = 0.2, double d_max = 8.0)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    const std::string magic = detail::pfm_token(in, "magic", path);
    if (magic == "PF")
        throw IoError(path + ": colour PFM ('PF') is not supported, expected grayscale 'Pf'");
    if (magic != "Pf")
        throw IoError(path + ": not a PFM file (magic '" + magic + "')");
    const long long w = detail::pfm_dim(detail::pfm_token(in, "width", path), "width", path);
    const long long h = detail::pfm_dim(detail::pfm_token(in, "height", path), "height", path);
    if (w * h > detail::kMaxPfmPixels)
        throw IoError(path + ": PFM dimensions overflow the supported pixel count");
    const std::string scale_tok = detail::pfm_token(in, "scale", path);
    double scale = 0.0;
    // from_chars rejects an explicit '+', which big-endian writers emit.
    const char* first = scale_tok.data() + (scale_tok.size() > 1 && scale_tok[0] == '+' ? 1 : 0);
    const auto res = std::from_chars(first, scale_tok.data() + scale_tok.size(), scale);
    if (res.ec != std::errc() || res.ptr != scale_tok.data() + scale_tok.size() || !std::isfinite(scale) ||
        scale == 0.0)
        throw IoError(path + ": malformed PFM scale '" + scale_tok + "'");
    if (scale > 0.0)
        throw IoError(path + ": big-endian PFM (positive scale) is not supported");

    DepthMap out(static_cast<int>(w), static_cast<int>(h), d_min, d_max);
    std::vector<std::uint32_t> row(static_cast<std::size_t>(w));
    for (long long y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
        if (in.gcount() != static_cast<std::streamsize>(row.size() * 4))
            throw IoError(path + ": truncated PFM payload");
        for (long long x = 0; x < w; ++x) {
            const float v = std::bit_cast<float>(detail::to_little_endian(row[static_cast<std::size_t>(x)]));
            if (std::isfinite(v) && v >= 0.0f) {
                out.depth(static_cast<int>(x), static_cast<int>(y)) = v;
                out.valid(static_cast<int>(x), static_cast<int>(y)) = (v >= d_min && v <= d_max) ? 1 : 0;
            }
        }
    }
    return out;
}

inline void write_png(const std::string& path, const Raster<Rgb>& img)
{
    const int w = img.width(), h = img.height();
    std::vector<png_byte> buf(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
    for (std::size_t i = 0; i < img.size(); ++i)
        for (int c = 0; c < 3; ++c)
            buf[3 * i + static_cast<std::size_t>(c)] =
                static_cast<png_byte>(std::lround(std::clamp(static_cast<double>(img[i][c]), 0.0, 1.0) * 255.0));
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr))
        throw IoError("cannot write " + path + ": " + image.message);
}

inline void write_png(const std::string& path, const ErpImage& img) { write_png(path, img.pixels()); }

/// Binary mask as a black/white RGB PNG.
inline void write_mask_png(const std::string& path, const Raster<std::uint8_t>& mask)
{
    Raster<Rgb> img(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i)
        img[i] = mask[i] ? Rgb{1.f, 1.f, 1.f} : Rgb{0.f, 0.f, 0.f};
    write_png(path, img);
}

/// Any PNG, converted to 8-bit RGB and scaled to [0, 1].
inline Raster<Rgb> read_png(const std::string& path)
{
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw IoError("cannot read " + path + ": " + image.message);
    if (image.width > static_cast<png_uint_32>(detail::kMaxPfmDim) ||
        image.height > static_cast<png_uint_32>(detail::kMaxPfmDim)) {
        png_image_free(&image);
        throw IoError(path + ": PNG dimensions exceed the supported maximum");
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr))
        throw IoError("cannot decode " + path + ": " + image.message);
    Raster<Rgb> img(static_cast<int>(image.width), static_cast<int>(image.height));
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = {buf[3 * i] / 255.f, buf[3 * i + 1] / 255.f, buf[3 * i + 2] / 255.f};
    return img;
}

inline ErpImage read_erp_png(const std::string& path)
{
    Raster<Rgb> px = read_png(path);
    if (px.width() != 2 * px.height())
        throw IoError(path + ": equirectangular images need width == 2 * height");
    ErpImage img(px.width(), px.height());
    img.pixels() = std::move(px);
    return img;
}

/// Mask PNG: a pixel is set when its mean channel value exceeds one half.
inline Raster<std::uint8_t> read_mask_png(const std::string& path)
{
    const Raster<Rgb> img = read_png(path);
    Raster<std::uint8_t> m(img.width(), img.height(), 0);
    for (std::size_t i = 0; i < img.size(); ++i)
        m[i] = (img[i].r + img[i].g + img[i].b) > 1.5f ? 1 : 0;
    return m;
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out)
        throw IoError("write failed: " + path);
}

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Creates `dir` (and parents) if needed.
inline void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory " + dir + ": " + ec.message());
}

/// Quotes a CSV field when it contains a separator, quote or newline.
inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace panosweep

#endif // PANOSWEEP_IO_HPP
