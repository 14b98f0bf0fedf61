#ifndef PANOSWEEP_FEATURES_HPP
#define PANOSWEEP_FEATURES_HPP

// Classical per-pixel matching descriptors on equirectangular images.
// Windows wrap in longitude and clamp at the first/last row.

#include "panosweep/camera.hpp"
#include "panosweep/raster.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace panosweep {

enum class DescriptorKind
{
    Rgb,
    Census5x5,
    ZnccPatch
};

inline std::string to_string(DescriptorKind k)
{
    switch (k) {
    case DescriptorKind::Rgb:
        return "rgb";
    case DescriptorKind::Census5x5:
        return "census5x5";
    case DescriptorKind::ZnccPatch:
        return "zncc";
    }
    return "unknown";
}

inline int descriptor_channels(DescriptorKind k)
{
    switch (k) {
    case DescriptorKind::Rgb:
        return 3;
    case DescriptorKind::Census5x5:
        return 24;
    case DescriptorKind::ZnccPatch:
        return 25;
    }
    return 0;
}

/// H x W x F descriptor raster (channel-interleaved) with a validity mask.
struct FeatureMap
{
    int width = 0;
    int height = 0;
    int channels = 0;
    DescriptorKind kind = DescriptorKind::Rgb;
    std::vector<float> data;
    Raster<std::uint8_t> valid;

    FeatureMap() = default;
    FeatureMap(int w, int h, int f, DescriptorKind k)
        : width(w), height(h), channels(f), kind(k),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(f), 0.f),
          valid(w, h, 1)
    {
    }

    std::size_t pixel_index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    float* at(std::size_t pixel) { return data.data() + pixel * static_cast<std::size_t>(channels); }
    const float* at(std::size_t pixel) const { return data.data() + pixel * static_cast<std::size_t>(channels); }
    float* at(int x, int y) { return at(pixel_index(x, y)); }
    const float* at(int x, int y) const { return at(pixel_index(x, y)); }
};

struct FeatureParams
{
    /// Census bit is set when neighbour < centre - threshold; suppresses
    /// bit flips from rounding noise in flat regions.
    double census_threshold = 1e-3;
};

namespace detail {

inline Raster<double> luminance(const Raster<Rgb>& img)
{
    Raster<double> out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i)
        out[i] = 0.299 * img[i].r + 0.587 * img[i].g + 0.114 * img[i].b;
    return out;
}

/// True when every pixel of the 5x5 window around (x, y) is valid.
inline bool window_valid(const Raster<std::uint8_t>& mask, int x, int y)
{
    const int w = mask.width(), h = mask.height();
    for (int dy = -2; dy <= 2; ++dy) {
        const int yy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -2; dx <= 2; ++dx)
            if (!mask(wrap_index(x + dx, w), yy))
                return false;
    }
    return true;
}

} // namespace detail

/// 24-bit census signature packed from a Census5x5 feature vector
/// (bit k = channel k, window scanned row-major, centre skipped).
inline std::uint32_t census_code(const FeatureMap& f, int x, int y)
{
    std::uint32_t code = 0;
    const float* p = f.at(x, y);
    for (int k = 0; k < 24; ++k)
        if (p[k] > 0.5f)
            code |= (1u << k);
    return code;
}

inline FeatureMap extract_features(const ErpImage& img, DescriptorKind kind,
                                   const Raster<std::uint8_t>* mask = nullptr, const FeatureParams& params = {})
{
    const int w = img.width(), h = img.height();
    if (mask && !mask->same_shape(w, h))
        throw ConfigError("extract_features: mask dimensions differ from image");
    FeatureMap out(w, h, descriptor_channels(kind), kind);

    if (kind == DescriptorKind::Rgb) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float* p = out.at(x, y);
                const Rgb& c = img(x, y);
                p[0] = c.r;
                p[1] = c.g;
                p[2] = c.b;
                out.valid(x, y) = mask ? (*mask)(x, y) : 1;
            }
        return out;
    }

    const Raster<double> lum = detail::luminance(img.pixels());
    const auto sample = [&](int x, int y) { return lum(wrap_index(x, w), std::clamp(y, 0, h - 1)); };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float* p = out.at(x, y);
            out.valid(x, y) = mask ? static_cast<std::uint8_t>(detail::window_valid(*mask, x, y)) : 1;
            if (kind == DescriptorKind::Census5x5) {
                const double centre = sample(x, y);
                int k = 0;
                for (int dy = -2; dy <= 2; ++dy)
                    for (int dx = -2; dx <= 2; ++dx) {
                        if (dx == 0 && dy == 0)
                            continue;
                        p[k++] = sample(x + dx, y + dy) < centre - params.census_threshold ? 1.f : 0.f;
                    }
            } else {
                double patch[25];
                double mean = 0.0;
                int k = 0;
                for (int dy = -2; dy <= 2; ++dy)
                    for (int dx = -2; dx <= 2; ++dx) {
                        patch[k] = sample(x + dx, y + dy);
                        mean += patch[k++];
                    }
                mean /= 25.0;
                double ss = 0.0;
                for (double& v : patch) {
                    v -= mean;
                    ss += v * v;
                }
                const double n = std::sqrt(ss);
                // Zero-variance patches map to the zero vector.
                for (int i = 0; i < 25; ++i)
                    p[i] = n > 1e-6 ? static_cast<float>(patch[i] / n) : 0.f;
            }
        }
    }
    return out;
}

/// Per-pixel gather offsets in reference pixels.
struct DisplacementField
{
    Raster<double> cx;
    Raster<double> cy;
};

/// Bilinear read of all channels at continuous (u, v); false when v is
/// outside the image or any contributing tap is invalid.
inline bool sample_features(const FeatureMap& f, double u, double v, float* out)
{
    if (!(v >= -0.5 && v <= f.height - 0.5) || !std::isfinite(u))
        return false;
    const BilinearTaps t = erp_taps(u, v, f.width, f.height);
    const int nc = f.channels;
    for (int c = 0; c < nc; ++c)
        out[c] = 0.f;
    for (int k = 0; k < 4; ++k) {
        const double wk = t.weight[k];
        if (wk <= 0.0)
            continue;
        if (!f.valid[t.index[k]])
            return false;
        const float* p = f.at(t.index[k]);
        const auto wf = static_cast<float>(wk);
        for (int c = 0; c < nc; ++c)
            out[c] += wf * p[c];
    }
    return true;
}

/// Gather warp: out(u, v) = ref(u + C_x, v + C_y), longitude wrapped, rows
/// outside the image marked invalid.
inline FeatureMap warp_view(const FeatureMap& ref, const DisplacementField& disp)
{
    if (!disp.cx.same_shape(ref.width, ref.height) || !disp.cy.same_shape(ref.width, ref.height))
        throw ConfigError("warp_view: displacement raster dimensions differ from the feature map");
    FeatureMap out(ref.width, ref.height, ref.channels, ref.kind);
    for (int y = 0; y < ref.height; ++y)
        for (int x = 0; x < ref.width; ++x) {
            const double cx = disp.cx(x, y), cy = disp.cy(x, y);
            if (!std::isfinite(cx) || !std::isfinite(cy))
                throw NumericalError("warp_view: non-finite displacement");
            out.valid(x, y) = sample_features(ref, x + cx, y + cy, out.at(x, y)) ? 1 : 0;
        }
    return out;
}

} // namespace panosweep

#endif // PANOSWEEP_FEATURES_HPP
