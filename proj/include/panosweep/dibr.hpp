#ifndef PANOSWEEP_DIBR_HPP
#define PANOSWEEP_DIBR_HPP

// Forward-splatting depth-image-based rendering with a soft z-buffer.
//
// Every valid source pixel is lifted to 3-D with its radial depth,
// re-observed from the translated camera and splatted onto the 2x2
// neighbouring target pixels with bilinear weights. Contributions to one
// target pixel are blended with weight  bilinear * exp(-(z - z_near) / sigma_z)
// where z_near is the nearest contribution to that pixel; the shift by
// z_near cancels in the normalised average and keeps the exponentials in
// range.

#include "panosweep/camera.hpp"
#include "panosweep/geometry.hpp"
#include "panosweep/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace panosweep {

struct SplatParams
{
    double sigma_z = 0.05; // meters
    double eps_w = 1e-4;   // minimum bilinear coverage of a non-hole pixel
};

struct SplatRaster
{
    Raster<Rgb> color;
    Raster<double> depth;  // blended radial depth from the target camera
    Raster<double> weight; // summed bilinear coverage
    Raster<std::uint8_t> covered;
};

namespace detail {

inline double snap_to_centre(double x)
{
    const double r = std::nearbyint(x);
    return std::abs(x - r) < 1e-9 ? r : x;
}

} // namespace detail

/// Generic splatting between two cameras of the same model that differ by
/// `translation` (target centre minus source centre).
template <class Camera>
SplatRaster splat(const Raster<Rgb>& color, const Raster<double>& depth, const Raster<std::uint8_t>& valid,
                  const Camera& src_cam, const Camera& dst_cam, const Vec3& translation, const SplatParams& params)
{
    if (!color.same_shape(depth) || !color.same_shape(valid))
        throw ConfigError("splat: colour, depth and mask rasters must have equal dimensions");
    if (!(params.sigma_z > 0.0) || !(params.eps_w > 0.0))
        throw ConfigError("splat: sigma_z and eps_w must be positive");

    const int tw = dst_cam.width;
    const int th = dst_cam.height;
    struct Drop
    {
        double u, v, z;
        std::size_t src;
    };
    std::vector<Drop> drops;
    drops.reserve(valid.size());
    for (int y = 0; y < color.height(); ++y) {
        for (int x = 0; x < color.width(); ++x) {
            if (!valid(x, y))
                continue;
            const double d = depth(x, y);
            if (!(d > 0.0) || !std::isfinite(d))
                continue;
            const Vec3 rel = src_cam.ray(x, y) * d - translation;
            const auto proj = dst_cam.project(rel);
            if (!proj)
                continue;
            drops.push_back({detail::snap_to_centre(proj->pixel.u), detail::snap_to_centre(proj->pixel.v), proj->depth,
                             color.index(x, y)});
        }
    }
    if (drops.empty() && valid.size() > 0 &&
        std::none_of(valid.data().begin(), valid.data().end(), [](std::uint8_t m) { return m != 0; }))
        throw NumericalError("splat: source has no valid depth pixels");

    // Visits the (up to four) target taps of one drop.
    const auto for_taps = [tw, th](const Drop& dr, auto&& fn) {
        const double fx0 = std::floor(dr.u), fy0 = std::floor(dr.v);
        const double ax = dr.u - fx0, ay = dr.v - fy0;
        const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
        for (int k = 0; k < 4; ++k) {
            const int dx = k & 1, dy = k >> 1;
            const double w = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay);
            if (!(w > 0.0))
                continue;
            int x = x0 + dx;
            const int y = y0 + dy;
            if (y < 0 || y >= th)
                continue;
            if constexpr (Camera::wraps_horizontally) {
                x = wrap_index(x, tw);
            } else if (x < 0 || x >= tw) {
                continue;
            }
            fn(static_cast<std::size_t>(y) * static_cast<std::size_t>(tw) + static_cast<std::size_t>(x), w);
        }
    };

    Raster<double> z_near(tw, th, std::numeric_limits<double>::infinity());
    for (const Drop& dr : drops)
        for_taps(dr, [&](std::size_t i, double) { z_near[i] = std::min(z_near[i], dr.z); });

    Raster<double> acc_w(tw, th, 0.0), acc_z(tw, th, 0.0), coverage(tw, th, 0.0);
    std::vector<double> acc_c(static_cast<std::size_t>(tw) * th * 3, 0.0);
    for (const Drop& dr : drops) {
        const Rgb& c = color[dr.src];
        for_taps(dr, [&](std::size_t i, double w) {
            const double soft = w * std::exp(-(dr.z - z_near[i]) / params.sigma_z);
            acc_w[i] += soft;
            acc_z[i] += soft * dr.z;
            acc_c[3 * i + 0] += soft * c.r;
            acc_c[3 * i + 1] += soft * c.g;
            acc_c[3 * i + 2] += soft * c.b;
            coverage[i] += w;
        });
    }

    SplatRaster out{Raster<Rgb>(tw, th), Raster<double>(tw, th, 0.0), std::move(coverage),
                    Raster<std::uint8_t>(tw, th, 0)};
    for (std::size_t i = 0; i < out.color.size(); ++i) {
        if (out.weight[i] < params.eps_w || !(acc_w[i] > 0.0))
            continue;
        const double inv = 1.0 / acc_w[i];
        out.color[i] = {static_cast<float>(std::clamp(acc_c[3 * i] * inv, 0.0, 1.0)),
                        static_cast<float>(std::clamp(acc_c[3 * i + 1] * inv, 0.0, 1.0)),
                        static_cast<float>(std::clamp(acc_c[3 * i + 2] * inv, 0.0, 1.0))};
        out.depth[i] = acc_z[i] * inv;
        out.covered[i] = 1;
    }
    return out;
}

/// One synthesised equirectangular view.
struct SynthView
{
    BaselineSpec baseline;
    ErpImage rgb;
    DepthMap depth;             // radial depth from the translated camera
    Raster<double> weight;      // bilinear coverage
    Raster<std::uint8_t> mask;  // 1 where the pixel is not a hole

    double hole_fraction() const
    {
        std::size_t holes = 0;
        for (auto m : mask.data())
            holes += (m == 0);
        return mask.empty() ? 0.0 : static_cast<double>(holes) / static_cast<double>(mask.size());
    }
};

inline SynthView forward_splat(const ErpImage& src, const DepthMap& src_depth, const BaselineSpec& b,
                               const SplatParams& params = {})
{
    if (src.width() != src_depth.width() || src.height() != src_depth.height())
        throw ConfigError("forward_splat: image and depth dimensions differ");
    if (src_depth.valid_count() == 0)
        throw NumericalError("forward_splat: depth map has no valid pixels");
    const ErpCamera cam{src.width(), src.height()};
    SplatRaster s = splat(src.pixels(), src_depth.depth, src_depth.valid, cam, cam, b.translation(), params);

    SynthView out{b, ErpImage(src.width(), src.height()), DepthMap(src.width(), src.height(), src_depth.d_min,
                                                                   src_depth.d_max),
                  std::move(s.weight), std::move(s.covered)};
    out.rgb.pixels() = std::move(s.color);
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x) {
            if (out.mask(x, y))
                out.depth.set(x, y, s.depth(x, y));
            else
                out.depth.invalidate(x, y);
        }
    return out;
}

inline std::vector<SynthView> synthesize_views(const ErpImage& src, const DepthMap& src_depth,
                                               const std::vector<BaselineSpec>& baselines,
                                               const SplatParams& params = {})
{
    if (baselines.empty())
        throw ConfigError("synthesize_views: baseline list is empty");
    std::vector<SynthView> views;
    views.reserve(baselines.size());
    for (const auto& b : baselines)
        views.push_back(forward_splat(src, src_depth, b, params));
    return views;
}

/// Default synthesis baselines: three vertical offsets (M = 3).
inline std::vector<BaselineSpec> default_baselines()
{
    return {{BaselineAxis::Vertical, -0.24}, {BaselineAxis::Vertical, 0.24}, {BaselineAxis::Vertical, 0.4}};
}

} // namespace panosweep

#endif // PANOSWEEP_DIBR_HPP
