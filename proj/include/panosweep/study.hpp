#ifndef PANOSWEEP_STUDY_HPP
#define PANOSWEEP_STUDY_HPP

// View-synthesis quality versus baseline and field of view.
//
// For every (baseline, FoV) cell the shifted view is synthesised from the
// original RGB-D either directly on the ERP (FoV 360) or per perspective
// crop. Each crop is mapped back onto the ERP pixels it covers, excluding
// a `margin`-pixel border. The ground truth of the shifted view goes
// through the identical crop and mapping path, so resampling cancels.
// Error fields are low-passed with a Gaussian before squaring: bilinear
// resampling preserves local means, so the sub-pixel blur of splatting drops
// out while occlusion and boundary errors remain.

#include "panosweep/camera.hpp"
#include "panosweep/dibr.hpp"
#include "panosweep/scene.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace panosweep {

inline double mse(const Raster<Rgb>& a, const Raster<Rgb>& b, const Raster<std::uint8_t>* mask = nullptr)
{
    if (!a.same_shape(b) || (mask && !mask->same_shape(a)))
        throw ConfigError("mse: image dimensions differ");
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (mask && !(*mask)[i])
            continue;
        for (int c = 0; c < 3; ++c) {
            const double d = static_cast<double>(a[i][c]) - b[i][c];
            s += d * d;
        }
        ++n;
    }
    if (n == 0)
        throw NumericalError("mse: empty mask");
    return s / (3.0 * static_cast<double>(n));
}

inline double mse(const ErpImage& a, const ErpImage& b, const Raster<std::uint8_t>* mask = nullptr)
{
    return mse(a.pixels(), b.pixels(), mask);
}

struct FovStudyParams
{
    std::vector<double> baselines{0.01, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64}; // vertical, meters
    std::vector<double> fovs{64.0, 80.0, 96.0, 112.0, 128.0, 360.0};         // degrees; 360 = full ERP
    int grid_rows = 4;             // latitude samples of the crop grid
    int grid_cols = 6;             // longitude samples
    int margin = 2;                // crop-border pixels excluded from the comparison
    int viewpoints = 1;            // camera positions averaged per scene (scene camera + jittered ones)
    double jitter_radius = 0.1;    // meters, horizontal offset of the jittered positions
    double crop_focal_scale = 0.5; // crop focal length in units of the ERP's H / pi
    int supersample = 4;           // anti-aliasing rays per pixel edge for the rendered views
    double aa_sigma = 0.0;         // Gaussian anti-aliasing filter, pixels (0 = box over each pixel)
    double lowpass_sigma = 4.0;    // Gaussian low-pass of the error field, ERP pixels (0 = per pixel)
    SplatParams splat{2.0, 1e-4};
};

/// Crop centre directions (yaw, pitch) on a uniform rows x cols grid.
inline std::vector<std::pair<double, double>> crop_directions(int rows, int cols)
{
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < rows; ++i) {
        const double pitch = -0.5 * kPi + kPi * (i + 0.5) / rows;
        for (int k = 0; k < cols; ++k)
            out.emplace_back(-kPi + 2.0 * kPi * (k + 0.5) / cols, pitch);
    }
    return out;
}

/// Square crop edge length for focal length scale * H / pi (scale 1 gives
/// the ERP angular resolution at the optical axis).
inline int crop_size(double fov_deg, int erp_height, double scale = 1.0)
{
    const double f = scale * erp_height / kPi;
    return std::max(1, static_cast<int>(std::lround(2.0 * f * std::tan(0.5 * fov_deg * kPi / 180.0))));
}

namespace detail {

/// Normalised Gaussian low-pass of `img` over the pixels where `mask` is
/// set; taps outside the mask or the raster are dropped. Columns wrap when
/// `wrap` is set. Pixels with no masked support come out zero.
inline Raster<Rgb> masked_lowpass(const Raster<Rgb>& img, const Raster<std::uint8_t>& mask, double sigma, bool wrap)
{
    if (!(sigma > 0.0))
        return img;
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    for (int i = -r; i <= r; ++i)
        k[static_cast<std::size_t>(i + r)] = std::exp(-0.5 * i * i / (sigma * sigma));
    const int w = img.width(), h = img.height();
    Raster<std::array<double, 4>> tmp(w, h), acc(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};
            for (int i = -r; i <= r; ++i) {
                int xx = x + i;
                if (wrap)
                    xx = wrap_index(xx, w);
                else if (xx < 0 || xx >= w)
                    continue;
                if (!mask(xx, y))
                    continue;
                const double kw = k[static_cast<std::size_t>(i + r)];
                const Rgb& c = img(xx, y);
                a[0] += kw * c.r;
                a[1] += kw * c.g;
                a[2] += kw * c.b;
                a[3] += kw;
            }
            tmp(x, y) = a;
        }
    Raster<Rgb> out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};
            for (int i = std::max(-r, -y); i <= std::min(r, h - 1 - y); ++i) {
                const double kw = k[static_cast<std::size_t>(i + r)];
                const auto& t = tmp(x, y + i);
                for (int c = 0; c < 4; ++c)
                    a[static_cast<std::size_t>(c)] += kw * t[static_cast<std::size_t>(c)];
            }
            if (a[3] > 0.0)
                out(x, y) = {static_cast<float>(a[0] / a[3]), static_cast<float>(a[1] / a[3]),
                             static_cast<float>(a[2] / a[3])};
            else
                out(x, y) = {0.0f, 0.0f, 0.0f};
        }
    return out;
}

inline Raster<Rgb> difference(const Raster<Rgb>& a, const Raster<Rgb>& b)
{
    Raster<Rgb> d(a.width(), a.height());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = {a[i].r - b[i].r, a[i].g - b[i].g, a[i].b - b[i].b};
    return d;
}

struct Crop
{
    PinholeCamera cam;
    Raster<Rgb> color;
    Raster<double> depth;
    Raster<std::uint8_t> valid;
};

/// Colour by bilinear ERP sampling, depth by nearest ERP pixel.
inline Crop make_crop(const RgbdImage& erp, const PinholeCamera& cam)
{
    Crop c{cam, Raster<Rgb>(cam.width, cam.height), Raster<double>(cam.width, cam.height, 0.0),
           Raster<std::uint8_t>(cam.width, cam.height, 0)};
    const int w = erp.rgb.width(), h = erp.rgb.height();
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            const PixelCoord p = sph_to_pixel(cart_to_sph(cam.ray(x, y)), w, h);
            c.color(x, y) = sample_erp(erp.rgb, p.u, p.v);
            const int ix = wrap_index(static_cast<int>(std::lround(p.u)), w);
            const int iy = std::clamp(static_cast<int>(std::lround(p.v)), 0, h - 1);
            if (erp.depth.valid(ix, iy)) {
                c.depth(x, y) = erp.depth.depth(ix, iy);
                c.valid(x, y) = 1;
            }
        }
    return c;
}

/// Fills uncovered pixels with the nearest covered pixel of the same row.
inline void fill_holes_rowwise(Raster<Rgb>& img, const Raster<std::uint8_t>& covered, bool wrap)
{
    const int w = img.width();
    for (int y = 0; y < img.height(); ++y) {
        bool any = false;
        for (int x = 0; x < w; ++x)
            any = any || covered(x, y);
        if (!any)
            continue;
        for (int x = 0; x < w; ++x) {
            if (covered(x, y))
                continue;
            for (int r = 1; r < w; ++r) {
                const int l = x - r, rr = x + r;
                const int li = wrap ? wrap_index(l, w) : l, ri = wrap ? wrap_index(rr, w) : rr;
                if (li >= 0 && li < w && covered(li, y)) {
                    img(x, y) = img(li, y);
                    break;
                }
                if (ri >= 0 && ri < w && covered(ri, y)) {
                    img(x, y) = img(ri, y);
                    break;
                }
            }
        }
    }
}

/// ERP pixels that project inside a crop, at least `margin` pixels from
/// its border, with their crop coordinates.
struct Footprint
{
    std::vector<std::size_t> erp_index;
    std::vector<PixelCoord> at;
};

inline Footprint footprint(const PinholeCamera& cam, int width, int height, int margin)
{
    Footprint f;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const auto proj = cam.project(pixel_ray(x, y, width, height));
            if (!proj)
                continue;
            const PixelCoord p = proj->pixel;
            if (p.u < margin || p.v < margin || p.u > cam.width - 1 - margin || p.v > cam.height - 1 - margin)
                continue;
            f.erp_index.push_back(static_cast<std::size_t>(y) * width + x);
            f.at.push_back(p);
        }
    return f;
}

} // namespace detail

/// MSE table for one scene: one row per FoV, one column per baseline.
struct FovStudyResult
{
    std::vector<double> fovs;
    std::vector<double> baselines;
    std::vector<std::vector<double>> mse; // [fov][baseline]
};

inline FovStudyResult baseline_fov_study(const SceneSpec& scene, int width, int height, const FovStudyParams& params,
                                         int threads = 1)
{
    check_erp_shape(width, height);
    if (params.baselines.empty() || params.fovs.empty())
        throw ConfigError("baseline/FoV study: baseline and FoV lists must be non-empty");
    if (params.grid_rows < 1 || params.grid_cols < 1 || params.margin < 0)
        throw ConfigError("baseline/FoV study: invalid crop grid");
    for (double f : params.fovs)
        if (!(f > 0.0 && (f < 180.0 || f == 360.0)))
            throw ConfigError("baseline/FoV study: FoV must lie in (0, 180) degrees or equal 360");

    if (params.viewpoints < 1 || !(params.jitter_radius >= 0.0))
        throw ConfigError("baseline/FoV study: need at least one viewpoint and a non-negative jitter radius");

    struct FovSetup
    {
        int size = 0;
        std::vector<PinholeCamera> cams;
        std::vector<detail::Footprint> prints;
    };
    std::vector<FovSetup> setups;
    for (double fov : params.fovs) {
        FovSetup fs;
        if (fov != 360.0) {
            fs.size = crop_size(fov, height, params.crop_focal_scale);
            for (const auto& [yaw, pitch] : crop_directions(params.grid_rows, params.grid_cols)) {
                fs.cams.emplace_back(fs.size, fs.size, fov, yaw, pitch);
                fs.prints.push_back(detail::footprint(fs.cams.back(), width, height, params.margin));
            }
        }
        setups.push_back(std::move(fs));
    }

    const auto render = [&](const Vec3& cam) {
        return raycast_erp_antialiased(scene, cam, width, height, params.supersample, threads, params.aa_sigma);
    };

    FovStudyResult res{params.fovs, params.baselines,
                       std::vector<std::vector<double>>(params.fovs.size(),
                                                        std::vector<double>(params.baselines.size(), 0.0))};
    for (int vp = 0; vp < params.viewpoints; ++vp) {
        Vec3 origin = scene.camera;
        if (vp > 0) {
            const double a = 2.0 * kPi * (vp - 1) / std::max(1, params.viewpoints - 1);
            origin = origin + Vec3{params.jitter_radius * std::cos(a), 0.0, params.jitter_radius * std::sin(a)};
        }
        const RgbdImage src = render(origin);
        std::vector<RgbdImage> targets;
        for (double b : params.baselines)
            targets.push_back(render(origin + Vec3{0.0, b, 0.0}));

        for (std::size_t fi = 0; fi < params.fovs.size(); ++fi) {
            const FovSetup& fs = setups[fi];
            std::vector<detail::Crop> src_crops;
            for (const auto& c : fs.cams)
                src_crops.push_back(detail::make_crop(src, c));
            for (std::size_t bi = 0; bi < params.baselines.size(); ++bi) {
                double sum = 0.0;
                std::size_t n = 0;
                const auto add = [&](const Rgb& e) {
                    sum += static_cast<double>(e.r) * e.r + static_cast<double>(e.g) * e.g +
                           static_cast<double>(e.b) * e.b;
                    ++n;
                };
                if (fs.cams.empty()) {
                    SynthView v = forward_splat(src.rgb, src.depth, {BaselineAxis::Vertical, params.baselines[bi]},
                                                params.splat);
                    Raster<Rgb> img = v.rgb.pixels();
                    detail::fill_holes_rowwise(img, v.mask, true);
                    const Raster<std::uint8_t>& valid = targets[bi].depth.valid;
                    const Raster<Rgb> err = detail::masked_lowpass(
                        detail::difference(img, targets[bi].rgb.pixels()), valid, params.lowpass_sigma, true);
                    for (std::size_t i = 0; i < err.size(); ++i)
                        if (valid[i])
                            add(err[i]);
                } else {
                    const Vec3 t{0.0, params.baselines[bi], 0.0};
                    const Raster<std::uint8_t> all(fs.size, fs.size, 1);
                    for (std::size_t k = 0; k < fs.cams.size(); ++k) {
                        const detail::Crop& sc = src_crops[k];
                        SplatRaster s = splat(sc.color, sc.depth, sc.valid, fs.cams[k], fs.cams[k], t, params.splat);
                        detail::fill_holes_rowwise(s.color, s.covered, false);
                        const Raster<Rgb> truth = detail::make_crop(targets[bi], fs.cams[k]).color;
                        // ERP pixel pitch measured in crop pixels at the optical axis.
                        const double scale = fs.cams[k].focal() * kPi / height;
                        const Raster<Rgb> err = detail::masked_lowpass(detail::difference(s.color, truth), all,
                                                                       params.lowpass_sigma * scale, false);
                        const detail::Footprint& fp = fs.prints[k];
                        for (std::size_t i = 0; i < fp.erp_index.size(); ++i)
                            if (const auto taps = clamped_taps(fp.at[i].u, fp.at[i].v, fs.size, fs.size))
                                add(sample_rgb(err, *taps));
                    }
                }
                if (n == 0)
                    throw NumericalError("baseline/FoV study: empty comparison mask");
                res.mse[fi][bi] += sum / (3.0 * static_cast<double>(n)) / params.viewpoints;
            }
        }
    }
    return res;
}

inline std::string fov_label(double fov)
{
    std::ostringstream os;
    os << "fov" << fov;
    return os.str();
}

inline std::string baseline_label(double b)
{
    std::ostringstream os;
    os << "b" << b;
    return os.str();
}

} // namespace panosweep

#endif // PANOSWEEP_STUDY_HPP
