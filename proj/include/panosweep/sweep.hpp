#ifndef PANOSWEEP_SWEEP_HPP
#define PANOSWEEP_SWEEP_HPP

// Multi-view spherical plane sweep.
//
//   hypotheses (uniform in inverse depth)  ->  spherical warping of every
//   reference view  ->  variance fusion  ->  guided-filter aggregation  ->
//   soft-argmin regression  ->  per-pixel cascade window for the next level.

#include "panosweep/camera.hpp"
#include "panosweep/features.hpp"
#include "panosweep/geometry.hpp"
#include "panosweep/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace panosweep {

enum class SamplingStrategy
{
    InverseDepth, // uniform in 1/d
    Depth,        // uniform in d
    Random        // uniform in d with Gaussian jitter
};

inline std::string to_string(SamplingStrategy s)
{
    switch (s) {
    case SamplingStrategy::InverseDepth:
        return "inverse_depth";
    case SamplingStrategy::Depth:
        return "depth";
    case SamplingStrategy::Random:
        return "random";
    }
    return "unknown";
}

/// How vertical-baseline references are mapped onto the target. Horizontal
/// baselines always use the exact per-pixel 2-D mapping.
enum class WarpModel
{
    Swl,  // closed-form latitude-dependent row offset
    Exact // exact reprojection at the hypothesis depth
};

/// Depth hypotheses of one cascade level, stored as inverse depths that
/// increase with the plane index j (plane 0 is the farthest).
struct HypothesisSet
{
    int level = 1;
    int planes = 0;
    double d_min = 0.2;
    double d_max = 8.0;
    SamplingStrategy strategy = SamplingStrategy::InverseDepth;
    double scale = 1.0; // interval scale v at level 1

    int width = 0; // non-zero for per-pixel sets
    int height = 0;
    std::vector<double> inv;  // [j] or [j * W * H + pixel]
    std::vector<double> base; // uniform-inverse sets: first plane, size 1 or W * H
    std::vector<double> step; // uniform-inverse sets: plane interval in 1/m

    bool per_pixel() const noexcept { return width > 0; }
    bool uniform_inverse() const noexcept { return !step.empty(); }
    std::size_t pixel_count() const noexcept
    {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    double inv_depth(int j, std::size_t pixel) const
    {
        return per_pixel() ? inv[static_cast<std::size_t>(j) * pixel_count() + pixel] : inv[static_cast<std::size_t>(j)];
    }
    double depth(int j, std::size_t pixel) const { return 1.0 / inv_depth(j, pixel); }
    double base_at(std::size_t pixel) const { return base.size() == 1 ? base[0] : base[pixel]; }
    double step_at(std::size_t pixel) const { return step.size() == 1 ? step[0] : step[pixel]; }
};

namespace detail {

inline void check_range(double d_min, double d_max)
{
    if (!(d_min > 0.0) || !(d_max > d_min) || !std::isfinite(d_max))
        throw ConfigError("depth range requires 0 < d_min < d_max");
}

inline void check_planes(int planes)
{
    if (planes < 2)
        throw ConfigError("at least two hypothesis planes are required");
}

} // namespace detail

/// Level-1 planes uniform in inverse depth:
///   1/d_j = 1/d_max + (1/d_min - 1/d_max) * (v * j) / (D - 1).
inline HypothesisSet sample_hypotheses(double d_min, double d_max, int planes, double v = 1.0)
{
    detail::check_range(d_min, d_max);
    detail::check_planes(planes);
    if (!(v > 0.0 && v <= 1.0))
        throw ConfigError("interval scale v must lie in (0, 1]");
    HypothesisSet h;
    h.planes = planes;
    h.d_min = d_min;
    h.d_max = d_max;
    h.scale = v;
    const double span = 1.0 / d_min - 1.0 / d_max;
    h.inv.resize(static_cast<std::size_t>(planes));
    for (int j = 0; j < planes; ++j)
        h.inv[static_cast<std::size_t>(j)] = 1.0 / d_max + span * (v * j) / (planes - 1);
    h.base = {1.0 / d_max};
    h.step = {span * v / (planes - 1)};
    return h;
}

/// Level-1 planes uniform in depth, ordered far to near.
inline HypothesisSet sample_depth_uniform(double d_min, double d_max, int planes)
{
    detail::check_range(d_min, d_max);
    detail::check_planes(planes);
    HypothesisSet h;
    h.planes = planes;
    h.d_min = d_min;
    h.d_max = d_max;
    h.strategy = SamplingStrategy::Depth;
    h.inv.resize(static_cast<std::size_t>(planes));
    for (int j = 0; j < planes; ++j)
        h.inv[static_cast<std::size_t>(j)] = 1.0 / (d_max - (d_max - d_min) * j / (planes - 1));
    return h;
}

namespace detail {

/// Jitters depth-uniform planes by N(0, (sigma * spacing)^2), clamps to the
/// range and re-sorts so that inverse depth increases with j.
inline void jitter_planes(double* inv, int planes, double lo_d, double hi_d, double spacing, double sigma,
                          std::mt19937_64& rng)
{
    std::normal_distribution<double> noise(0.0, sigma * spacing);
    for (int j = 0; j < planes; ++j) {
        const double d = std::clamp(1.0 / inv[j] + noise(rng), lo_d, hi_d);
        inv[j] = 1.0 / d;
    }
    std::sort(inv, inv + planes);
}

} // namespace detail

/// Level-1 planes uniform in depth plus Gaussian jitter (sigma in units of
/// the plane spacing). Deterministic for a given seed.
inline HypothesisSet sample_random(double d_min, double d_max, int planes, double sigma, std::uint64_t seed)
{
    HypothesisSet h = sample_depth_uniform(d_min, d_max, planes);
    h.strategy = SamplingStrategy::Random;
    std::mt19937_64 rng(seed);
    detail::jitter_planes(h.inv.data(), planes, d_min, d_max, (d_max - d_min) / (planes - 1), sigma, rng);
    return h;
}

/// Per-row latitude raster in [-pi/2, pi/2] (positive towards +y).
inline Raster<double> latitude_raster(int width, int height)
{
    Raster<double> lat(width, height);
    for (int y = 0; y < height; ++y) {
        const double l = 0.5 * kPi - (y + 0.5) / height * kPi;
        for (int x = 0; x < width; ++x)
            lat(x, y) = l;
    }
    return lat;
}

/// Spherical-warping row offset for one pixel:
///   C_y = cos(lat) * b / d * H_f / pi.
inline double swl_offset(double latitude, double baseline, double depth, int feature_height)
{
    return std::cos(latitude) * baseline / depth * (feature_height / kPi);
}

/// Row-offset raster C_y for plane j (C_x is identically zero).
inline Raster<double> swl_displacement(const HypothesisSet& hyp, int j, const Raster<double>& latitude,
                                       const BaselineSpec& b, int feature_height)
{
    if (b.axis != BaselineAxis::Vertical)
        throw ConfigError("swl_displacement: only vertical baselines use the closed-form row offset");
    if (j < 0 || j >= hyp.planes)
        throw ConfigError("swl_displacement: plane index out of range");
    if (hyp.per_pixel() && !latitude.same_shape(hyp.width, hyp.height))
        throw ConfigError("swl_displacement: latitude raster does not match the hypothesis set");
    Raster<double> cy(latitude.width(), latitude.height());
    for (std::size_t i = 0; i < cy.size(); ++i) {
        const double d = hyp.depth(j, i);
        if (!(d > 0.0))
            throw DomainError("swl_displacement: hypothesis depth must be positive");
        cy[i] = swl_offset(latitude[i], b.offset, d, feature_height);
    }
    return cy;
}

/// Where target pixel (x, y) at hypothesis depth `depth` is found in the
/// reference view. Returns false if the point coincides with the
/// reference camera centre.
inline bool reference_coord(int x, int y, double depth, const BaselineSpec& b, WarpModel vertical_model, int width,
                            int height, PixelCoord& out)
{
    if (b.offset == 0.0) {
        out = {static_cast<double>(x), static_cast<double>(y)};
        return true;
    }
    if (b.axis == BaselineAxis::Vertical && vertical_model == WarpModel::Swl) {
        const double lat = 0.5 * kPi - (y + 0.5) / height * kPi;
        out = {static_cast<double>(x), y + swl_offset(lat, b.offset, depth, height)};
        return true;
    }
    const Vec3 p = pixel_ray(x, y, width, height) * depth - b.translation();
    if (norm(p) < 1e-12 * depth)
        return false;
    out = sph_to_pixel(cart_to_sph(p), width, height);
    return true;
}

/// D x H x W matching costs with the number of views that contributed to
/// each cell (target included). Cells with fewer than two views hold +inf.
struct CostVolume
{
    int planes = 0;
    int width = 0;
    int height = 0;
    std::vector<float> cost;
    std::vector<std::uint8_t> count;

    CostVolume() = default;
    CostVolume(int d, int w, int h, float fill = 0.f)
        : planes(d), width(w), height(h),
          cost(static_cast<std::size_t>(d) * static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill),
          count(cost.size(), 0)
    {
    }

    std::size_t pixel_count() const noexcept
    {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    std::size_t index(int j, std::size_t pixel) const noexcept
    {
        return static_cast<std::size_t>(j) * pixel_count() + pixel;
    }
    float& at(int j, std::size_t pixel) { return cost[index(j, pixel)]; }
    float at(int j, std::size_t pixel) const { return cost[index(j, pixel)]; }
    bool reliable(int j, std::size_t pixel) const { return count[index(j, pixel)] >= 2; }
};

/// A reference view prepared for cost-volume construction.
struct CostRef
{
    const FeatureMap* features = nullptr;
    BaselineSpec baseline;
};

/// Variance fusion: per plane and pixel, every reference is sampled at its
/// own baseline-specific location, stacked with the target descriptor, and
/// the per-channel population variance over the valid views is averaged over
/// channels.
inline CostVolume build_cost_volume(const FeatureMap& target, const std::vector<CostRef>& refs,
                                    const HypothesisSet& hyp, WarpModel vertical_model = WarpModel::Swl,
                                    int threads = 1)
{
    if (refs.empty())
        throw ConfigError("build_cost_volume: at least one reference view is required");
    for (const auto& r : refs) {
        if (!r.features || r.features->width != target.width || r.features->height != target.height ||
            r.features->channels != target.channels)
            throw ConfigError("build_cost_volume: reference features do not match the target");
    }
    if (hyp.per_pixel() && (hyp.width != target.width || hyp.height != target.height))
        throw ConfigError("build_cost_volume: per-pixel hypotheses do not match the feature map");

    const int w = target.width, h = target.height, nc = target.channels;
    const int nviews = static_cast<int>(refs.size()) + 1;
    CostVolume cv(hyp.planes, w, h, std::numeric_limits<float>::infinity());

    parallel_rows(h, threads, [&](int y) {
        std::vector<float> samples(static_cast<std::size_t>(nviews) * nc);
        for (int x = 0; x < w; ++x) {
            const std::size_t pix = static_cast<std::size_t>(y) * w + x;
            const bool target_ok = target.valid[pix] != 0;
            const float* tf = target.at(pix);
            for (int j = 0; j < hyp.planes; ++j) {
                const std::size_t cell = cv.index(j, pix);
                if (!target_ok) {
                    cv.count[cell] = 0;
                    continue;
                }
                std::copy(tf, tf + nc, samples.begin());
                int n = 1;
                const double d = hyp.depth(j, pix);
                for (const auto& r : refs) {
                    PixelCoord src;
                    if (!reference_coord(x, y, d, r.baseline, vertical_model, w, h, src))
                        continue;
                    if (sample_features(*r.features, src.u, src.v, samples.data() + static_cast<std::size_t>(n) * nc))
                        ++n;
                }
                cv.count[cell] = static_cast<std::uint8_t>(n);
                if (n < 2)
                    continue;
                double total = 0.0;
                for (int c = 0; c < nc; ++c) {
                    double mean = 0.0;
                    for (int k = 0; k < n; ++k)
                        mean += samples[static_cast<std::size_t>(k) * nc + c];
                    mean /= n;
                    double var = 0.0;
                    for (int k = 0; k < n; ++k) {
                        const double dv = samples[static_cast<std::size_t>(k) * nc + c] - mean;
                        var += dv * dv;
                    }
                    total += var / n;
                }
                cv.cost[cell] = static_cast<float>(total / nc);
            }
        }
    });
    return cv;
}

struct AggregationParams
{
    int radius = 4;
    double eps = 1e-2; // edge threshold on guide luminance variance
};

namespace detail {

/// Normalised box mean of radius r: columns wrap, rows are truncated at the
/// image border.
inline void box_mean(const std::vector<double>& in, std::vector<double>& out, std::vector<double>& tmp, int w, int h,
                     int r)
{
    tmp.assign(in.size(), 0.0);
    const int win = 2 * r + 1;
    for (int y = 0; y < h; ++y) {
        const double* row = in.data() + static_cast<std::size_t>(y) * w;
        double* dst = tmp.data() + static_cast<std::size_t>(y) * w;
        if (win >= w) {
            double s = 0.0;
            for (int x = 0; x < w; ++x)
                s += row[x];
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int k = -r; k <= r; ++k)
                    acc += row[wrap_index(x + k, w)];
                dst[x] = acc;
            }
            continue;
        }
        double acc = 0.0;
        for (int k = -r; k <= r; ++k)
            acc += row[wrap_index(k, w)];
        for (int x = 0; x < w; ++x) {
            dst[x] = acc;
            acc += row[wrap_index(x + r + 1, w)] - row[wrap_index(x - r, w)];
        }
    }
    out.assign(in.size(), 0.0);
    std::vector<double> col(static_cast<std::size_t>(h) + 1);
    for (int x = 0; x < w; ++x) {
        col[0] = 0.0;
        for (int y = 0; y < h; ++y)
            col[static_cast<std::size_t>(y) + 1] = col[static_cast<std::size_t>(y)] + tmp[static_cast<std::size_t>(y) * w + x];
        for (int y = 0; y < h; ++y) {
            const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
            const double s = col[static_cast<std::size_t>(y1) + 1] - col[static_cast<std::size_t>(y0)];
            out[static_cast<std::size_t>(y) * w + x] = s / (static_cast<double>(y1 - y0 + 1) * win);
        }
    }
}

} // namespace detail

/// Edge-aware per-plane smoothing with a guided filter whose guide is the
/// target luminance. Unreliable (+inf) cells are filled with the slice's
/// largest finite cost while filtering and restored afterwards.
inline CostVolume aggregate_cost(const CostVolume& cv, const ErpImage& guide, const AggregationParams& params = {},
                                 int threads = 1)
{
    if (guide.width() != cv.width || guide.height() != cv.height)
        throw ConfigError("aggregate_cost: guide dimensions differ from the cost volume");
    if (params.radius < 0 || !(params.eps > 0.0))
        throw ConfigError("aggregate_cost: radius must be >= 0 and eps > 0");
    const int w = cv.width, h = cv.height, r = params.radius;
    const std::size_t n = cv.pixel_count();

    std::vector<double> I(n), II(n), mean_I, var_I, tmp;
    for (std::size_t i = 0; i < n; ++i) {
        I[i] = guide.pixels()[i].luminance();
        II[i] = I[i] * I[i];
    }
    detail::box_mean(I, mean_I, tmp, w, h, r);
    detail::box_mean(II, var_I, tmp, w, h, r);
    for (std::size_t i = 0; i < n; ++i)
        var_I[i] -= mean_I[i] * mean_I[i];

    CostVolume out = cv;
    parallel_rows(cv.planes, threads, [&](int j) {
        std::vector<double> p(n), Ip(n), mean_p, mean_Ip, a(n), b(n), mean_a, mean_b, scratch;
        double fill = 0.0;
        bool any_inf = false;
        for (std::size_t i = 0; i < n; ++i) {
            const float c = cv.at(j, i);
            if (std::isfinite(c))
                fill = std::max(fill, static_cast<double>(c));
            else
                any_inf = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const float c = cv.at(j, i);
            p[i] = std::isfinite(c) ? c : fill;
            Ip[i] = I[i] * p[i];
        }
        detail::box_mean(p, mean_p, scratch, w, h, r);
        detail::box_mean(Ip, mean_Ip, scratch, w, h, r);
        for (std::size_t i = 0; i < n; ++i) {
            const double cov = mean_Ip[i] - mean_I[i] * mean_p[i];
            a[i] = cov / (var_I[i] + params.eps);
            b[i] = mean_p[i] - a[i] * mean_I[i];
        }
        detail::box_mean(a, mean_a, scratch, w, h, r);
        detail::box_mean(b, mean_b, scratch, w, h, r);
        for (std::size_t i = 0; i < n; ++i) {
            if (any_inf && !std::isfinite(cv.at(j, i)))
                continue;
            out.at(j, i) = static_cast<float>(std::max(0.0, mean_a[i] * I[i] + mean_b[i]));
        }
    });
    return out;
}

/// Softmax over planes of -cost / tau at one pixel; unreliable cells get
/// zero weight. Returns false when no plane is reliable.
inline bool plane_probabilities(const CostVolume& cv, std::size_t pixel, double tau, std::vector<double>& prob)
{
    prob.assign(static_cast<std::size_t>(cv.planes), 0.0);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < cv.planes; ++j) {
        const float c = cv.at(j, pixel);
        if (std::isfinite(c) && cv.reliable(j, pixel))
            best = std::min(best, static_cast<double>(c));
    }
    if (!std::isfinite(best))
        return false;
    double z = 0.0;
    for (int j = 0; j < cv.planes; ++j) {
        const float c = cv.at(j, pixel);
        if (std::isfinite(c) && cv.reliable(j, pixel)) {
            prob[static_cast<std::size_t>(j)] = std::exp(-(c - best) / tau);
            z += prob[static_cast<std::size_t>(j)];
        }
    }
    for (auto& p : prob)
        p /= z;
    return true;
}

/// Soft-argmin depth regression. For uniform inverse-depth sets
///   k = sum_j p_j * j,   1/d = base + step * k,
/// which is the level's sampling formula evaluated at fractional index k.
/// Other sets use the probability-weighted inverse depth. The result is
/// clamped to [1/d_max, 1/d_min].
inline DepthMap regress_depth(const CostVolume& cv, const HypothesisSet& hyp, double tau, int threads = 1)
{
    if (!(tau > 0.0))
        throw ConfigError("regress_depth: temperature must be positive");
    if (cv.planes != hyp.planes)
        throw ConfigError("regress_depth: plane count mismatch");
    if (hyp.per_pixel() && (hyp.width != cv.width || hyp.height != cv.height))
        throw ConfigError("regress_depth: hypothesis raster mismatch");
    DepthMap out(cv.width, cv.height, hyp.d_min, hyp.d_max);
    const double inv_lo = 1.0 / hyp.d_max, inv_hi = 1.0 / hyp.d_min;
    parallel_rows(cv.height, threads, [&](int y) {
        std::vector<double> prob;
        for (int x = 0; x < cv.width; ++x) {
            const std::size_t pix = static_cast<std::size_t>(y) * cv.width + x;
            if (!plane_probabilities(cv, pix, tau, prob)) {
                out.invalidate(x, y);
                continue;
            }
            double inv = 0.0;
            if (hyp.uniform_inverse()) {
                double k = 0.0;
                for (int j = 0; j < cv.planes; ++j)
                    k += prob[static_cast<std::size_t>(j)] * j;
                inv = hyp.base_at(pix) + hyp.step_at(pix) * k;
            } else {
                for (int j = 0; j < cv.planes; ++j)
                    inv += prob[static_cast<std::size_t>(j)] * hyp.inv_depth(j, pix);
            }
            inv = std::clamp(inv, inv_lo, inv_hi);
            out.set(x, y, 1.0 / inv);
        }
    });
    return out;
}

/// Per-pixel hypothesis window around the previous level's prediction.
///
/// Inverse-depth sampling:
///   lo = max(1/d~ - D*v/2, 1/d_max),  hi = min(1/d_min, 1/d~ + D*v/2),
///   planes uniform on [lo, hi] with interval (hi - lo) / (D - 1).
/// Depth and random sampling apply the same window in depth (v in meters).
/// Invalid previous pixels fall back to the full level-1 range.
inline HypothesisSet cascade_refine(const DepthMap& prev, int planes, double interval, double d_min, double d_max,
                                    SamplingStrategy strategy = SamplingStrategy::InverseDepth, int level = 2,
                                    double jitter_sigma = 0.25, std::uint64_t seed = 0)
{
    detail::check_range(d_min, d_max);
    detail::check_planes(planes);
    if (!(interval > 0.0))
        throw ConfigError("cascade_refine: interval must be positive");
    HypothesisSet h;
    h.level = level;
    h.planes = planes;
    h.d_min = d_min;
    h.d_max = d_max;
    h.strategy = strategy;
    h.width = prev.width();
    h.height = prev.height();
    const std::size_t n = h.pixel_count();
    h.inv.resize(n * static_cast<std::size_t>(planes));
    const double half = 0.5 * planes * interval;
    std::vector<double> column(static_cast<std::size_t>(planes));
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(level)));

    if (strategy == SamplingStrategy::InverseDepth) {
        h.base.resize(n);
        h.step.resize(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool ok = prev.valid[i] != 0 && prev.depth[i] > 0.0;
        if (strategy == SamplingStrategy::InverseDepth) {
            double lo = 1.0 / d_max, hi = 1.0 / d_min;
            if (ok) {
                const double c = std::clamp(1.0 / prev.depth[i], lo, hi);
                lo = std::max(c - half, 1.0 / d_max);
                hi = std::min(1.0 / d_min, c + half);
            }
            const double step = (hi - lo) / (planes - 1);
            h.base[i] = lo;
            h.step[i] = step;
            for (int j = 0; j < planes; ++j)
                h.inv[static_cast<std::size_t>(j) * n + i] = lo + step * j;
        } else {
            double lo = d_min, hi = d_max;
            if (ok) {
                const double c = std::clamp(prev.depth[i], d_min, d_max);
                lo = std::max(c - half, d_min);
                hi = std::min(d_max, c + half);
            }
            for (int j = 0; j < planes; ++j)
                column[static_cast<std::size_t>(j)] = 1.0 / (hi - (hi - lo) * j / (planes - 1));
            if (strategy == SamplingStrategy::Random)
                detail::jitter_planes(column.data(), planes, lo, hi, (hi - lo) / (planes - 1), jitter_sigma, rng);
            for (int j = 0; j < planes; ++j)
                h.inv[static_cast<std::size_t>(j) * n + i] = column[static_cast<std::size_t>(j)];
        }
    }
    return h;
}

struct SweepConfig
{
    std::vector<int> planes{48, 24}; // D_l per cascade level
    double interval_scale = 1.0;     // v at level 1
    std::vector<double> intervals;   // v_l for levels >= 2; empty -> default
    double tau = 1e-4;
    DescriptorKind descriptor = DescriptorKind::Rgb;
    double d_min = 0.2;
    double d_max = 8.0;
    SamplingStrategy sampling = SamplingStrategy::InverseDepth;
    double jitter_sigma = 0.25;
    bool aggregate = true;
    AggregationParams aggregation;
    WarpModel vertical_warp = WarpModel::Exact;
    FeatureParams features;
    std::uint64_t seed = 0;
    int threads = 1;

    int levels() const { return static_cast<int>(planes.size()); }

    void validate() const
    {
        if (planes.empty())
            throw ConfigError("sweep: at least one cascade level is required");
        for (int d : planes)
            detail::check_planes(d);
        detail::check_range(d_min, d_max);
        if (!(interval_scale > 0.0 && interval_scale <= 1.0))
            throw ConfigError("sweep: interval scale must lie in (0, 1]");
        if (!intervals.empty() && intervals.size() + 1 != planes.size())
            throw ConfigError("sweep: 'intervals' must list one value per level after the first");
        for (double v : intervals)
            if (!(v > 0.0))
                throw ConfigError("sweep: level intervals must be positive");
        if (!(tau > 0.0))
            throw ConfigError("sweep: tau must be positive");
        if (threads < 1)
            throw ConfigError("sweep: threads must be >= 1");
    }

    /// Plane interval of level l >= 2 (0-based index `level_index`). The
    /// default makes the level window span 2 / D_{l-1} of the full range.
    double interval(int level_index) const
    {
        if (!intervals.empty())
            return intervals[static_cast<std::size_t>(level_index - 1)];
        const double span = sampling == SamplingStrategy::InverseDepth ? 1.0 / d_min - 1.0 / d_max : d_max - d_min;
        return 2.0 * span /
               (static_cast<double>(planes[static_cast<std::size_t>(level_index - 1)]) *
                planes[static_cast<std::size_t>(level_index)]);
    }

    HypothesisSet first_level() const
    {
        switch (sampling) {
        case SamplingStrategy::Depth:
            return sample_depth_uniform(d_min, d_max, planes.front());
        case SamplingStrategy::Random:
            return sample_random(d_min, d_max, planes.front(), jitter_sigma, seed);
        default:
            return sample_hypotheses(d_min, d_max, planes.front(), interval_scale);
        }
    }
};

/// One reference view: synthesised (or captured) image, its baseline
/// relative to the target, and a hole mask (1 = usable).
struct SweepInput
{
    ErpImage rgb;
    BaselineSpec baseline;
    Raster<std::uint8_t> mask;
};

struct SweepResult
{
    DepthMap depth;
    std::vector<DepthMap> levels;
};

inline SweepResult run_sweep(const ErpImage& target, const std::vector<SweepInput>& refs, const SweepConfig& config)
{
    config.validate();
    if (refs.empty())
        throw ConfigError("run_sweep: at least one reference view is required");
    const FeatureMap target_features = extract_features(target, config.descriptor, nullptr, config.features);
    std::vector<FeatureMap> ref_features;
    ref_features.reserve(refs.size());
    for (const auto& r : refs) {
        if (r.rgb.width() != target.width() || r.rgb.height() != target.height())
            throw ConfigError("run_sweep: reference and target dimensions differ");
        const Raster<std::uint8_t>* mask = r.mask.empty() ? nullptr : &r.mask;
        ref_features.push_back(extract_features(r.rgb, config.descriptor, mask, config.features));
    }
    std::vector<CostRef> cost_refs;
    for (std::size_t i = 0; i < refs.size(); ++i)
        cost_refs.push_back({&ref_features[i], refs[i].baseline});

    SweepResult result;
    HypothesisSet hyp = config.first_level();
    for (int l = 0; l < config.levels(); ++l) {
        if (l > 0)
            hyp = cascade_refine(result.levels.back(), config.planes[static_cast<std::size_t>(l)], config.interval(l),
                                 config.d_min, config.d_max, config.sampling, l + 1, config.jitter_sigma, config.seed);
        CostVolume cv = build_cost_volume(target_features, cost_refs, hyp, config.vertical_warp, config.threads);
        if (config.aggregate)
            cv = aggregate_cost(cv, target, config.aggregation, config.threads);
        result.levels.push_back(regress_depth(cv, hyp, config.tau, config.threads));
    }
    result.depth = result.levels.back();
    return result;
}

} // namespace panosweep

#endif // PANOSWEEP_SWEEP_HPP
