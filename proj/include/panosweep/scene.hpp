#ifndef PANOSWEEP_SCENE_HPP
#define PANOSWEEP_SCENE_HPP

// Analytic scenes (spheres, boxes, planes with procedural textures),
// equirectangular RGB-D ray casting and perspective cropping.

#include "panosweep/camera.hpp"
#include "panosweep/geometry.hpp"
#include "panosweep/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace panosweep {

struct CheckerTexture
{
    double scale = 0.25; // cell edge in meters
    std::vector<Rgb> colors{{0.1f, 0.1f, 0.1f}, {0.9f, 0.9f, 0.9f}};
};

struct ValueNoiseTexture
{
    std::uint64_t seed = 1;
    double scale = 0.1; // lattice spacing in meters
};

using Texture = std::variant<CheckerTexture, ValueNoiseTexture>;

/// Hollow spherical shell: visible from inside and outside.
struct Sphere
{
    Vec3 center;
    double radius = 1.0;
};

/// Solid axis-aligned box.
struct AxisAlignedBox
{
    Vec3 min;
    Vec3 max;
};

/// Infinite two-sided plane.
struct Plane
{
    Vec3 point;
    Vec3 normal{0.0, 1.0, 0.0};
};

using Shape = std::variant<Sphere, AxisAlignedBox, Plane>;

struct Primitive
{
    Shape shape;
    Texture texture;
};

struct SceneSpec
{
    std::string name = "scene";
    std::vector<Primitive> primitives;
    Rgb background{0.5f, 0.5f, 0.5f};
    Vec3 camera;
    double d_min = 0.2;
    double d_max = 8.0;
};

struct PerspImage
{
    double fov_deg = 90.0;
    double yaw = 0.0;
    double pitch = 0.0;
    Raster<Rgb> pixels;

    int width() const noexcept { return pixels.width(); }
    int height() const noexcept { return pixels.height(); }
};

struct RgbdImage
{
    ErpImage rgb;
    DepthMap depth;
};

namespace detail {

inline constexpr double kSurfaceEps = 1e-9;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rgb lattice_color(std::uint64_t seed, std::int64_t i, std::int64_t j, std::int64_t k)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(i));
    h = splitmix64(h ^ static_cast<std::uint64_t>(j));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k));
    const auto channel = [](std::uint64_t bits) { return static_cast<float>((bits & 0xffffu) / 65535.0); };
    return {channel(h), channel(h >> 16), channel(h >> 32)};
}

inline double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

inline Rgb value_noise_octave(std::uint64_t seed, const Vec3& p)
{
    const double fx = std::floor(p.x), fy = std::floor(p.y), fz = std::floor(p.z);
    const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy),
               iz = static_cast<std::int64_t>(fz);
    const double tx = smooth(p.x - fx), ty = smooth(p.y - fy), tz = smooth(p.z - fz);
    double acc[3] = {0.0, 0.0, 0.0};
    for (int c = 0; c < 8; ++c) {
        const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
        const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty) * (dz ? tz : 1.0 - tz);
        const Rgb col = lattice_color(seed, ix + dx, iy + dy, iz + dz);
        acc[0] += w * col.r;
        acc[1] += w * col.g;
        acc[2] += w * col.b;
    }
    return {static_cast<float>(acc[0]), static_cast<float>(acc[1]), static_cast<float>(acc[2])};
}

/// Orthonormal in-plane basis for a unit normal.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& n)
{
    const Vec3 helper = std::abs(n.y) < 0.9 ? Vec3{0.0, 1.0, 0.0} : Vec3{1.0, 0.0, 0.0};
    const Vec3 e1 = normalized(cross(helper, n));
    return {e1, cross(n, e1)};
}

} // namespace detail

/// Texture-space coordinates of a surface point. Planar surfaces use
/// in-plane coordinates (third component zero) so that checker cells never
/// straddle the surface itself.
inline Vec3 texture_coords(const Shape& shape, const Vec3& hit)
{
    return std::visit(
        [&hit](const auto& s) -> Vec3 {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Sphere>) {
                return hit - s.center;
            } else if constexpr (std::is_same_v<S, Plane>) {
                const Vec3 n = normalized(s.normal);
                const auto [e1, e2] = detail::plane_basis(n);
                const Vec3 d = hit - s.point;
                return {dot(d, e1), dot(d, e2), 0.0};
            } else {
                // Face of the box the point lies on: drop that axis.
                int axis = 0;
                double best = std::numeric_limits<double>::infinity();
                for (int a = 0; a < 3; ++a) {
                    const double dist = std::min(std::abs(hit[a] - s.min[a]), std::abs(hit[a] - s.max[a]));
                    if (dist < best) {
                        best = dist;
                        axis = a;
                    }
                }
                if (axis == 0)
                    return {hit.y, hit.z, 0.0};
                if (axis == 1)
                    return {hit.x, hit.z, 0.0};
                return {hit.x, hit.y, 0.0};
            }
        },
        shape);
}

inline Rgb shade(const Texture& tex, const Vec3& tc)
{
    return std::visit(
        [&tc](const auto& t) -> Rgb {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, CheckerTexture>) {
                const auto cell = static_cast<std::int64_t>(std::floor(tc.x / t.scale)) +
                                  static_cast<std::int64_t>(std::floor(tc.y / t.scale)) +
                                  static_cast<std::int64_t>(std::floor(tc.z / t.scale));
                const auto n = static_cast<std::int64_t>(t.colors.size());
                return t.colors[static_cast<std::size_t>(((cell % n) + n) % n)];
            } else {
                const Rgb a = detail::value_noise_octave(t.seed, tc / t.scale);
                const Rgb b = detail::value_noise_octave(t.seed ^ 0x5bd1e995ULL, tc / (0.5 * t.scale));
                return {0.65f * a.r + 0.35f * b.r, 0.65f * a.g + 0.35f * b.g, 0.65f * a.b + 0.35f * b.b};
            }
        },
        tex);
}

/// Nearest ray parameter t > eps along unit direction `dir`, if any.
inline std::optional<double> intersect(const Shape& shape, const Vec3& origin, const Vec3& dir)
{
    constexpr double eps = detail::kSurfaceEps;
    return std::visit(
        [&](const auto& s) -> std::optional<double> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Sphere>) {
                const Vec3 oc = origin - s.center;
                const double b = dot(dir, oc);
                const double c = dot(oc, oc) - s.radius * s.radius;
                const double disc = b * b - c;
                if (disc < 0.0)
                    return std::nullopt;
                const double sq = std::sqrt(disc);
                // Stable pair of roots of t^2 + 2bt + c = 0.
                const double q = b >= 0.0 ? -(b + sq) : -(b - sq);
                double t0 = q;
                double t1 = (q != 0.0) ? c / q : -q;
                if (t0 > t1)
                    std::swap(t0, t1);
                if (t0 > eps)
                    return t0;
                if (t1 > eps)
                    return t1;
                return std::nullopt;
            } else if constexpr (std::is_same_v<S, Plane>) {
                const Vec3 n = normalized(s.normal);
                const double denom = dot(dir, n);
                if (std::abs(denom) < 1e-15)
                    return std::nullopt;
                const double t = dot(s.point - origin, n) / denom;
                return t > eps ? std::optional<double>(t) : std::nullopt;
            } else {
                double t_near = -std::numeric_limits<double>::infinity();
                double t_far = std::numeric_limits<double>::infinity();
                for (int a = 0; a < 3; ++a) {
                    const double o = origin[a], d = dir[a];
                    if (std::abs(d) < 1e-300) {
                        if (o < s.min[a] || o > s.max[a])
                            return std::nullopt;
                        continue;
                    }
                    double t1 = (s.min[a] - o) / d;
                    double t2 = (s.max[a] - o) / d;
                    if (t1 > t2)
                        std::swap(t1, t2);
                    t_near = std::max(t_near, t1);
                    t_far = std::min(t_far, t2);
                }
                if (t_near > t_far || t_far <= eps)
                    return std::nullopt;
                return t_near > eps ? t_near : t_far;
            }
        },
        shape);
}

/// Throws ConfigError when the camera sits on a surface, inside a solid box,
/// or the scene is empty.
inline void validate_camera(const SceneSpec& scene, const Vec3& cam)
{
    if (scene.primitives.empty())
        throw ConfigError("scene '" + scene.name + "' has no primitives");
    if (!(scene.d_min > 0.0) || !(scene.d_max > scene.d_min))
        throw ConfigError("scene depth range requires 0 < d_min < d_max");
    constexpr double eps = 1e-6;
    for (const auto& prim : scene.primitives) {
        std::visit(
            [&](const auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Sphere>) {
                    if (!(s.radius > 0.0))
                        throw ConfigError("sphere radius must be positive");
                    if (std::abs(norm(cam - s.center) - s.radius) < eps)
                        throw ConfigError("camera lies on a sphere surface");
                } else if constexpr (std::is_same_v<S, Plane>) {
                    if (!(norm(s.normal) > 0.0))
                        throw ConfigError("plane normal must be non-zero");
                    if (std::abs(dot(cam - s.point, normalized(s.normal))) < eps)
                        throw ConfigError("camera lies on a plane");
                } else {
                    for (int a = 0; a < 3; ++a)
                        if (!(s.max[a] > s.min[a]))
                            throw ConfigError("box must satisfy min < max on every axis");
                    bool inside = true;
                    for (int a = 0; a < 3; ++a)
                        inside = inside && cam[a] > s.min[a] - eps && cam[a] < s.max[a] + eps;
                    if (inside)
                        throw ConfigError("camera is inside (or on) a solid box");
                }
            },
            prim.shape);
    }
}

struct RayHit
{
    double t = 0.0;
    Rgb color;
};

inline std::optional<RayHit> trace(const SceneSpec& scene, const Vec3& origin, const Vec3& dir)
{
    std::optional<RayHit> best;
    const Primitive* best_prim = nullptr;
    for (const auto& prim : scene.primitives) {
        if (auto t = intersect(prim.shape, origin, dir); t && (!best || *t < best->t)) {
            best = RayHit{*t, {}};
            best_prim = &prim;
        }
    }
    if (best)
        best->color = shade(best_prim->texture, texture_coords(best_prim->shape, origin + dir * best->t));
    return best;
}

/// Renders ground-truth equirectangular RGB-D from camera position `cam`.
/// Misses get the background colour and an invalid depth.
inline RgbdImage raycast_erp(const SceneSpec& scene, const Vec3& cam, int width, int height, int threads = 1)
{
    check_erp_shape(width, height);
    validate_camera(scene, cam);
    RgbdImage out{ErpImage(width, height), DepthMap(width, height, scene.d_min, scene.d_max)};
    parallel_rows(height, threads, [&](int y) {
        for (int x = 0; x < width; ++x) {
            const Vec3 dir = pixel_ray(x, y, width, height);
            if (auto hit = trace(scene, cam, dir)) {
                out.rgb(x, y) = hit->color;
                out.depth.set(x, y, hit->t);
            } else {
                out.rgb(x, y) = scene.background;
                out.depth.invalidate(x, y);
            }
        }
    });
    return out;
}

/// Like raycast_erp, but colour is filtered from a grid of ss x ss sub-pixel
/// rays per pixel. With filter_sigma = 0 each pixel averages its own
/// sub-pixels (box filter); otherwise a separable Gaussian of that standard
/// deviation (output pixels) is applied over the sub-pixel grid, columns
/// wrapping and rows clamped. Depth still comes from the centre ray; misses
/// contribute the background colour.
inline RgbdImage raycast_erp_antialiased(const SceneSpec& scene, const Vec3& cam, int width, int height, int ss,
                                         int threads = 1, double filter_sigma = 0.0)
{
    if (ss < 1)
        throw ConfigError("supersampling factor must be >= 1");
    if (!(filter_sigma >= 0.0))
        throw ConfigError("anti-aliasing filter sigma must be non-negative");
    RgbdImage out = raycast_erp(scene, cam, width, height, threads);
    if (ss == 1 && filter_sigma == 0.0)
        return out;

    const int fw = width * ss, fh = height * ss;
    Raster<Rgb> fine(fw, fh);
    parallel_rows(fh, threads, [&](int fy) {
        const double v = (fy + 0.5) / ss - 0.5;
        for (int fx = 0; fx < fw; ++fx) {
            const auto hit = trace(scene, cam, pixel_ray((fx + 0.5) / ss - 0.5, v, width, height));
            fine(fx, fy) = hit ? hit->color : scene.background;
        }
    });

    // Per-output-pixel weights over fine samples, offset k from the first
    // sample of the pixel's own block.
    std::vector<double> k;
    int lo = 0;
    if (filter_sigma == 0.0) {
        k.assign(static_cast<std::size_t>(ss), 1.0 / ss);
    } else {
        const double centre = 0.5 * (ss - 1);
        const int reach = static_cast<int>(std::ceil(3.0 * filter_sigma * ss));
        lo = static_cast<int>(std::floor(centre)) - reach;
        const int hi = static_cast<int>(std::ceil(centre)) + reach;
        double sum = 0.0;
        for (int i = lo; i <= hi; ++i) {
            const double d = (i - centre) / ss / filter_sigma;
            k.push_back(std::exp(-0.5 * d * d));
            sum += k.back();
        }
        for (double& w : k)
            w /= sum;
    }
    const int taps = static_cast<int>(k.size());

    Raster<Rgb> rows(width, fh);
    parallel_rows(fh, threads, [&](int fy) {
        for (int x = 0; x < width; ++x) {
            double acc[3] = {0.0, 0.0, 0.0};
            for (int i = 0; i < taps; ++i) {
                const Rgb& c = fine(wrap_index(x * ss + lo + i, fw), fy);
                acc[0] += k[static_cast<std::size_t>(i)] * c.r;
                acc[1] += k[static_cast<std::size_t>(i)] * c.g;
                acc[2] += k[static_cast<std::size_t>(i)] * c.b;
            }
            rows(x, fy) = {static_cast<float>(acc[0]), static_cast<float>(acc[1]), static_cast<float>(acc[2])};
        }
    });
    parallel_rows(height, threads, [&](int y) {
        for (int x = 0; x < width; ++x) {
            double acc[3] = {0.0, 0.0, 0.0};
            for (int i = 0; i < taps; ++i) {
                const Rgb& c = rows(x, std::clamp(y * ss + lo + i, 0, fh - 1));
                acc[0] += k[static_cast<std::size_t>(i)] * c.r;
                acc[1] += k[static_cast<std::size_t>(i)] * c.g;
                acc[2] += k[static_cast<std::size_t>(i)] * c.b;
            }
            out.rgb(x, y) = {static_cast<float>(acc[0]), static_cast<float>(acc[1]), static_cast<float>(acc[2])};
        }
    });
    return out;
}

/// Pinhole view sampled from an equirectangular image with bilinear
/// interpolation.
inline PerspImage perspective_crop(const ErpImage& img, double fov_deg, double yaw, double pitch, int out_width,
                                   int out_height)
{
    const PinholeCamera cam(out_width, out_height, fov_deg, yaw, pitch);
    PerspImage out{fov_deg, yaw, pitch, Raster<Rgb>(out_width, out_height)};
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const PixelCoord p = sph_to_pixel(cart_to_sph(cam.ray(x, y)), img.width(), img.height());
            out.pixels(x, y) = sample_erp(img, p.u, p.v);
        }
    }
    return out;
}

} // namespace panosweep

#endif // PANOSWEEP_SCENE_HPP
