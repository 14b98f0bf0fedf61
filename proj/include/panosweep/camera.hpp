#ifndef PANOSWEEP_CAMERA_HPP
#define PANOSWEEP_CAMERA_HPP

#include "panosweep/geometry.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

namespace panosweep {

/// Four bilinear taps into a width x height raster.
struct BilinearTaps
{
    std::array<std::size_t, 4> index{};
    std::array<double, 4> weight{};
};

/// Taps for an equirectangular raster: u wraps modulo width, v is clamped to
/// the first/last row.
inline BilinearTaps erp_taps(double u, double v, int width, int height)
{
    const double vc = std::clamp(v, 0.0, static_cast<double>(height - 1));
    const double x0f = std::floor(u);
    const double y0f = std::floor(vc);
    const double fx = u - x0f;
    const double fy = vc - y0f;
    const int x0 = wrap_index(static_cast<int>(x0f), width);
    const int x1 = wrap_index(x0 + 1, width);
    const int y0 = static_cast<int>(y0f);
    const int y1 = std::min(y0 + 1, height - 1);
    const auto at = [width](int x, int y) {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    };
    return {{at(x0, y0), at(x1, y0), at(x0, y1), at(x1, y1)},
            {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy}};
}

/// Taps for a bounded (perspective) raster; nullopt when (x, y) lies
/// outside the convex hull of the pixel centres.
inline std::optional<BilinearTaps> clamped_taps(double x, double y, int width, int height)
{
    if (!(x >= 0.0 && y >= 0.0 && x <= width - 1 && y <= height - 1))
        return std::nullopt;
    const int x0 = std::min(static_cast<int>(x), width - 1);
    const int y0 = std::min(static_cast<int>(y), height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const auto at = [width](int xx, int yy) {
        return static_cast<std::size_t>(yy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(xx);
    };
    return BilinearTaps{{at(x0, y0), at(x1, y0), at(x0, y1), at(x1, y1)},
                        {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy}};
}

inline Rgb sample_rgb(const Raster<Rgb>& img, const BilinearTaps& t)
{
    double acc[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        const Rgb& c = img[t.index[k]];
        acc[0] += t.weight[k] * c.r;
        acc[1] += t.weight[k] * c.g;
        acc[2] += t.weight[k] * c.b;
    }
    return {static_cast<float>(acc[0]), static_cast<float>(acc[1]), static_cast<float>(acc[2])};
}

inline Rgb sample_erp(const ErpImage& img, double u, double v)
{
    return sample_rgb(img.pixels(), erp_taps(u, v, img.width(), img.height()));
}

/// Camera model over an equirectangular raster.
struct ErpCamera
{
    int width = 0;
    int height = 0;

    static constexpr bool wraps_horizontally = true;

    Vec3 ray(double u, double v) const { return pixel_ray(u, v, width, height); }

    /// Pixel position and radial range of a camera-relative point.
    std::optional<Reprojection> project(const Vec3& rel) const
    {
        const double r = norm(rel);
        if (!(r > 0.0))
            return std::nullopt;
        return Reprojection{sph_to_pixel(cart_to_sph(rel), width, height), r};
    }

    /// Depth stored in a depth raster for a camera-relative point.
    double range(const Vec3& rel) const { return norm(rel); }
};

/// Pinhole camera looking along yaw (about +y) then pitch (about the
/// camera x axis). Pixel x grows to the right, y grows downwards.
class PinholeCamera
{
public:
    int width = 0;
    int height = 0;

    static constexpr bool wraps_horizontally = false;

    PinholeCamera() = default;
    PinholeCamera(int w, int h, double fov, double yaw_rad, double pitch_rad)
        : width(w), height(h), fov_deg_(fov), yaw_(yaw_rad), pitch_(pitch_rad)
    {
        if (!(fov > 0.0 && fov < 180.0))
            throw ConfigError("perspective field of view must lie in (0, 180) degrees");
        if (w <= 0 || h <= 0)
            throw ConfigError("perspective image dimensions must be positive");
        focal_ = 0.5 * width / std::tan(0.5 * fov_deg_ * kPi / 180.0);
        cp_ = std::cos(pitch_);
        sp_ = std::sin(pitch_);
        cy_ = std::cos(yaw_);
        sy_ = std::sin(yaw_);
    }

    double fov_deg() const { return fov_deg_; }
    double yaw() const { return yaw_; }
    double pitch() const { return pitch_; }
    double focal() const { return focal_; }
    double cx() const { return 0.5 * (width - 1); }
    double cy() const { return 0.5 * (height - 1); }

    Vec3 to_world(const Vec3& c) const
    {
        const Vec3 p{c.x, c.y * cp_ + c.z * sp_, -c.y * sp_ + c.z * cp_};
        return {p.x * cy_ + p.z * sy_, p.y, -p.x * sy_ + p.z * cy_};
    }

    Vec3 to_camera(const Vec3& w) const
    {
        const Vec3 p{w.x * cy_ - w.z * sy_, w.y, w.x * sy_ + w.z * cy_};
        return {p.x, p.y * cp_ - p.z * sp_, p.y * sp_ + p.z * cp_};
    }

    /// Unit world-frame ray through pixel (x, y).
    Vec3 ray(double x, double y) const
    {
        return normalized(to_world({x - cx(), -(y - cy()), focal_}));
    }

    std::optional<Reprojection> project(const Vec3& rel) const
    {
        const Vec3 c = to_camera(rel);
        if (!(c.z > 1e-9))
            return std::nullopt;
        return Reprojection{{cx() + focal_ * c.x / c.z, cy() - focal_ * c.y / c.z}, norm(rel)};
    }

    double range(const Vec3& rel) const { return norm(rel); }

private:
    double fov_deg_ = 90.0;
    double yaw_ = 0.0;
    double pitch_ = 0.0;
    double focal_ = 0.5 / std::tan(0.25 * kPi);
    double cp_ = 1.0, sp_ = 0.0, cy_ = 1.0, sy_ = 0.0;
};

} // namespace panosweep

#endif // PANOSWEEP_CAMERA_HPP
