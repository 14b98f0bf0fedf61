#ifndef PANOSWEEP_GEOMETRY_HPP
#define PANOSWEEP_GEOMETRY_HPP

// Spherical / Cartesian / equirectangular pixel conversions and the
// first-order spherical disparity models.
//
// Frame: camera-centred, y is the vertical (up) axis, z is forward, x is
// right. Longitude phi = atan2(x, z) in (-pi, pi], polar angle
// theta = acos(y / r) in [0, pi] with theta = 0 at +y (top image row).
//
// Pixel convention: integer (u, v) address pixel centres,
//   u = (phi / 2pi + 0.5) * W - 0.5,   v = (theta / pi) * H - 0.5.

#include "panosweep/raster.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace panosweep {

inline constexpr double kPi = std::numbers::pi;

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v)
{
    const double n = norm(v);
    if (!(n > 0.0))
        throw DomainError("cannot normalise a zero-length vector");
    return v / n;
}

struct SphCoord
{
    double r = 1.0;
    double phi = 0.0;   // longitude, (-pi, pi]
    double theta = 0.0; // polar angle from +y, [0, pi]
};

struct PixelCoord
{
    double u = 0.0;
    double v = 0.0;
};

enum class BaselineAxis
{
    Vertical,
    Horizontal
};

/// Signed camera translation along one axis. A positive vertical offset
/// moves the camera towards +y.
struct BaselineSpec
{
    BaselineAxis axis = BaselineAxis::Vertical;
    double offset = 0.0;

    Vec3 translation() const
    {
        return axis == BaselineAxis::Vertical ? Vec3{0.0, offset, 0.0} : Vec3{offset, 0.0, 0.0};
    }

    /// True when |offset| reaches the nearest depth the scene may contain,
    /// where first-order disparity models stop being informative.
    bool exceeds(double d_min) const { return std::abs(offset) >= d_min; }
};

inline std::string to_string(BaselineAxis a) { return a == BaselineAxis::Vertical ? "vertical" : "horizontal"; }

inline double normalize_longitude(double phi)
{
    // Into (-pi, pi].
    double p = std::remainder(phi, 2.0 * kPi);
    if (p <= -kPi)
        p += 2.0 * kPi;
    return p;
}

inline SphCoord cart_to_sph(const Vec3& p)
{
    const double r = norm(p);
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("cart_to_sph: point must have finite non-zero length");
    // Same angle as acos(y / r), better conditioned near the poles.
    const double theta = std::atan2(std::hypot(p.x, p.z), p.y);
    double phi = (p.x == 0.0 && p.z == 0.0) ? 0.0 : std::atan2(p.x, p.z);
    if (phi == -kPi)
        phi = kPi;
    return {r, phi, theta};
}

inline Vec3 sph_to_cart(const SphCoord& s)
{
    const double st = std::sin(s.theta);
    return {s.r * std::sin(s.phi) * st, s.r * std::cos(s.theta), s.r * std::cos(s.phi) * st};
}

inline PixelCoord sph_to_pixel(const SphCoord& s, int width, int height)
{
    check_erp_shape(width, height);
    const double w = width;
    const double u = (s.phi / (2.0 * kPi) + 0.5) * w - 0.5;
    // Wrap into [-0.5, W - 0.5) so that the representation is periodic in phi.
    const double wrapped = wrap_coord(u + 0.5, w) - 0.5;
    return {wrapped, s.theta / kPi * height - 0.5};
}

inline SphCoord pixel_to_sph(const PixelCoord& p, int width, int height, double r = 1.0)
{
    check_erp_shape(width, height);
    const double phi = normalize_longitude(((p.u + 0.5) / width - 0.5) * 2.0 * kPi);
    const double theta = (p.v + 0.5) / height * kPi;
    return {r, phi, theta};
}

/// Unit viewing ray through a pixel centre.
inline Vec3 pixel_ray(double u, double v, int width, int height)
{
    return sph_to_cart(pixel_to_sph({u, v}, width, height, 1.0));
}

/// Polar-angle disparity for a vertical displacement b_y of the point
/// relative to the camera; the longitude disparity is identically zero.
inline double vertical_disparity(double theta, double r, double b_y)
{
    if (!(r > 0.0))
        throw DomainError("vertical_disparity: radial depth must be positive");
    return -std::sin(theta) / r * b_y;
}

struct SphericalDisparity
{
    double dphi = 0.0;
    double dtheta = 0.0;
};

inline double horizontal_disparity_theta(double phi, double theta, double r, double b_x)
{
    if (!(r > 0.0))
        throw DomainError("horizontal_disparity: radial depth must be positive");
    return std::sin(phi) * std::cos(theta) / r * b_x;
}

/// Longitude and polar-angle disparity for a displacement b_x of the point
/// along x. The longitude term is singular at the poles.
inline SphericalDisparity horizontal_disparity(double phi, double theta, double r, double b_x)
{
    const double dtheta = horizontal_disparity_theta(phi, theta, r, b_x);
    const double st = std::sin(theta);
    if (std::abs(st) < 1e-12)
        throw DomainError("horizontal_disparity: longitude disparity is singular at the poles");
    return {std::cos(phi) / (r * st) * b_x, dtheta};
}

struct Reprojection
{
    PixelCoord pixel;
    double depth = 0.0; // radial distance from the translated camera
};

/// Exact (non-linearised) reprojection: the 3-D point seen at pixel `p`
/// with radial depth `depth` is re-observed from a camera translated by
/// `b.translation()`.
inline Reprojection exact_reproject_full(const PixelCoord& p, double depth, const BaselineSpec& b, int width,
                                         int height)
{
    if (!(depth > 0.0))
        throw DomainError("exact_reproject: depth must be positive");
    const Vec3 point = sph_to_cart(pixel_to_sph(p, width, height, depth));
    const Vec3 moved = point - b.translation();
    const double r = norm(moved);
    if (r < 1e-12 * depth)
        throw DomainError("exact_reproject: point coincides with the translated camera centre");
    const SphCoord s = cart_to_sph(moved);
    return {sph_to_pixel(s, width, height), r};
}

inline PixelCoord exact_reproject(const PixelCoord& p, double depth, const BaselineSpec& b, int width, int height)
{
    if (b.offset == 0.0)
        return p;
    return exact_reproject_full(p, depth, b, width, height).pixel;
}

/// Signed longitude difference a - b in pixels, taking the shorter way
/// around the wrap seam.
inline double wrapped_du(double a, double b, int width)
{
    return std::remainder(a - b, static_cast<double>(width));
}

} // namespace panosweep

#endif // PANOSWEEP_GEOMETRY_HPP
