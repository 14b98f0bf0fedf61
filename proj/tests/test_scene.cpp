#include "panosweep/scene.hpp"
#include "panosweep/suite.hpp"

#include <gtest/gtest.h>

using namespace panosweep;

namespace {

SceneSpec single_sphere(Vec3 centre, double radius)
{
    SceneSpec s;
    s.name = "sphere";
    s.primitives.push_back({Sphere{centre, radius}, CheckerTexture{}});
    return s;
}

/// Far root of |o + t d - c| = R for a camera inside the sphere.
double ray_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double R)
{
    const Vec3 oc = o - c;
    const double b = dot(oc, d);
    const double q = dot(oc, oc) - R * R;
    return -b + std::sqrt(b * b - q);
}

} // namespace

TEST(Raycast, ConcentricSphereHasConstantDepth)
{
    const SceneSpec s = single_sphere({0.0, 0.0, 0.0}, 3.0);
    const RgbdImage img = raycast_erp(s, {0.0, 0.0, 0.0}, 64, 32);
    EXPECT_EQ(img.depth.valid_count(), 64u * 32u);
    for (std::size_t i = 0; i < img.depth.depth.size(); ++i)
        ASSERT_NEAR(img.depth.depth[i], 3.0, 1e-12);
}

TEST(Raycast, OffCentreSphereMatchesQuadratic)
{
    const SceneSpec s = single_sphere({0.0, 0.0, 0.0}, 3.0);
    const Vec3 cam{0.0, 1.0, 0.0};
    const RgbdImage img = raycast_erp(s, cam, 128, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 128; ++x)
            ASSERT_NEAR(img.depth.depth(x, y), ray_sphere(cam, pixel_ray(x, y, 128, 64), {}, 3.0), 1e-12);
    // Towards the poles the depth tends to 2 (up) and 4 (down).
    EXPECT_NEAR(ray_sphere(cam, {0.0, 1.0, 0.0}, {}, 3.0), 2.0, 1e-15);
    EXPECT_NEAR(ray_sphere(cam, {0.0, -1.0, 0.0}, {}, 3.0), 4.0, 1e-15);
    EXPECT_NEAR(img.depth.depth(0, 0), 2.0, 1e-3);
    EXPECT_NEAR(img.depth.depth(0, 63), 4.0, 1e-3);
}

TEST(Raycast, MissIsInvalid)
{
    SceneSpec s;
    s.primitives.push_back({Plane{{0.0, -1.0, 0.0}, {0.0, 1.0, 0.0}}, CheckerTexture{}});
    s.background = {0.2f, 0.4f, 0.6f};
    const RgbdImage img = raycast_erp(s, {0.0, 0.0, 0.0}, 32, 16);
    // Upper hemisphere sees nothing.
    for (int x = 0; x < 32; ++x) {
        EXPECT_FALSE(img.depth.is_valid(x, 0));
        EXPECT_EQ(img.rgb(x, 0), s.background);
        EXPECT_TRUE(img.depth.is_valid(x, 15));
    }
}

TEST(Raycast, DepthOutsideRangeIsInvalid)
{
    SceneSpec s = single_sphere({0.0, 0.0, 0.0}, 10.0);
    s.d_max = 8.0;
    const RgbdImage img = raycast_erp(s, {0.0, 0.0, 0.0}, 16, 8);
    EXPECT_EQ(img.depth.valid_count(), 0u);
}

TEST(Raycast, RejectsCameraOnSurfaceOrInsideBox)
{
    const SceneSpec s = single_sphere({0.0, 0.0, 0.0}, 1.0);
    EXPECT_THROW(raycast_erp(s, {1.0, 0.0, 0.0}, 16, 8), ConfigError);
    SceneSpec b;
    b.primitives.push_back({AxisAlignedBox{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}}, CheckerTexture{}});
    EXPECT_THROW(raycast_erp(b, {0.0, 0.0, 0.0}, 16, 8), ConfigError);
    EXPECT_THROW(raycast_erp(SceneSpec{}, {0.0, 0.0, 0.0}, 16, 8), ConfigError);
    EXPECT_THROW(raycast_erp(s, {0.0, 0.0, 0.0}, 16, 16), ConfigError);
}

TEST(Raycast, ThreadCountDoesNotChangeOutput)
{
    const SceneSpec s = room_scene();
    const RgbdImage a = raycast_erp(s, s.camera, 64, 32, 1);
    const RgbdImage b = raycast_erp(s, s.camera, 64, 32, 3);
    EXPECT_EQ(a.rgb.pixels().data(), b.rgb.pixels().data());
    EXPECT_EQ(a.depth.depth.data(), b.depth.depth.data());
}

TEST(Raycast, BoxIsSolid)
{
    SceneSpec s;
    s.primitives.push_back({AxisAlignedBox{{-1.0, -1.0, 2.0}, {1.0, 1.0, 3.0}}, CheckerTexture{}});
    const RgbdImage img = raycast_erp(s, {0.0, 0.0, 0.0}, 64, 32);
    const PixelCoord fwd = sph_to_pixel({1.0, 0.0, kPi / 2}, 64, 32);
    const int x = static_cast<int>(std::lround(fwd.u)), y = static_cast<int>(std::lround(fwd.v));
    // Near face at z = 2 along a ray very close to +z.
    const Vec3 d = pixel_ray(x, y, 64, 32);
    EXPECT_NEAR(img.depth.depth(x, y), 2.0 / d.z, 1e-12);
}

TEST(Antialiased, SupersampleOneMatchesPlain)
{
    const SceneSpec s = checker_sphere_scene();
    const RgbdImage a = raycast_erp(s, s.camera, 64, 32);
    const RgbdImage b = raycast_erp_antialiased(s, s.camera, 64, 32, 1);
    EXPECT_EQ(a.rgb.pixels().data(), b.rgb.pixels().data());
}

TEST(Antialiased, BoxFilterAveragesSubpixels)
{
    const SceneSpec s = checker_sphere_scene();
    const RgbdImage a = raycast_erp_antialiased(s, s.camera, 32, 16, 2);
    const RgbdImage fine = raycast_erp(s, s.camera, 64, 32);
    // With ss = 2 and the same angular grid, each coarse pixel covers a
    // 2 x 2 block of the fine raster.
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 32; ++x) {
            float r = 0.f;
            for (int k = 0; k < 4; ++k)
                r += fine.rgb(2 * x + (k & 1), 2 * y + (k >> 1)).r;
            ASSERT_NEAR(a.rgb(x, y).r, r / 4.f, 1e-6);
        }
    // Depth still comes from the centre ray.
    EXPECT_EQ(a.depth.depth.data(), raycast_erp(s, s.camera, 32, 16).depth.depth.data());
}

TEST(Suite, ScenesAreValid)
{
    const auto suite = default_suite();
    ASSERT_EQ(suite.size(), 3u);
    for (const auto& s : suite) {
        EXPECT_NO_THROW(validate_camera(s, s.camera));
        const RgbdImage img = raycast_erp(s, s.camera, 64, 32);
        EXPECT_EQ(img.depth.valid_count(), 64u * 32u) << s.name;
    }
}
