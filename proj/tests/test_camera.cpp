#include "panosweep/camera.hpp"
#include "panosweep/scene.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace panosweep;

TEST(ErpTaps, WrapsColumnsAndClampsRows)
{
    const BilinearTaps t = erp_taps(-0.25, -3.0, 8, 4);
    // u = -0.25 sits between the last and first column.
    EXPECT_EQ(t.index[0], 7u);
    EXPECT_EQ(t.index[1], 0u);
    EXPECT_DOUBLE_EQ(t.weight[0], 0.25);
    EXPECT_DOUBLE_EQ(t.weight[1], 0.75);
    EXPECT_DOUBLE_EQ(t.weight[2] + t.weight[3], 0.0);
}

TEST(ClampedTaps, OutsideHullIsEmpty)
{
    EXPECT_FALSE(clamped_taps(-0.01, 3.0, 10, 10));
    EXPECT_FALSE(clamped_taps(3.0, 9.01, 10, 10));
    const auto t = clamped_taps(9.0, 9.0, 10, 10);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->index[0], 99u);
    EXPECT_DOUBLE_EQ(t->weight[0], 1.0);
}

TEST(PinholeCamera, OpticalAxis)
{
    const PinholeCamera cam(101, 101, 90.0, 0.0, 0.0);
    const Vec3 r = cam.ray(50.0, 50.0);
    EXPECT_NEAR(r.x, 0.0, 1e-15);
    EXPECT_NEAR(r.y, 0.0, 1e-15);
    EXPECT_NEAR(r.z, 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(cam.focal(), 50.5);
}

TEST(PinholeCamera, ProjectInvertsRay)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> a(-3.0, 3.0), p(-1.2, 1.2), px(0.0, 63.0);
    for (int i = 0; i < 200; ++i) {
        const PinholeCamera cam(64, 64, 80.0, a(rng), p(rng));
        const double x = px(rng), y = px(rng);
        const auto q = cam.project(cam.ray(x, y) * 2.5);
        ASSERT_TRUE(q);
        ASSERT_NEAR(q->pixel.u, x, 1e-9);
        ASSERT_NEAR(q->pixel.v, y, 1e-9);
        ASSERT_NEAR(q->depth, 2.5, 1e-12);
    }
}

TEST(PinholeCamera, BehindCameraDoesNotProject)
{
    const PinholeCamera cam(32, 32, 60.0, 0.0, 0.0);
    EXPECT_FALSE(cam.project({0.0, 0.0, -1.0}));
}

TEST(PinholeCamera, RejectsBadFov)
{
    EXPECT_THROW(PinholeCamera(10, 10, 180.0, 0.0, 0.0), ConfigError);
    EXPECT_THROW(PinholeCamera(0, 10, 90.0, 0.0, 0.0), ConfigError);
}

TEST(PerspectiveCrop, ConstantImage)
{
    const ErpImage img(64, 32, {0.3f, 0.6f, 0.9f});
    const PerspImage c = perspective_crop(img, 75.0, 1.0, 0.4, 20, 16);
    for (std::size_t i = 0; i < c.pixels.size(); ++i) {
        EXPECT_NEAR(c.pixels[i].r, 0.3f, 1e-6);
        EXPECT_NEAR(c.pixels[i].g, 0.6f, 1e-6);
        EXPECT_NEAR(c.pixels[i].b, 0.9f, 1e-6);
    }
}

TEST(PerspectiveCrop, CentreSamplesForwardDirection)
{
    // Colour each ERP pixel by its column so the sampled u can be read back.
    ErpImage img(512, 256);
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 512; ++x)
            img(x, y) = {static_cast<float>(x) / 512.f, static_cast<float>(y) / 256.f, 0.f};
    const PerspImage c = perspective_crop(img, 90.0, 0.0, 0.0, 33, 33);
    const PixelCoord fwd = sph_to_pixel({1.0, 0.0, kPi / 2}, 512, 256);
    EXPECT_NEAR(c.pixels(16, 16).r * 512.0, fwd.u, 1e-3);
    EXPECT_NEAR(c.pixels(16, 16).g * 256.0, fwd.v, 1e-3);
}

TEST(PerspectiveCrop, MeridianIsVerticalLine)
{
    // Project the great circle phi = 0 through the pinhole model: with
    // yaw = 0 every point of it lands on the centre column.
    const PinholeCamera cam(41, 41, 100.0, 0.0, 0.3);
    for (double theta = 0.5; theta < 2.6; theta += 0.1) {
        const auto p = cam.project(sph_to_cart({1.0, 0.0, theta}));
        if (!p || p->pixel.v < 0.0 || p->pixel.v > 40.0)
            continue;
        EXPECT_NEAR(p->pixel.u, 20.0, 1e-9);
    }
    // The crop of an ERP with a colour edge at phi = 0 shows the edge at the
    // centre column on every row.
    ErpImage img(512, 256);
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 512; ++x)
            img(x, y) = x < 256 ? Rgb{0.f, 0.f, 0.f} : Rgb{1.f, 1.f, 1.f};
    const PerspImage c = perspective_crop(img, 100.0, 0.0, 0.3, 41, 41);
    for (int y = 0; y < 41; ++y) {
        EXPECT_LT(c.pixels(18, y).r, 0.5f) << "row " << y;
        EXPECT_GT(c.pixels(22, y).r, 0.5f) << "row " << y;
    }
}
