#include "panosweep/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace panosweep;

namespace {

DepthMap random_depth(std::uint64_t seed, int w = 16, int h = 8)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 6.0);
    DepthMap d(w, h, 0.1, 100.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            d.set(x, y, u(rng));
    return d;
}

DepthMap scaled(const DepthMap& d, double s)
{
    DepthMap out = d;
    for (int y = 0; y < d.height(); ++y)
        for (int x = 0; x < d.width(); ++x)
            out.set(x, y, d.depth(x, y) * s);
    return out;
}

} // namespace

TEST(Metrics, PerfectPrediction)
{
    const DepthMap gt = random_depth(1);
    const Metrics m = eval_metrics(gt, gt);
    EXPECT_EQ(m.abs_rel, 0.0);
    EXPECT_EQ(m.sq_rel, 0.0);
    EXPECT_EQ(m.rmse, 0.0);
    EXPECT_EQ(m.rmse_log, 0.0);
    EXPECT_EQ(m.delta1, 1.0);
    EXPECT_EQ(m.delta2, 1.0);
    EXPECT_EQ(m.delta3, 1.0);
}

TEST(Metrics, DoublePrediction)
{
    const DepthMap gt = random_depth(2);
    const Metrics m = eval_metrics(scaled(gt, 2.0), gt);
    EXPECT_EQ(m.abs_rel, 1.0);
    EXPECT_EQ(m.delta1, 0.0);
    EXPECT_EQ(m.delta2, 0.0);
    // 1.25^3 = 1.953125 < 2.
    EXPECT_EQ(m.delta3, 0.0);
    EXPECT_NEAR(m.rmse_log, std::log(2.0), 1e-15);
}

TEST(Metrics, TwentyPercentOver)
{
    const DepthMap gt = random_depth(3);
    const Metrics m = eval_metrics(scaled(gt, 1.2), gt);
    EXPECT_EQ(m.delta1, 1.0);
    EXPECT_NEAR(m.abs_rel, 0.2, 1e-12);
}

TEST(Metrics, HandComputedValues)
{
    DepthMap gt(2, 1, 0.1, 10.0), pred(2, 1, 0.1, 10.0);
    gt.set(0, 0, 1.0);
    gt.set(1, 0, 4.0);
    pred.set(0, 0, 2.0);
    pred.set(1, 0, 3.0);
    const Metrics m = eval_metrics(pred, gt);
    EXPECT_DOUBLE_EQ(m.abs_rel, (1.0 + 0.25) / 2);
    EXPECT_DOUBLE_EQ(m.sq_rel, (1.0 + 0.25) / 2);
    EXPECT_DOUBLE_EQ(m.rmse, 1.0);
    EXPECT_DOUBLE_EQ(m.rmse_log, std::sqrt((std::log(2.0) * std::log(2.0) + std::log(0.75) * std::log(0.75)) / 2));
    EXPECT_DOUBLE_EQ(m.delta1, 0.0);
    EXPECT_DOUBLE_EQ(m.delta2, 0.5);
    EXPECT_DOUBLE_EQ(m.delta3, 0.5);
}

TEST(Metrics, IntersectionOfMasks)
{
    DepthMap gt(3, 1, 0.1, 10.0), pred(3, 1, 0.1, 10.0);
    gt.set(0, 0, 1.0);
    gt.set(1, 0, 1.0);
    pred.set(1, 0, 1.0);
    pred.set(2, 0, 5.0);
    const Metrics m = eval_metrics(pred, gt);
    EXPECT_EQ(m.pixels, 1u);
    EXPECT_EQ(m.abs_rel, 0.0);
    DepthMap none(3, 1, 0.1, 10.0);
    EXPECT_THROW(eval_metrics(none, gt), NumericalError);
    EXPECT_THROW(eval_metrics(DepthMap(2, 1, 0.1, 10.0), gt), ConfigError);
}

TEST(Metrics, OrderingAndScaleInvariance)
{
    for (std::uint64_t seed = 10; seed < 30; ++seed) {
        const DepthMap gt = random_depth(seed);
        const DepthMap pred = random_depth(seed + 100);
        const Metrics m = eval_metrics(pred, gt);
        EXPECT_LE(m.delta1, m.delta2);
        EXPECT_LE(m.delta2, m.delta3);
        EXPECT_TRUE(std::isfinite(m.abs_rel) && std::isfinite(m.rmse_log));
        const Metrics s = eval_metrics(scaled(pred, 3.0), scaled(gt, 3.0));
        EXPECT_NEAR(s.abs_rel, m.abs_rel, 1e-12);
        EXPECT_NEAR(s.rmse_log, m.rmse_log, 1e-12);
    }
}

TEST(Berhu, PerfectPredictionIsZero)
{
    const DepthMap gt = random_depth(4);
    EXPECT_EQ(berhu(gt, gt), 0.0);
}

TEST(Berhu, BranchPointEqualsC)
{
    EXPECT_EQ(berhu_value(0.3, 0.3), 0.3);
    EXPECT_EQ(berhu_value(-0.3, 0.3), 0.3);
    // Single pixel with e = c: the fraction rule gives c = max|e|.
    DepthMap gt(1, 1, 0.1, 10.0), pred(1, 1, 0.1, 10.0);
    gt.set(0, 0, 2.0);
    pred.set(0, 0, 2.5);
    EXPECT_DOUBLE_EQ(berhu(pred, gt, nullptr, {1.0, 0.0}), 0.5);
    EXPECT_DOUBLE_EQ(berhu(pred, gt, nullptr, {0.2, 0.5}), 0.5);
}

TEST(Berhu, ContinuityAtRandomBranchPoints)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1e-3, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double c = u(rng);
        // Quadratic branch evaluated exactly at the boundary.
        const double quad = (c * c + c * c) / (2.0 * c);
        EXPECT_NEAR(berhu_value(c, c), quad, 1e-15 * c);
        const double h = 1e-9 * c;
        EXPECT_NEAR(berhu_value(c + h, c), berhu_value(c - h, c), 4 * h);
        // Lower bound on the quadratic branch.
        const double e = c * (1.0 + u(rng));
        EXPECT_GE(berhu_value(e, c), e - c / 2);
    }
}

TEST(Berhu, FractionRule)
{
    DepthMap gt(2, 1, 0.1, 10.0), pred(2, 1, 0.1, 10.0);
    gt.set(0, 0, 1.0);
    gt.set(1, 0, 1.0);
    pred.set(0, 0, 1.1);
    pred.set(1, 0, 2.0);
    // c = 0.2 * 1.0; |e| = 0.1 is linear, |e| = 1.0 quadratic.
    const double expected = (0.1 + (1.0 + 0.04) / 0.4) / 2;
    EXPECT_NEAR(berhu(pred, gt), expected, 1e-12);
    Raster<std::uint8_t> mask(2, 1, 1);
    mask(1, 0) = 0;
    // The threshold follows the masked residuals: c = 0.02, so |e| = 0.1 is quadratic.
    EXPECT_NEAR(berhu(pred, gt, &mask), (0.01 + 0.0004) / 0.04, 1e-12);
    mask(0, 0) = 0;
    EXPECT_THROW(berhu(pred, gt, &mask), NumericalError);
}

TEST(TotalLoss, DefaultWeights)
{
    EXPECT_DOUBLE_EQ(total_loss(0.7, {0.5, 0.25}, 1.0, 0.02), 0.7 + 0.02 * 0.75);
    EXPECT_DOUBLE_EQ(total_loss(0.7, {0.5, 0.25}, 1.0, 0.02, {2.0, 0.0}), 0.7 + 0.02);
    EXPECT_THROW(total_loss(0.7, {0.5}, -1.0, 0.02), ConfigError);
    EXPECT_THROW(total_loss(0.7, {0.5}, 1.0, 0.02, {1.0, 1.0}), ConfigError);
}
