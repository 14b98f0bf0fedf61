#ifndef PANOSWEEP_METRICS_HPP
#define PANOSWEEP_METRICS_HPP

#include "panosweep/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace panosweep {

/// Standard monocular-depth error metrics over the intersection of the two
/// validity masks.
struct Metrics
{
    double abs_rel = 0.0;
    double sq_rel = 0.0;
    double rmse = 0.0;
    double rmse_log = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    std::size_t pixels = 0;
};

inline Metrics eval_metrics(const DepthMap& pred, const DepthMap& gt)
{
    if (pred.width() != gt.width() || pred.height() != gt.height())
        throw ConfigError("eval_metrics: prediction and ground truth dimensions differ");
    double ar = 0.0, sr = 0.0, se = 0.0, sl = 0.0;
    std::size_t n = 0, d1 = 0, d2 = 0, d3 = 0;
    for (std::size_t i = 0; i < gt.depth.size(); ++i) {
        if (!pred.valid[i] || !gt.valid[i])
            continue;
        const double p = pred.depth[i], g = gt.depth[i];
        const double e = p - g;
        ar += std::abs(e) / g;
        sr += e * e / g;
        se += e * e;
        const double le = std::log(p) - std::log(g);
        sl += le * le;
        const double ratio = std::max(p / g, g / p);
        d1 += ratio < 1.25;
        d2 += ratio < 1.25 * 1.25;
        d3 += ratio < 1.25 * 1.25 * 1.25;
        ++n;
    }
    if (n == 0)
        throw NumericalError("eval_metrics: prediction and ground truth share no valid pixels");
    const double dn = static_cast<double>(n);
    Metrics m;
    m.abs_rel = ar / dn;
    m.sq_rel = sr / dn;
    m.rmse = std::sqrt(se / dn);
    m.rmse_log = std::sqrt(sl / dn);
    m.delta1 = static_cast<double>(d1) / dn;
    m.delta2 = static_cast<double>(d2) / dn;
    m.delta3 = static_cast<double>(d3) / dn;
    m.pixels = n;
    return m;
}

/// Reverse Huber penalty of one residual. c = 0 yields 0 by convention.
inline double berhu_value(double e, double c)
{
    const double a = std::abs(e);
    if (c <= 0.0)
        return 0.0;
    return a <= c ? a : (e * e + c * c) / (2.0 * c);
}

struct BerhuRule
{
    double fraction = 0.2; // c = fraction * max|e| when fixed_c <= 0
    double fixed_c = 0.0;
};

/// Mean berHu over the intersection of the validity masks and `mask`
/// (nullptr = no extra restriction).
inline double berhu(const DepthMap& pred, const DepthMap& gt, const Raster<std::uint8_t>* mask = nullptr,
                    const BerhuRule& rule = {})
{
    if (pred.width() != gt.width() || pred.height() != gt.height() ||
        (mask && !mask->same_shape(gt.width(), gt.height())))
        throw ConfigError("berhu: raster dimensions differ");
    std::vector<double> err;
    err.reserve(gt.depth.size());
    for (std::size_t i = 0; i < gt.depth.size(); ++i)
        if (pred.valid[i] && gt.valid[i] && (!mask || (*mask)[i]))
            err.push_back(pred.depth[i] - gt.depth[i]);
    if (err.empty())
        throw NumericalError("berhu: empty evaluation mask");
    double c = rule.fixed_c;
    if (c <= 0.0) {
        double mx = 0.0;
        for (double e : err)
            mx = std::max(mx, std::abs(e));
        c = rule.fraction * mx;
    }
    double s = 0.0;
    for (double e : err)
        s += berhu_value(e, c);
    return s / static_cast<double>(err.size());
}

/// total = w1 * L_coarse + w2 * sum_l lambda_l * L_stereo,l. An empty
/// lambda list weights every level by 1.
inline double total_loss(double coarse, const std::vector<double>& stereo, double w1, double w2,
                         const std::vector<double>& lambda = {})
{
    if (w1 < 0.0 || w2 < 0.0)
        throw ConfigError("total_loss: loss weights must be non-negative");
    if (!lambda.empty() && lambda.size() != stereo.size())
        throw ConfigError("total_loss: one lambda per cascade level is required");
    double s = 0.0;
    for (std::size_t l = 0; l < stereo.size(); ++l)
        s += (lambda.empty() ? 1.0 : lambda[l]) * stereo[l];
    return w1 * coarse + w2 * s;
}

} // namespace panosweep

#endif // PANOSWEEP_METRICS_HPP
