#ifndef PANOSWEEP_PIPELINE_HPP
#define PANOSWEEP_PIPELINE_HPP

// Two-stage orchestration: coarse depth -> view synthesis -> plane sweep,
// plus the ablation runners.

#include "panosweep/dibr.hpp"
#include "panosweep/metrics.hpp"
#include "panosweep/scene.hpp"
#include "panosweep/study.hpp"
#include "panosweep/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace panosweep {

enum class CoarseKind
{
    GroundTruth,
    NoisyGT,      // d * exp(sigma_rel * N(0, 1)), seeded
    Quantized,    // `levels` uniform bins over [d_min, d_max], bin centres
    ConstantPlane // every valid pixel at `depth`
};

inline std::string to_string(CoarseKind k)
{
    switch (k) {
    case CoarseKind::GroundTruth:
        return "ground_truth";
    case CoarseKind::NoisyGT:
        return "noisy_gt";
    case CoarseKind::Quantized:
        return "quantized";
    case CoarseKind::ConstantPlane:
        return "constant_plane";
    }
    return "unknown";
}

/// Stand-in for the monocular first stage.
struct CoarseProvider
{
    CoarseKind kind = CoarseKind::GroundTruth;
    double sigma_rel = 0.1;
    std::uint64_t seed = 0;
    int levels = 16;
    double depth = 2.0;

    /// Coarse depth derived from the ground truth. Results are clamped into
    /// the ground truth's depth range so every valid pixel stays valid.
    DepthMap produce(const DepthMap& gt) const
    {
        DepthMap out = gt;
        switch (kind) {
        case CoarseKind::GroundTruth:
            return out;
        case CoarseKind::NoisyGT: {
            if (!(sigma_rel >= 0.0))
                throw ConfigError("coarse provider: sigma_rel must be non-negative");
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> n01(0.0, 1.0);
            for (std::size_t i = 0; i < out.depth.size(); ++i) {
                if (!out.valid[i])
                    continue;
                out.depth[i] = std::clamp(out.depth[i] * std::exp(sigma_rel * n01(rng)), gt.d_min, gt.d_max);
            }
            return out;
        }
        case CoarseKind::Quantized: {
            if (levels < 1)
                throw ConfigError("coarse provider: levels must be >= 1");
            const double bin = (gt.d_max - gt.d_min) / levels;
            for (std::size_t i = 0; i < out.depth.size(); ++i) {
                if (!out.valid[i])
                    continue;
                const int k = std::min(levels - 1, static_cast<int>((out.depth[i] - gt.d_min) / bin));
                out.depth[i] = gt.d_min + (k + 0.5) * bin;
            }
            return out;
        }
        case CoarseKind::ConstantPlane:
            if (!(depth >= gt.d_min && depth <= gt.d_max))
                throw ConfigError("coarse provider: constant depth lies outside the depth range");
            for (std::size_t i = 0; i < out.depth.size(); ++i)
                if (out.valid[i])
                    out.depth[i] = depth;
            return out;
        }
        return out;
    }
};

struct PipelineConfig
{
    int width = 512;
    int height = 256;
    CoarseProvider coarse;
    std::vector<BaselineSpec> baselines = default_baselines();
    SplatParams splat;
    SweepConfig sweep;
    double omega1 = 1.0;
    double omega2 = 0.02;
    std::vector<double> lambda; // per cascade level; empty = uniform
    BerhuRule berhu;
    FovStudyParams study;
    std::uint64_t seed = 0;

    void validate() const
    {
        check_erp_shape(width, height);
        if (baselines.empty())
            throw ConfigError("pipeline: baseline list is empty");
        if (omega1 < 0.0 || omega2 < 0.0)
            throw ConfigError("pipeline: loss weights must be non-negative");
        if (!lambda.empty() && lambda.size() != sweep.planes.size())
            throw ConfigError("pipeline: 'lambda' must list one weight per cascade level");
        sweep.validate();
    }

    /// Propagates the run seed into every seeded component.
    void apply_seed(std::uint64_t s)
    {
        seed = s;
        coarse.seed = s;
        sweep.seed = s;
    }
};

struct LossReport
{
    double coarse = 0.0;
    std::vector<double> stereo; // per level
    double total = 0.0;
};

struct PipelineReport
{
    std::string scene;
    Metrics coarse;
    Metrics final;
    std::vector<Metrics> levels;
    LossReport loss;
    std::vector<double> hole_fraction; // per synthesised view
    std::vector<std::string> warnings;
};

struct PipelineResult
{
    RgbdImage gt;
    DepthMap coarse;
    std::vector<SynthView> views;
    SweepResult sweep;
    PipelineReport report;
};

inline std::vector<std::string> baseline_warnings(const std::vector<BaselineSpec>& baselines, double d_min)
{
    std::vector<std::string> out;
    for (const auto& b : baselines) {
        if (b.exceeds(d_min)) {
            std::ostringstream os;
            os << "baseline " << to_string(b.axis) << " " << b.offset << " m is not smaller than d_min = " << d_min
               << " m";
            out.push_back(os.str());
        }
    }
    return out;
}

/// Second stage on an already rendered scene and coarse depth.
inline PipelineResult run_stages(const RgbdImage& gt, const DepthMap& coarse, const PipelineConfig& config,
                                 const std::string& scene_name = "scene")
{
    PipelineResult r{gt, coarse, {}, {}, {}};
    r.views = synthesize_views(gt.rgb, coarse, config.baselines, config.splat);
    std::vector<SweepInput> refs;
    refs.reserve(r.views.size());
    for (const auto& v : r.views)
        refs.push_back({v.rgb, v.baseline, v.mask});
    r.sweep = run_sweep(gt.rgb, refs, config.sweep);

    PipelineReport& rep = r.report;
    rep.scene = scene_name;
    rep.coarse = eval_metrics(coarse, gt.depth);
    rep.final = eval_metrics(r.sweep.depth, gt.depth);
    for (const auto& lvl : r.sweep.levels) {
        rep.levels.push_back(eval_metrics(lvl, gt.depth));
        rep.loss.stereo.push_back(berhu(lvl, gt.depth, nullptr, config.berhu));
    }
    rep.loss.coarse = berhu(coarse, gt.depth, nullptr, config.berhu);
    rep.loss.total = total_loss(rep.loss.coarse, rep.loss.stereo, config.omega1, config.omega2, config.lambda);
    for (const auto& v : r.views)
        rep.hole_fraction.push_back(v.hole_fraction());
    rep.warnings = baseline_warnings(config.baselines, config.sweep.d_min);
    return r;
}

/// Full two-stage run: render ground truth from `cam`, derive the coarse
/// depth, synthesise the reference views and sweep with the original image
/// as target.
inline PipelineResult two_stage_run(const SceneSpec& scene, const Vec3& cam, const PipelineConfig& config)
{
    config.validate();
    SceneSpec s = scene;
    s.d_min = config.sweep.d_min;
    s.d_max = config.sweep.d_max;
    const RgbdImage gt = raycast_erp(s, cam, config.width, config.height, config.sweep.threads);
    return run_stages(gt, config.coarse.produce(gt.depth), config, scene.name);
}

/// Generic result table: one row per setting (averaged over the suite) and
/// one detail row per (setting, scene).
struct StudyRow
{
    std::string label;
    std::string scene;
    std::vector<double> values;
};

struct StudyTable
{
    std::string name;
    std::vector<std::string> columns;
    std::vector<StudyRow> rows;
    std::vector<StudyRow> detail;
    std::vector<std::string> notes;

    /// Detail value for (label, scene, column); throws if absent.
    double value(const std::string& label, const std::string& scene, const std::string& column) const
    {
        const auto col = std::find(columns.begin(), columns.end(), column);
        if (col == columns.end())
            throw ConfigError("study table: unknown column " + column);
        for (const auto& r : detail)
            if (r.label == label && r.scene == scene)
                return r.values[static_cast<std::size_t>(col - columns.begin())];
        throw ConfigError("study table: no row " + label + " / " + scene);
    }
};

inline std::vector<std::string> metric_columns()
{
    return {"abs_rel", "sq_rel", "rmse", "rmse_log", "delta1", "delta2", "delta3"};
}

inline std::vector<double> metric_values(const Metrics& m)
{
    return {m.abs_rel, m.sq_rel, m.rmse, m.rmse_log, m.delta1, m.delta2, m.delta3};
}

enum class AblationKind
{
    Sampling,
    StereoDirection,
    CascadePlanes,
    NumViews,
    BaselineFov
};

inline std::string to_string(AblationKind k)
{
    switch (k) {
    case AblationKind::Sampling:
        return "sampling";
    case AblationKind::StereoDirection:
        return "stereo-direction";
    case AblationKind::CascadePlanes:
        return "cascade-planes";
    case AblationKind::NumViews:
        return "num-views";
    case AblationKind::BaselineFov:
        return "baseline-fov";
    }
    return "unknown";
}

/// One configuration of a metric ablation.
struct AblationSetting
{
    std::string label;
    PipelineConfig config;
};

inline std::vector<AblationSetting> ablation_settings(AblationKind kind, const PipelineConfig& base)
{
    std::vector<AblationSetting> out;
    const auto with = [&](std::string label, auto&& edit) {
        PipelineConfig c = base;
        edit(c);
        out.push_back({std::move(label), std::move(c)});
    };
    const auto vertical = [](std::vector<double> offs) {
        std::vector<BaselineSpec> b;
        for (double o : offs)
            b.push_back({BaselineAxis::Vertical, o});
        return b;
    };
    switch (kind) {
    case AblationKind::Sampling:
        with("random", [](PipelineConfig& c) { c.sweep.sampling = SamplingStrategy::Random; });
        with("uniform_depth", [](PipelineConfig& c) { c.sweep.sampling = SamplingStrategy::Depth; });
        with("uniform_inverse_depth", [](PipelineConfig& c) { c.sweep.sampling = SamplingStrategy::InverseDepth; });
        break;
    case AblationKind::StereoDirection:
        with("V+V", [](PipelineConfig& c) {
            c.baselines = {{BaselineAxis::Vertical, -0.24}, {BaselineAxis::Vertical, 0.24}};
        });
        with("H+H", [](PipelineConfig& c) {
            c.baselines = {{BaselineAxis::Horizontal, -0.24}, {BaselineAxis::Horizontal, 0.24}};
        });
        with("H+V", [](PipelineConfig& c) {
            c.baselines = {{BaselineAxis::Horizontal, 0.24}, {BaselineAxis::Vertical, 0.24}};
        });
        break;
    case AblationKind::CascadePlanes: {
        const std::vector<std::vector<int>> grid{{32}, {48}, {64}, {32, 16}, {48, 24}, {64, 32}};
        for (const auto& planes : grid) {
            std::string label = std::to_string(planes.size()) + "-level";
            for (int d : planes)
                label += "-" + std::to_string(d);
            with(label, [&planes](PipelineConfig& c) {
                c.sweep.planes = planes;
                c.sweep.intervals.clear();
                c.lambda.clear();
            });
        }
        break;
    }
    case AblationKind::NumViews: {
        const std::vector<std::vector<double>> sets{{0.12},
                                                    {0.24},
                                                    {-0.12, 0.12},
                                                    {-0.24, 0.24},
                                                    {-0.12, 0.12, 0.24},
                                                    {-0.24, 0.24, 0.4},
                                                    {-0.24, -0.12, 0.12, 0.24},
                                                    {-0.4, -0.24, 0.24, 0.4}};
        for (const auto& s : sets) {
            std::ostringstream label;
            label << s.size() << "-view(";
            for (std::size_t i = 0; i < s.size(); ++i)
                label << (i ? "," : "") << s[i];
            label << ")";
            with(label.str(), [&](PipelineConfig& c) { c.baselines = vertical(s); });
        }
        break;
    }
    case AblationKind::BaselineFov:
        throw ConfigError("ablate: baseline-fov has no depth settings, see baseline_fov_table");
    }
    return out;
}

/// Baseline/FoV study over a suite: one column per baseline, one detail row
/// per (FoV, scene) and one mean row per FoV.
inline StudyTable baseline_fov_table(const std::vector<SceneSpec>& suite, int width, int height,
                                     const FovStudyParams& params, int threads = 1)
{
    if (suite.empty())
        throw ConfigError("baseline/FoV study: scene suite is empty");
    StudyTable table;
    table.name = to_string(AblationKind::BaselineFov);
    for (double b : params.baselines)
        table.columns.push_back(baseline_label(b));
    for (const auto& scene : suite) {
        const FovStudyResult r = baseline_fov_study(scene, width, height, params, threads);
        for (std::size_t f = 0; f < r.fovs.size(); ++f)
            table.detail.push_back({fov_label(r.fovs[f]), scene.name, r.mse[f]});
    }
    for (double fov : params.fovs) {
        std::vector<double> mean(table.columns.size(), 0.0);
        for (const auto& d : table.detail)
            if (d.label == fov_label(fov))
                for (std::size_t c = 0; c < mean.size(); ++c)
                    mean[c] += d.values[c] / static_cast<double>(suite.size());
        table.rows.push_back({fov_label(fov), "mean", mean});
    }
    table.notes.push_back("values are view-synthesis MSE of low-passed error fields, RGB in [0, 1]");
    return table;
}

/// Runs every setting of a metric ablation on every scene of the suite.
/// Ground truth is rendered once per scene.
inline StudyTable ablate(AblationKind kind, const std::vector<SceneSpec>& suite, const PipelineConfig& config)
{
    if (suite.empty())
        throw ConfigError("ablate: scene suite is empty");
    config.validate();
    if (kind == AblationKind::BaselineFov)
        return baseline_fov_table(suite, config.width, config.height, config.study, config.sweep.threads);
    const auto settings = ablation_settings(kind, config);
    StudyTable table;
    table.name = to_string(kind);
    table.columns = metric_columns();

    for (const auto& scene : suite) {
        SceneSpec s = scene;
        s.d_min = config.sweep.d_min;
        s.d_max = config.sweep.d_max;
        const RgbdImage gt = raycast_erp(s, s.camera, config.width, config.height, config.sweep.threads);
        for (const auto& setting : settings) {
            setting.config.validate();
            const DepthMap coarse = setting.config.coarse.produce(gt.depth);
            const PipelineResult r = run_stages(gt, coarse, setting.config, scene.name);
            table.detail.push_back({setting.label, scene.name, metric_values(r.report.final)});
        }
    }
    for (const auto& setting : settings) {
        std::vector<double> mean(table.columns.size(), 0.0);
        for (const auto& d : table.detail)
            if (d.label == setting.label)
                for (std::size_t c = 0; c < mean.size(); ++c)
                    mean[c] += d.values[c] / static_cast<double>(suite.size());
        table.rows.push_back({setting.label, "mean", mean});
    }
    return table;
}

} // namespace panosweep

#endif // PANOSWEEP_PIPELINE_HPP
