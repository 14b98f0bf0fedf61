#ifndef PANOSWEEP_CONFIG_HPP
#define PANOSWEEP_CONFIG_HPP

// JSON forms of scenes, run configurations and reports. Readers are strict:
// unknown keys and ill-typed values raise ConfigError naming the key.

#include "panosweep/io.hpp"
#include "panosweep/pipeline.hpp"
#include "panosweep/suite.hpp"

#include <json.hpp>

#include <charconv>
#include <initializer_list>
#include <string>
#include <vector>

namespace panosweep {

using Json = nlohmann::json;

/// Everything a CLI run needs: the pipeline settings plus the scenes to
/// evaluate (empty = the built-in three-scene suite).
struct RunConfig
{
    PipelineConfig pipeline;
    std::vector<SceneSpec> scenes;

    std::vector<SceneSpec> scene_list() const { return scenes.empty() ? default_suite() : scenes; }
};

inline DescriptorKind parse_descriptor(const std::string& s)
{
    if (s == "rgb")
        return DescriptorKind::Rgb;
    if (s == "census5x5")
        return DescriptorKind::Census5x5;
    if (s == "zncc")
        return DescriptorKind::ZnccPatch;
    throw ConfigError("unknown descriptor '" + s + "' (expected rgb, census5x5 or zncc)");
}

inline SamplingStrategy parse_sampling(const std::string& s)
{
    if (s == "inverse_depth")
        return SamplingStrategy::InverseDepth;
    if (s == "depth")
        return SamplingStrategy::Depth;
    if (s == "random")
        return SamplingStrategy::Random;
    throw ConfigError("unknown sampling '" + s + "' (expected inverse_depth, depth or random)");
}

inline WarpModel parse_warp(const std::string& s)
{
    if (s == "swl")
        return WarpModel::Swl;
    if (s == "exact")
        return WarpModel::Exact;
    throw ConfigError("unknown vertical warp '" + s + "' (expected swl or exact)");
}

inline std::string to_string(WarpModel w) { return w == WarpModel::Swl ? "swl" : "exact"; }

inline CoarseKind parse_coarse(const std::string& s)
{
    for (CoarseKind k : {CoarseKind::GroundTruth, CoarseKind::NoisyGT, CoarseKind::Quantized, CoarseKind::ConstantPlane})
        if (to_string(k) == s)
            return k;
    throw ConfigError("unknown coarse provider '" + s + "'");
}

inline BaselineAxis parse_axis(const std::string& s)
{
    if (s == "vertical")
        return BaselineAxis::Vertical;
    if (s == "horizontal")
        return BaselineAxis::Horizontal;
    throw ConfigError("unknown baseline axis '" + s + "' (expected vertical or horizontal)");
}

inline AblationKind parse_ablation(const std::string& s)
{
    for (AblationKind k : {AblationKind::Sampling, AblationKind::StereoDirection, AblationKind::CascadePlanes,
                           AblationKind::NumViews, AblationKind::BaselineFov})
        if (to_string(k) == s)
            return k;
    throw ConfigError("unknown ablation '" + s +
                      "' (expected sampling, stereo-direction, cascade-planes, num-views or baseline-fov)");
}

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& ctx)
{
    if (!j.is_object())
        throw ConfigError(ctx + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || item.key() == a;
        if (!ok)
            throw ConfigError(ctx + ": unknown key '" + item.key() + "'");
    }
}

/// Assigns j[key] to `out` when present.
template <typename T>
void get_opt(const Json& j, const char* key, T& out, const std::string& ctx)
{
    const auto it = j.find(key);
    if (it == j.end())
        return;
    try {
        out = it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(ctx + "." + key + ": wrong value type");
    }
}

template <typename T>
T get_req(const Json& j, const char* key, const std::string& ctx)
{
    if (!j.contains(key))
        throw ConfigError(ctx + ": missing key '" + key + "'");
    T out{};
    get_opt(j, key, out, ctx);
    return out;
}

inline Vec3 vec3_from(const Json& j, const std::string& ctx)
{
    if (!j.is_array() || j.size() != 3)
        throw ConfigError(ctx + ": expected [x, y, z]");
    try {
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(ctx + ": expected three numbers");
    }
}

inline Rgb rgb_from(const Json& j, const std::string& ctx)
{
    const Vec3 v = vec3_from(j, ctx);
    return {static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)};
}

inline Json to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }
/// Shortest decimal that reads back to the same float, as a JSON number.
inline double float_json(float f)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), f);
    double d = 0.0;
    std::from_chars(buf, res.ptr, d);
    return d;
}

inline Json to_json(const Rgb& c) { return Json::array({float_json(c.r), float_json(c.g), float_json(c.b)}); }

} // namespace detail

// ---- scenes ----------------------------------------------------------------

inline Json scene_to_json(const SceneSpec& s)
{
    Json prims = Json::array();
    for (const auto& p : s.primitives) {
        Json o;
        if (const auto* sp = std::get_if<Sphere>(&p.shape)) {
            o["shape"] = "sphere";
            o["center"] = detail::to_json(sp->center);
            o["radius"] = sp->radius;
        } else if (const auto* b = std::get_if<AxisAlignedBox>(&p.shape)) {
            o["shape"] = "box";
            o["min"] = detail::to_json(b->min);
            o["max"] = detail::to_json(b->max);
        } else {
            const auto& pl = std::get<Plane>(p.shape);
            o["shape"] = "plane";
            o["point"] = detail::to_json(pl.point);
            o["normal"] = detail::to_json(pl.normal);
        }
        Json t;
        if (const auto* c = std::get_if<CheckerTexture>(&p.texture)) {
            t["type"] = "checker";
            t["scale"] = c->scale;
            Json cols = Json::array();
            for (const auto& col : c->colors)
                cols.push_back(detail::to_json(col));
            t["colors"] = cols;
        } else {
            const auto& n = std::get<ValueNoiseTexture>(p.texture);
            t["type"] = "value_noise";
            t["seed"] = n.seed;
            t["scale"] = n.scale;
        }
        o["texture"] = t;
        prims.push_back(o);
    }
    return {{"name", s.name},
            {"camera", detail::to_json(s.camera)},
            {"background", detail::to_json(s.background)},
            {"d_min", s.d_min},
            {"d_max", s.d_max},
            {"primitives", prims}};
}

inline SceneSpec builtin_scene(const std::string& name)
{
    for (const auto& s : default_suite())
        if (s.name == name)
            return s;
    throw ConfigError("unknown built-in scene '" + name + "' (expected checker-sphere, room or courtyard)");
}

inline SceneSpec scene_from_json(const Json& j)
{
    if (j.is_string())
        return builtin_scene(j.get<std::string>());
    const std::string ctx = "scene";
    detail::check_keys(j, {"name", "camera", "background", "d_min", "d_max", "primitives"}, ctx);
    SceneSpec s;
    detail::get_opt(j, "name", s.name, ctx);
    if (j.contains("camera"))
        s.camera = detail::vec3_from(j["camera"], ctx + ".camera");
    if (j.contains("background"))
        s.background = detail::rgb_from(j["background"], ctx + ".background");
    detail::get_opt(j, "d_min", s.d_min, ctx);
    detail::get_opt(j, "d_max", s.d_max, ctx);
    if (!j.contains("primitives") || !j["primitives"].is_array())
        throw ConfigError(ctx + ": 'primitives' must be an array");
    for (std::size_t i = 0; i < j["primitives"].size(); ++i) {
        const Json& p = j["primitives"][i];
        const std::string pc = ctx + ".primitives[" + std::to_string(i) + "]";
        const auto shape = detail::get_req<std::string>(p, "shape", pc);
        Primitive prim;
        if (shape == "sphere") {
            detail::check_keys(p, {"shape", "center", "radius", "texture"}, pc);
            prim.shape = Sphere{detail::vec3_from(p.value("center", Json::array({0, 0, 0})), pc + ".center"),
                                detail::get_req<double>(p, "radius", pc)};
        } else if (shape == "box") {
            detail::check_keys(p, {"shape", "min", "max", "texture"}, pc);
            if (!p.contains("min") || !p.contains("max"))
                throw ConfigError(pc + ": box needs 'min' and 'max'");
            prim.shape = AxisAlignedBox{detail::vec3_from(p["min"], pc + ".min"), detail::vec3_from(p["max"], pc + ".max")};
        } else if (shape == "plane") {
            detail::check_keys(p, {"shape", "point", "normal", "texture"}, pc);
            if (!p.contains("point") || !p.contains("normal"))
                throw ConfigError(pc + ": plane needs 'point' and 'normal'");
            prim.shape = Plane{detail::vec3_from(p["point"], pc + ".point"), detail::vec3_from(p["normal"], pc + ".normal")};
        } else {
            throw ConfigError(pc + ": unknown shape '" + shape + "' (expected sphere, box or plane)");
        }
        if (p.contains("texture")) {
            const Json& t = p["texture"];
            const std::string tc = pc + ".texture";
            const auto type = detail::get_req<std::string>(t, "type", tc);
            if (type == "checker") {
                detail::check_keys(t, {"type", "scale", "colors"}, tc);
                CheckerTexture c;
                detail::get_opt(t, "scale", c.scale, tc);
                if (!(c.scale > 0.0))
                    throw ConfigError(tc + ".scale: must be positive");
                if (t.contains("colors")) {
                    if (!t["colors"].is_array() || t["colors"].empty())
                        throw ConfigError(tc + ".colors: expected a non-empty array");
                    c.colors.clear();
                    for (const auto& col : t["colors"])
                        c.colors.push_back(detail::rgb_from(col, tc + ".colors"));
                }
                prim.texture = c;
            } else if (type == "value_noise") {
                detail::check_keys(t, {"type", "seed", "scale"}, tc);
                ValueNoiseTexture n;
                detail::get_opt(t, "seed", n.seed, tc);
                detail::get_opt(t, "scale", n.scale, tc);
                if (!(n.scale > 0.0))
                    throw ConfigError(tc + ".scale: must be positive");
                prim.texture = n;
            } else {
                throw ConfigError(tc + ": unknown texture '" + type + "' (expected checker or value_noise)");
            }
        }
        s.primitives.push_back(prim);
    }
    validate_camera(s, s.camera);
    return s;
}

// ---- run configuration -------------------------------------------------------

inline Json config_to_json(const RunConfig& rc)
{
    const PipelineConfig& c = rc.pipeline;
    Json baselines = Json::array();
    for (const auto& b : c.baselines)
        baselines.push_back({{"axis", to_string(b.axis)}, {"offset", b.offset}});
    Json scenes = Json::array();
    for (const auto& s : rc.scenes)
        scenes.push_back(scene_to_json(s));
    const SweepConfig& w = c.sweep;
    const FovStudyParams& st = c.study;
    Json j = {
        {"width", c.width},
        {"height", c.height},
        {"seed", c.seed},
        {"threads", w.threads},
        {"coarse",
         {{"kind", to_string(c.coarse.kind)},
          {"sigma_rel", c.coarse.sigma_rel},
          {"levels", c.coarse.levels},
          {"depth", c.coarse.depth}}},
        {"baselines", baselines},
        {"splat", {{"sigma_z", c.splat.sigma_z}, {"eps_w", c.splat.eps_w}}},
        {"sweep",
         {{"planes", w.planes},
          {"interval_scale", w.interval_scale},
          {"intervals", w.intervals},
          {"tau", w.tau},
          {"descriptor", to_string(w.descriptor)},
          {"d_min", w.d_min},
          {"d_max", w.d_max},
          {"sampling", to_string(w.sampling)},
          {"jitter_sigma", w.jitter_sigma},
          {"aggregate", w.aggregate},
          {"aggregation_radius", w.aggregation.radius},
          {"aggregation_eps", w.aggregation.eps},
          {"vertical_warp", to_string(w.vertical_warp)},
          {"census_threshold", w.features.census_threshold}}},
        {"loss",
         {{"omega1", c.omega1},
          {"omega2", c.omega2},
          {"lambda", c.lambda},
          {"berhu_fraction", c.berhu.fraction},
          {"berhu_fixed_c", c.berhu.fixed_c}}},
        {"study",
         {{"baselines", st.baselines},
          {"fovs", st.fovs},
          {"grid_rows", st.grid_rows},
          {"grid_cols", st.grid_cols},
          {"margin", st.margin},
          {"viewpoints", st.viewpoints},
          {"jitter_radius", st.jitter_radius},
          {"crop_focal_scale", st.crop_focal_scale},
          {"supersample", st.supersample},
          {"aa_sigma", st.aa_sigma},
          {"lowpass_sigma", st.lowpass_sigma},
          {"sigma_z", st.splat.sigma_z},
          {"eps_w", st.splat.eps_w}}},
    };
    if (!rc.scenes.empty())
        j["scenes"] = scenes;
    return j;
}

/// Parses a run configuration. Also accepts a bare scene object (a config
/// with that single scene and default settings) and a report produced by
/// report_to_json (its embedded configuration).
inline RunConfig config_from_json(const Json& root)
{
    if (root.is_object() && root.contains("primitives")) {
        RunConfig rc;
        rc.scenes.push_back(scene_from_json(root));
        return rc;
    }
    if (root.is_object() && root.contains("format") && root.value("format", "") == "panosweep-report") {
        if (!root.contains("config"))
            throw ConfigError("report has no embedded config");
        return config_from_json(root["config"]);
    }
    const std::string ctx = "config";
    detail::check_keys(root,
                       {"width", "height", "seed", "threads", "scene", "scenes", "coarse", "baselines", "splat",
                        "sweep", "loss", "study"},
                       ctx);
    RunConfig rc;
    PipelineConfig& c = rc.pipeline;
    detail::get_opt(root, "width", c.width, ctx);
    detail::get_opt(root, "height", c.height, ctx);
    std::uint64_t seed = 0;
    detail::get_opt(root, "seed", seed, ctx);
    c.apply_seed(seed);
    detail::get_opt(root, "threads", c.sweep.threads, ctx);

    if (root.contains("scene") && root.contains("scenes"))
        throw ConfigError(ctx + ": give either 'scene' or 'scenes'");
    if (root.contains("scene"))
        rc.scenes.push_back(scene_from_json(root["scene"]));
    if (root.contains("scenes")) {
        if (!root["scenes"].is_array())
            throw ConfigError(ctx + ".scenes: expected an array");
        for (const auto& s : root["scenes"])
            rc.scenes.push_back(scene_from_json(s));
    }

    if (root.contains("coarse")) {
        const Json& j = root["coarse"];
        const std::string cc = ctx + ".coarse";
        detail::check_keys(j, {"kind", "sigma_rel", "levels", "depth"}, cc);
        if (j.contains("kind"))
            c.coarse.kind = parse_coarse(detail::get_req<std::string>(j, "kind", cc));
        detail::get_opt(j, "sigma_rel", c.coarse.sigma_rel, cc);
        detail::get_opt(j, "levels", c.coarse.levels, cc);
        detail::get_opt(j, "depth", c.coarse.depth, cc);
    }
    if (root.contains("baselines")) {
        if (!root["baselines"].is_array())
            throw ConfigError(ctx + ".baselines: expected an array");
        c.baselines.clear();
        for (std::size_t i = 0; i < root["baselines"].size(); ++i) {
            const Json& b = root["baselines"][i];
            const std::string bc = ctx + ".baselines[" + std::to_string(i) + "]";
            if (b.is_number()) {
                c.baselines.push_back({BaselineAxis::Vertical, b.get<double>()});
                continue;
            }
            detail::check_keys(b, {"axis", "offset"}, bc);
            BaselineSpec spec;
            if (b.contains("axis"))
                spec.axis = parse_axis(detail::get_req<std::string>(b, "axis", bc));
            spec.offset = detail::get_req<double>(b, "offset", bc);
            c.baselines.push_back(spec);
        }
    }
    if (root.contains("splat")) {
        const Json& j = root["splat"];
        detail::check_keys(j, {"sigma_z", "eps_w"}, ctx + ".splat");
        detail::get_opt(j, "sigma_z", c.splat.sigma_z, ctx + ".splat");
        detail::get_opt(j, "eps_w", c.splat.eps_w, ctx + ".splat");
    }
    if (root.contains("sweep")) {
        const Json& j = root["sweep"];
        const std::string sc = ctx + ".sweep";
        detail::check_keys(j,
                           {"planes", "interval_scale", "intervals", "tau", "descriptor", "d_min", "d_max",
                            "sampling", "jitter_sigma", "aggregate", "aggregation_radius", "aggregation_eps",
                            "vertical_warp", "census_threshold"},
                           sc);
        SweepConfig& w = c.sweep;
        detail::get_opt(j, "planes", w.planes, sc);
        detail::get_opt(j, "interval_scale", w.interval_scale, sc);
        detail::get_opt(j, "intervals", w.intervals, sc);
        detail::get_opt(j, "tau", w.tau, sc);
        if (j.contains("descriptor"))
            w.descriptor = parse_descriptor(detail::get_req<std::string>(j, "descriptor", sc));
        detail::get_opt(j, "d_min", w.d_min, sc);
        detail::get_opt(j, "d_max", w.d_max, sc);
        if (j.contains("sampling"))
            w.sampling = parse_sampling(detail::get_req<std::string>(j, "sampling", sc));
        detail::get_opt(j, "jitter_sigma", w.jitter_sigma, sc);
        detail::get_opt(j, "aggregate", w.aggregate, sc);
        detail::get_opt(j, "aggregation_radius", w.aggregation.radius, sc);
        detail::get_opt(j, "aggregation_eps", w.aggregation.eps, sc);
        if (j.contains("vertical_warp"))
            w.vertical_warp = parse_warp(detail::get_req<std::string>(j, "vertical_warp", sc));
        detail::get_opt(j, "census_threshold", w.features.census_threshold, sc);
    }
    if (root.contains("loss")) {
        const Json& j = root["loss"];
        const std::string lc = ctx + ".loss";
        detail::check_keys(j, {"omega1", "omega2", "lambda", "berhu_fraction", "berhu_fixed_c"}, lc);
        detail::get_opt(j, "omega1", c.omega1, lc);
        detail::get_opt(j, "omega2", c.omega2, lc);
        detail::get_opt(j, "lambda", c.lambda, lc);
        detail::get_opt(j, "berhu_fraction", c.berhu.fraction, lc);
        detail::get_opt(j, "berhu_fixed_c", c.berhu.fixed_c, lc);
    }
    if (root.contains("study")) {
        const Json& j = root["study"];
        const std::string stc = ctx + ".study";
        detail::check_keys(j,
                           {"baselines", "fovs", "grid_rows", "grid_cols", "margin", "viewpoints", "jitter_radius",
                            "crop_focal_scale", "supersample", "aa_sigma", "lowpass_sigma", "sigma_z", "eps_w"},
                           stc);
        FovStudyParams& st = c.study;
        detail::get_opt(j, "baselines", st.baselines, stc);
        detail::get_opt(j, "fovs", st.fovs, stc);
        detail::get_opt(j, "grid_rows", st.grid_rows, stc);
        detail::get_opt(j, "grid_cols", st.grid_cols, stc);
        detail::get_opt(j, "margin", st.margin, stc);
        detail::get_opt(j, "viewpoints", st.viewpoints, stc);
        detail::get_opt(j, "jitter_radius", st.jitter_radius, stc);
        detail::get_opt(j, "crop_focal_scale", st.crop_focal_scale, stc);
        detail::get_opt(j, "supersample", st.supersample, stc);
        detail::get_opt(j, "aa_sigma", st.aa_sigma, stc);
        detail::get_opt(j, "lowpass_sigma", st.lowpass_sigma, stc);
        detail::get_opt(j, "sigma_z", st.splat.sigma_z, stc);
        detail::get_opt(j, "eps_w", st.splat.eps_w, stc);
    }
    c.validate();
    return rc;
}

inline RunConfig load_config(const std::string& path)
{
    const std::string text = read_text(path);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    return config_from_json(j);
}

// ---- reports -----------------------------------------------------------------

inline Json metrics_to_json(const Metrics& m)
{
    return {{"abs_rel", m.abs_rel}, {"sq_rel", m.sq_rel}, {"rmse", m.rmse},       {"rmse_log", m.rmse_log},
            {"delta1", m.delta1},   {"delta2", m.delta2}, {"delta3", m.delta3}, {"pixels", m.pixels}};
}

inline Json pipeline_report_to_json(const PipelineReport& r)
{
    Json levels = Json::array();
    for (const auto& m : r.levels)
        levels.push_back(metrics_to_json(m));
    return {{"scene", r.scene},
            {"coarse", metrics_to_json(r.coarse)},
            {"final", metrics_to_json(r.final)},
            {"levels", levels},
            {"loss", {{"coarse", r.loss.coarse}, {"stereo", r.loss.stereo}, {"total", r.loss.total}}},
            {"hole_fraction", r.hole_fraction},
            {"warnings", r.warnings}};
}

/// report.json: the full configuration (scenes expanded) and one entry per
/// scene. Contains no timestamps or host data, so identical runs produce
/// identical bytes.
inline Json report_to_json(const RunConfig& rc, const std::vector<PipelineReport>& reports)
{
    RunConfig expanded = rc;
    expanded.scenes = rc.scene_list();
    Json scenes = Json::array();
    for (const auto& r : reports)
        scenes.push_back(pipeline_report_to_json(r));
    return {{"format", "panosweep-report"}, {"version", 1}, {"config", config_to_json(expanded)}, {"results", scenes}};
}

/// CSV with a header "label,scene,<columns...>" and one line per row.
inline std::string table_to_csv(const StudyTable& t, bool detail_rows)
{
    std::string out = "label,scene";
    for (const auto& c : t.columns)
        out += "," + csv_field(c);
    out += "\n";
    for (const auto& r : detail_rows ? t.detail : t.rows) {
        out += csv_field(r.label) + "," + csv_field(r.scene);
        for (double v : r.values)
            out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

} // namespace panosweep

#endif // PANOSWEEP_CONFIG_HPP
