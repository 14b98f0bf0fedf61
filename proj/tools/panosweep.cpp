// Command-line front end. Exit codes: 0 success, 1 configuration error,
// 2 I/O error, 3 numerical failure.

#include "panosweep/config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace panosweep;

namespace {

struct CommonOptions
{
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required)
{
    auto* opt = cmd->add_option("--config", o.config, "JSON configuration, scene or report file");
    if (config_required)
        opt->required();
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "overrides the configuration seed");
    cmd->add_option("--threads", o.threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
}

RunConfig load(const CommonOptions& o)
{
    RunConfig rc = o.config.empty() ? RunConfig{} : load_config(o.config);
    if (o.seed)
        rc.pipeline.apply_seed(*o.seed);
    if (o.threads)
        rc.pipeline.sweep.threads = *o.threads;
    rc.pipeline.validate();
    return rc;
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

SceneSpec with_range(SceneSpec s, const PipelineConfig& c)
{
    s.d_min = c.sweep.d_min;
    s.d_max = c.sweep.d_max;
    return s;
}

void print_metrics(const std::string& label, const Metrics& m)
{
    std::cout << std::left << std::setw(24) << label << std::right << std::fixed << std::setprecision(4)
              << " abs_rel " << m.abs_rel << "  sq_rel " << m.sq_rel << "  rmse " << m.rmse << "  rmse_log "
              << m.rmse_log << "  d1 " << m.delta1 << "  d2 " << m.delta2 << "  d3 " << m.delta3 << '\n';
    std::cout.unsetf(std::ios::floatfield);
}

void print_table(const StudyTable& t)
{
    std::cout << table_to_csv(t, false);
}

int cmd_render(const CommonOptions& o)
{
    const RunConfig rc = load(o);
    const auto scenes = rc.scene_list();
    const PipelineConfig& c = rc.pipeline;
    ensure_dir(o.out);
    for (const auto& scene : scenes) {
        const std::string dir = scenes.size() == 1 ? o.out : join(o.out, scene.name);
        ensure_dir(dir);
        const RgbdImage img = raycast_erp(scene, scene.camera, c.width, c.height, c.sweep.threads);
        write_png(join(dir, "rgb.png"), img.rgb);
        write_depth_pfm(join(dir, "depth.pfm"), img.depth);
        std::cout << "rendered " << scene.name << " -> " << dir << '\n';
    }
    return 0;
}

int cmd_synth(const CommonOptions& o, const std::string& in)
{
    const RunConfig rc = load(o);
    const PipelineConfig& c = rc.pipeline;
    const ErpImage rgb = read_erp_png(join(in, "rgb.png"));
    const DepthMap depth = read_depth_pfm(join(in, "depth.pfm"), c.sweep.d_min, c.sweep.d_max);
    if (depth.width() != rgb.width() || depth.height() != rgb.height())
        throw IoError(in + ": rgb.png and depth.pfm sizes differ");
    const auto views = synthesize_views(rgb, depth, c.baselines, c.splat);
    ensure_dir(o.out);
    Json list = Json::array();
    for (std::size_t k = 0; k < views.size(); ++k) {
        const std::string img = "view_" + std::to_string(k) + ".png";
        const std::string mask = "mask_" + std::to_string(k) + ".png";
        write_png(join(o.out, img), views[k].rgb);
        write_mask_png(join(o.out, mask), views[k].mask);
        list.push_back({{"image", img},
                        {"mask", mask},
                        {"axis", to_string(views[k].baseline.axis)},
                        {"offset", views[k].baseline.offset},
                        {"hole_fraction", views[k].hole_fraction()}});
        std::cout << "view " << k << ": " << to_string(views[k].baseline.axis) << ' ' << views[k].baseline.offset
                  << " m, holes " << views[k].hole_fraction() << '\n';
    }
    write_text(join(o.out, "views.json"), list.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& in, const std::string& views_dir)
{
    const RunConfig rc = load(o);
    const PipelineConfig& c = rc.pipeline;
    const std::string vdir = views_dir.empty() ? in : views_dir;
    const ErpImage target = read_erp_png(join(in, "rgb.png"));
    Json list;
    try {
        list = Json::parse(read_text(join(vdir, "views.json")));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(join(vdir, "views.json") + ": invalid JSON: " + e.what());
    }
    if (!list.is_array() || list.empty())
        throw IoError(join(vdir, "views.json") + ": expected a non-empty array");
    std::vector<SweepInput> refs;
    for (const auto& v : list) {
        const std::string ctx = "views.json entry";
        SweepInput r;
        r.rgb = read_erp_png(join(vdir, detail::get_req<std::string>(v, "image", ctx)));
        r.mask = v.contains("mask") ? read_mask_png(join(vdir, detail::get_req<std::string>(v, "mask", ctx)))
                                    : Raster<std::uint8_t>(r.rgb.width(), r.rgb.height(), 1);
        std::string axis = "vertical";
        detail::get_opt(v, "axis", axis, ctx);
        r.baseline = {parse_axis(axis), detail::get_req<double>(v, "offset", ctx)};
        refs.push_back(std::move(r));
    }
    const SweepResult res = run_sweep(target, refs, c.sweep);
    ensure_dir(o.out);
    write_depth_pfm(join(o.out, "depth.pfm"), res.depth);
    for (std::size_t l = 0; l < res.levels.size(); ++l)
        write_depth_pfm(join(o.out, "level_" + std::to_string(l + 1) + ".pfm"), res.levels[l]);
    const std::string gt_path = join(in, "depth.pfm");
    if (fs::exists(gt_path)) {
        const DepthMap gt = read_depth_pfm(gt_path, c.sweep.d_min, c.sweep.d_max);
        for (std::size_t l = 0; l < res.levels.size(); ++l)
            print_metrics("level " + std::to_string(l + 1), eval_metrics(res.levels[l], gt));
    }
    return 0;
}

int cmd_pipeline(const CommonOptions& o)
{
    const RunConfig rc = load(o);
    std::vector<PipelineReport> reports;
    for (const auto& scene : rc.scene_list()) {
        const PipelineResult r = two_stage_run(scene, scene.camera, rc.pipeline);
        print_metrics(scene.name + " coarse", r.report.coarse);
        print_metrics(scene.name + " final", r.report.final);
        for (const auto& w : r.report.warnings)
            std::cerr << "warning: " << w << '\n';
        reports.push_back(r.report);
    }
    ensure_dir(o.out);
    write_text(join(o.out, "report.json"), report_to_json(rc, reports).dump(2) + "\n");
    return 0;
}

int write_table(const StudyTable& t, const std::string& out)
{
    ensure_dir(out);
    write_text(join(out, t.name + ".csv"), table_to_csv(t, false));
    write_text(join(out, t.name + "_per_scene.csv"), table_to_csv(t, true));
    print_table(t);
    return 0;
}

int cmd_ablate(const CommonOptions& o, const std::string& kind)
{
    const RunConfig rc = load(o);
    return write_table(ablate(parse_ablation(kind), rc.scene_list(), rc.pipeline), o.out);
}

int cmd_study(const CommonOptions& o)
{
    const RunConfig rc = load(o);
    std::vector<SceneSpec> scenes;
    for (const auto& s : rc.scene_list())
        scenes.push_back(with_range(s, rc.pipeline));
    const PipelineConfig& c = rc.pipeline;
    return write_table(baseline_fov_table(scenes, c.width, c.height, c.study, c.sweep.threads), o.out);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-stage 360-degree depth estimation with spherical plane-sweep stereo"};
    app.require_subcommand(1);

    CommonOptions render_o, synth_o, sweep_o, pipeline_o, ablate_o, study_o;
    std::string synth_in, sweep_in, sweep_views, ablate_kind;

    auto* render = app.add_subcommand("render", "render a scene to rgb.png and depth.pfm");
    add_common(render, render_o, true);

    auto* synth = app.add_subcommand("synth", "synthesise views from an RGB-D pair along the configured baselines");
    add_common(synth, synth_o, false);
    synth->add_option("--in", synth_in, "directory with rgb.png and depth.pfm")->required();

    auto* sweep = app.add_subcommand("sweep", "plane-sweep depth from a target image and synthesised views");
    add_common(sweep, sweep_o, false);
    sweep->add_option("--in", sweep_in, "directory with the target rgb.png (and optional ground-truth depth.pfm)")
        ->required();
    sweep->add_option("--views", sweep_views, "directory with views.json (default: --in)");

    auto* pipeline = app.add_subcommand("pipeline", "full two-stage run, writes report.json");
    add_common(pipeline, pipeline_o, false);

    auto* abl = app.add_subcommand("ablate", "run an ablation over the scene suite, writes <kind>.csv");
    add_common(abl, ablate_o, false);
    abl->add_option("kind", ablate_kind, "sampling | stereo-direction | cascade-planes | num-views | baseline-fov")
        ->required();

    auto* study = app.add_subcommand("study-baseline-fov", "view-synthesis MSE versus baseline and field of view");
    add_common(study, study_o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*render)
            return cmd_render(render_o);
        if (*synth)
            return cmd_synth(synth_o, synth_in);
        if (*sweep)
            return cmd_sweep(sweep_o, sweep_in, sweep_views);
        if (*pipeline)
            return cmd_pipeline(pipeline_o);
        if (*abl)
            return cmd_ablate(ablate_o, ablate_kind);
        if (*study)
            return cmd_study(study_o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
