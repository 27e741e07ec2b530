/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: tools/morphfuse_cli.cpp
 *
 * Copyright 2026 The morphfuse authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "morphfuse/body/camera.hpp"
#include "morphfuse/body/deform.hpp"
#include "morphfuse/body/model_io.hpp"
#include "morphfuse/core/mesh_io.hpp"
#include "morphfuse/core/normals.hpp"
#include "morphfuse/core/submesh.hpp"
#include "morphfuse/core/topology.hpp"
#include "morphfuse/face/displacement.hpp"
#include "morphfuse/face/model_io.hpp"
#include "morphfuse/face/sdf.hpp"
#include "morphfuse/fit/cache.hpp"
#include "morphfuse/fit/fitter.hpp"
#include "morphfuse/fuse/bridge.hpp"
#include "morphfuse/fuse/fusion.hpp"
#include "morphfuse/fuse/icp.hpp"
#include "morphfuse/fuse/shading.hpp"
#include "morphfuse/io/json_io.hpp"
#include "morphfuse/io/pgm.hpp"
#include "morphfuse/metrics/metrics.hpp"
#include "morphfuse/metrics/report.hpp"
#include "morphfuse/synth/scene.hpp"
#include "morphfuse/synth/toy_models.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace morphfuse;

namespace {

// ------------------------------------------------------------- logging ----

enum class LogLevel
{
    Error = 0,
    Info = 1,
    Debug = 2
};

LogLevel log_level()
{
    static const LogLevel level = [] {
        const char* env = std::getenv("MORPHFUSE_LOG");
        if (env == nullptr)
        {
            return LogLevel::Error;
        }
        const std::string value(env);
        if (value == "debug")
        {
            return LogLevel::Debug;
        }
        if (value == "info")
        {
            return LogLevel::Info;
        }
        return LogLevel::Error;
    }();
    return level;
}

void log_error(const std::string& message)
{
    std::cerr << "morphfuse: error: " << message << '\n';
}

void log_info(const std::string& message)
{
    if (log_level() >= LogLevel::Info)
    {
        std::cerr << "morphfuse: " << message << '\n';
    }
}

void log_debug(const std::string& message)
{
    if (log_level() >= LogLevel::Debug)
    {
        std::cerr << "morphfuse: debug: " << message << '\n';
    }
}

// ------------------------------------------------------------- helpers ----

std::vector<double> parse_csv_numbers(const std::string& text, std::size_t expected, const char* flag)
{
    std::vector<double> values;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ','))
    {
        try
        {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size())
            {
                throw std::invalid_argument(token);
            }
        }
        catch (const std::exception&)
        {
            throw std::runtime_error(std::string(flag) + ": '" + token + "' is not a number");
        }
    }
    if (values.size() != expected)
    {
        throw std::runtime_error(std::string(flag) + ": expected " + std::to_string(expected) +
                                 " comma-separated numbers, got " + std::to_string(values.size()));
    }
    return values;
}

std::string format_double(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path);
    if (!out)
    {
        throw std::runtime_error(path + ": cannot open file for writing");
    }
    out << content;
    if (!out)
    {
        throw std::runtime_error(path + ": write failed");
    }
}

face::BinaryGrid grid_from_pgm(const io::PgmImage& image)
{
    face::BinaryGrid grid;
    grid.rows = image.rows;
    grid.cols = image.cols;
    grid.cells.resize(static_cast<std::size_t>(image.rows) * static_cast<std::size_t>(image.cols));
    for (std::size_t i = 0; i < grid.cells.size(); ++i)
    {
        grid.cells[i] = image.pixels[i] > 0 ? 1 : 0;
    }
    return grid;
}

std::string trace_to_csv(const std::vector<double>& trace)
{
    std::ostringstream out;
    out << "iteration,loss\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
    {
        out << i << ',' << format_double(trace[i]) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------- synth ----

struct SynthOptions
{
    std::string kind;
    std::uint64_t seed = 0;
    std::string out;
    int n_identity = 8;
    int n_expression = 6;
    int n_texture = 5;
    int n_beta = 4;
};

void cmd_synth(const SynthOptions& opt)
{
    if (opt.kind == "face")
    {
        synth::SeededRng rng(opt.seed);
        const face::MorphableFaceModel model =
            synth::make_toy_face_model(rng, opt.n_identity, opt.n_expression, opt.n_texture);
        face::save_face_model(model, opt.out);
        log_info("wrote face model to " + opt.out);
    }
    else if (opt.kind == "body")
    {
        synth::SeededRng rng(opt.seed);
        const body::BodyModel model = synth::make_toy_body_model(rng, opt.n_beta);
        body::save_body_model(model, opt.out);
        log_info("wrote body model to " + opt.out);
    }
    else
    {
        const synth::Scene scene = synth::make_scene(opt.seed);
        synth::write_scene(opt.out, scene);
        log_info("wrote scene to " + opt.out);
    }
}

// ----------------------------------------------------------------- face ----

struct FaceOptions
{
    std::string model_dir;
    std::string coeffs;
    std::string dmap;
    std::string line_mask;
    std::string inside_mask;
    double sdf_spacing = 1.0;
    std::string sdf_origin = "0,0";
    double lambda = 1.0;
    std::string plane = "xy";
    int iterations = 1;
    std::string out;
};

void cmd_face(const FaceOptions& opt)
{
    const face::MorphableFaceModel model = face::load_face_model(opt.model_dir);
    const face::FaceCoefficients coeffs = io::coefficients_from_json(io::load_json_file(opt.coeffs));
    core::Mesh mesh = face::evaluate_3dmm(model, coeffs);
    log_debug("evaluated 3dmm: " + std::to_string(mesh.vertices.size()) + " vertices");

    if (!opt.dmap.empty())
    {
        const std::vector<double> dmap = io::displacement_from_json(io::load_json_file(opt.dmap));
        mesh = face::apply_displacement(mesh, dmap);
        log_debug("applied displacement map");
    }

    if (!opt.line_mask.empty() || !opt.inside_mask.empty())
    {
        if (opt.line_mask.empty() || opt.inside_mask.empty())
        {
            throw std::runtime_error("--line-mask and --inside-mask must be given together");
        }
        const face::BinaryGrid line = grid_from_pgm(io::load_pgm(opt.line_mask));
        const face::BinaryGrid inside = grid_from_pgm(io::load_pgm(opt.inside_mask));
        const std::vector<double> origin = parse_csv_numbers(opt.sdf_origin, 2, "--sdf-origin");
        const face::ScalarField2D field =
            face::edt_sdf(line, opt.sdf_spacing, inside, core::Vec2(origin[0], origin[1]));

        face::ProjectionPlane plane = face::ProjectionPlane::XY;
        if (opt.plane == "xz")
        {
            plane = face::ProjectionPlane::XZ;
        }
        else if (opt.plane == "yz")
        {
            plane = face::ProjectionPlane::YZ;
        }
        else if (opt.plane != "xy")
        {
            throw std::runtime_error("--plane must be one of xy, xz, yz");
        }
        mesh = face::refine_with_sdf(mesh, field, opt.lambda, plane, opt.iterations);
        log_debug("refined against the contour field");
    }

    core::save_mesh(mesh, opt.out);
    log_info("wrote mesh to " + opt.out);
}

// ------------------------------------------------------------------ fit ----

struct FitOptions
{
    std::string model_dir;
    std::string keypoints;
    std::string config;
    std::string cache;
    std::string sample_id;
    std::string out;
    std::string trace;
    std::string out_joints;
    double lambda_pose = 0.0;
    double lambda_shape = 0.0;
    bool lambda_pose_set = false;
    bool lambda_shape_set = false;
};

void cmd_fit(const FitOptions& opt)
{
    const body::BodyModel model = body::load_body_model(opt.model_dir);
    const body::Keypoints2D keypoints = io::keypoints_from_json(io::load_json_file(opt.keypoints));
    fit::FitConfig config = io::fit_config_from_json(io::load_json_file(opt.config));
    if (opt.lambda_pose_set)
    {
        config.lambda_pose = opt.lambda_pose;
    }
    if (opt.lambda_shape_set)
    {
        config.lambda_shape = opt.lambda_shape;
    }

    const fit::FitResult result = fit::fit_body(model, keypoints, config);
    log_info("fit finished: loss " + format_double(result.final_loss) + " after " +
             std::to_string(result.trace.size() - 1) + " accepted steps");

    io::save_json_file(opt.out, io::body_params_to_json(result.params));
    const std::string trace_path = opt.trace.empty() ? opt.out + ".trace.csv" : opt.trace;
    write_text_file(trace_path, trace_to_csv(result.trace));

    if (!opt.out_joints.empty())
    {
        const body::PoseResult posed = body::pose_body(model, result.params);
        io::save_json_file(opt.out_joints, io::joints_to_json(posed.joints));
    }

    if (!opt.cache.empty())
    {
        fit::BestFitCache cache;
        if (fs::exists(opt.cache))
        {
            cache = io::cache_from_json(io::load_json_file(opt.cache));
        }
        const std::string id =
            opt.sample_id.empty() ? fs::path(opt.keypoints).stem().string() : opt.sample_id;
        const bool kept = fit::cache_update(cache, id, result.params, result.final_loss);
        io::save_json_file(opt.cache, io::cache_to_json(cache));
        log_info(std::string("cache entry '") + id + (kept ? "' updated" : "' kept previous best"));
    }
}

// ----------------------------------------------------------------- fuse ----

struct FuseOptions
{
    std::string model_dir;
    std::string params;
    std::string face;
    std::string spec;
    std::string strategy = "copy";
    double lambda_pose = 0.0;
    double lambda_shape = 0.0;
    int max_iter = 100;
    std::string out;
    std::string report;
    std::string out_body;
};

void cmd_fuse(const FuseOptions& opt)
{
    const body::BodyModel model = body::load_body_model(opt.model_dir);
    const body::BodyParams params = io::body_params_from_json(io::load_json_file(opt.params));
    const core::Mesh face_mesh_raw = core::load_mesh(opt.face);
    const fuse::FaceRegionSpec spec = io::region_spec_from_json(io::load_json_file(opt.spec));

    body::PoseResult posed = body::pose_body(model, params);
    fuse::validate(spec, posed.mesh, face_mesh_raw);

    // Rigid alignment of the scan onto the body's face region.
    core::RigidTransform align;
    fuse::IcpResult icp;
    if (!spec.face_vertices.empty() && !face_mesh_raw.vertices.empty())
    {
        std::vector<int> region = spec.face_vertices;
        region.insert(region.end(), spec.seam_vertices.begin(), spec.seam_vertices.end());
        const core::Submesh target = core::extract_submesh(posed.mesh, region);
        icp = fuse::icp_align_detail(face_mesh_raw, target.mesh);
        align = icp.transform;
        log_debug("icp converged to mean distance " + format_double(icp.trace.back()) + " in " +
                  std::to_string(icp.iterations) + " iterations");
    }

    fuse::FusionResult fused = fuse::copy_paste_fuse(posed.mesh, face_mesh_raw, spec, align);
    const double seam_before =
        spec.seam_vertices.empty() ? 0.0 : fuse::seam_loss(fused, posed.mesh, spec);
    double seam_after = seam_before;
    body::BodyParams final_params = params;
    std::vector<double> opt_trace;

    if (opt.strategy == "opt")
    {
        const core::Mesh face_fixed = core::transformed(face_mesh_raw, align);
        const fuse::SeamOptimizationResult refined = fuse::optimize_seam(
            model, params, face_fixed, spec, opt.lambda_pose, opt.lambda_shape, opt.max_iter);
        final_params = refined.params;
        fused = refined.fused;
        seam_after = refined.fused.seam_loss;
        opt_trace = refined.trace;
        posed = body::pose_body(model, final_params);
        log_info("seam optimization: " + format_double(seam_before) + " -> " + format_double(seam_after));
    }
    else if (opt.strategy != "copy")
    {
        throw std::runtime_error("--strategy must be copy or opt");
    }
    fused.seam_loss = seam_after;

    // Bridge the two open rings left at the junction: the body's seam ring
    // and the pasted scan's boundary.
    if (!spec.seam_vertices.empty() && !spec.correspondence.empty())
    {
        const std::vector<core::BoundaryLoop> loops = core::boundary_loops(fused.mesh);
        const int body_probe = fused.body_to_fused[static_cast<std::size_t>(spec.seam_vertices.front())];
        const int face_probe =
            fused.face_to_fused[static_cast<std::size_t>(spec.correspondence.front().first)];
        const auto find_loop = [&loops](int vertex) -> const core::BoundaryLoop* {
            for (const auto& loop : loops)
            {
                if (std::find(loop.vertices.begin(), loop.vertices.end(), vertex) != loop.vertices.end())
                {
                    return &loop;
                }
            }
            return nullptr;
        };
        const core::BoundaryLoop* body_loop = find_loop(body_probe);
        const core::BoundaryLoop* face_loop = find_loop(face_probe);
        if (body_loop != nullptr && face_loop != nullptr && body_loop != face_loop)
        {
            fused = fuse::bridge_boundaries(fused, body_loop->vertices, face_loop->vertices);
            log_debug("bridged seam rings of " + std::to_string(body_loop->vertices.size()) + " and " +
                      std::to_string(face_loop->vertices.size()) + " vertices");
        }
    }

    fused = fuse::smooth_merged_normals(fused);
    if (!spec.neck_vertices.empty())
    {
        const core::Mesh body_with_normals = core::with_vertex_normals(posed.mesh, core::NormalWeighting::Angle);
        fused = fuse::transfer_neck_normals(fused, body_with_normals, spec.neck_vertices);
    }

    core::save_mesh(fused.mesh, opt.out);
    if (!opt.out_body.empty())
    {
        core::save_mesh(posed.mesh, opt.out_body);
    }

    int body_count = 0, face_count = 0, bridge_count = 0;
    for (const auto tag : fused.provenance)
    {
        switch (tag)
        {
        case fuse::Provenance::Body: ++body_count; break;
        case fuse::Provenance::Face: ++face_count; break;
        case fuse::Provenance::Bridge: ++bridge_count; break;
        }
    }
    io::json report{
        { "strategy", opt.strategy },
        { "seam_loss_before", seam_before },
        { "seam_loss_after", seam_after },
        { "vertex_counts",
          io::json{ { "body", body_count },
                    { "face", face_count },
                    { "bridge", bridge_count },
                    { "total", static_cast<int>(fused.mesh.vertices.size()) } } },
        { "boundary_loops_after", static_cast<int>(core::boundary_loops(fused.mesh).size()) },
        { "icp", io::json{ { "iterations", icp.iterations },
                           { "final_mean_distance", icp.trace.empty() ? 0.0 : icp.trace.back() } } },
        { "trace", opt_trace.empty() ? io::json::array({ seam_before }) : io::json(opt_trace) },
    };
    io::save_json_file(opt.report, report);
    log_info("wrote fused mesh to " + opt.out);
}

// ----------------------------------------------------------------- eval ----

struct EvalOptions
{
    std::string pred;
    std::string gt;
    std::string metrics = "v2v,pa-v2v,mpjpe,pa-mpjpe,p2p,df";
    std::string crop_center;
    double crop_radius = 0.0;
    bool prealign = false;
    std::string out;
    std::string table;
    std::string csv;
};

void cmd_eval(const EvalOptions& opt)
{
    std::vector<std::string> requested;
    {
        std::stringstream stream(opt.metrics);
        std::string token;
        while (std::getline(stream, token, ','))
        {
            requested.push_back(token);
        }
    }
    const std::set<std::string> known = { "v2v", "pa-v2v", "mpjpe", "pa-mpjpe", "p2p", "df" };
    for (const auto& name : requested)
    {
        if (known.count(name) == 0)
        {
            throw std::runtime_error("--metrics: unknown metric '" + name + "'");
        }
    }

    std::optional<metrics::CropSpec> crop;
    if (!opt.crop_center.empty() || opt.crop_radius > 0.0)
    {
        if (opt.crop_center.empty() || opt.crop_radius <= 0.0)
        {
            throw std::runtime_error("--crop-center and a positive --crop-radius must be given together");
        }
        const std::vector<double> center = parse_csv_numbers(opt.crop_center, 3, "--crop-center");
        crop = metrics::CropSpec{ core::Vec3(center[0], center[1], center[2]), opt.crop_radius };
    }

    // Pair pred/gt files by name: mesh pairs feed the surface metrics,
    // JSON pairs the joint metrics. Unpaired files are skipped with a
    // warning; pairing order is lexicographic for determinism.
    std::vector<std::pair<std::string, fs::path>> mesh_pairs; // sample name -> pred path
    std::vector<std::pair<std::string, fs::path>> joint_pairs;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(opt.pred))
    {
        if (entry.is_regular_file())
        {
            names.push_back(entry.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    for (const auto& name : names)
    {
        const fs::path pred_path = fs::path(opt.pred) / name;
        const fs::path gt_path = fs::path(opt.gt) / name;
        const std::string ext = pred_path.extension().string();
        const bool is_mesh = ext == ".obj" || ext == ".ply";
        const bool is_json = ext == ".json";
        if (!is_mesh && !is_json)
        {
            continue;
        }
        if (!fs::exists(gt_path))
        {
            std::cerr << "morphfuse: warning: no ground truth for " << name << ", skipped\n";
            continue;
        }
        const std::string sample = pred_path.stem().string();
        if (is_mesh)
        {
            mesh_pairs.emplace_back(sample, pred_path);
        }
        else
        {
            joint_pairs.emplace_back(sample, pred_path);
        }
    }
    if (mesh_pairs.empty() && joint_pairs.empty())
    {
        throw std::runtime_error("no matched pred/gt pairs under " + opt.pred + " and " + opt.gt);
    }

    std::vector<metrics::MetricReport> reports;
    for (const auto& name : requested)
    {
        std::vector<std::pair<std::string, double>> per_sample;
        std::string alignment = "none";
        if (name == "mpjpe" || name == "pa-mpjpe")
        {
            for (const auto& [sample, pred_path] : joint_pairs)
            {
                const auto pred_joints = io::joints_from_json(io::load_json_file(pred_path.string()));
                const auto gt_joints = io::joints_from_json(
                    io::load_json_file((fs::path(opt.gt) / pred_path.filename()).string()));
                const double value = name == "mpjpe" ? metrics::mpjpe(pred_joints, gt_joints)
                                                     : metrics::pa_mpjpe(pred_joints, gt_joints);
                per_sample.emplace_back(sample, value);
            }
            alignment = name == "mpjpe" ? "none" : "procrustes";
        }
        else
        {
            for (const auto& [sample, pred_path] : mesh_pairs)
            {
                const core::Mesh pred_mesh = core::load_mesh(pred_path);
                const core::Mesh gt_mesh = core::load_mesh(fs::path(opt.gt) / pred_path.filename());
                double value = 0.0;
                if (name == "v2v")
                {
                    value = metrics::v2v(pred_mesh, gt_mesh);
                }
                else if (name == "pa-v2v")
                {
                    value = metrics::pa_v2v(pred_mesh, gt_mesh);
                }
                else if (name == "p2p")
                {
                    value = metrics::point_to_plane(pred_mesh, gt_mesh, crop, opt.prealign).mean;
                }
                else
                {
                    value = metrics::df_discrepancy(pred_mesh, gt_mesh,
                                                    metrics::make_default_grid(pred_mesh, gt_mesh));
                }
                per_sample.emplace_back(sample, value);
            }
            if (name == "pa-v2v")
            {
                alignment = "procrustes";
            }
            else if (name == "p2p" && opt.prealign)
            {
                alignment = "icp";
            }
        }
        if (per_sample.empty())
        {
            std::cerr << "morphfuse: warning: no applicable pairs for metric " << name << ", omitted\n";
            continue;
        }
        reports.push_back(metrics::make_report(name, std::move(per_sample), "model units", alignment,
                                               name == "p2p" ? crop : std::nullopt));
    }
    if (reports.empty())
    {
        throw std::runtime_error("no requested metric had applicable input pairs");
    }

    io::save_json_file(opt.out, io::reports_to_json(reports));

    // The aligned table mixes sample sets only when they agree; otherwise
    // print one table per sample-set shape.
    std::map<std::size_t, std::vector<metrics::MetricReport>> grouped;
    for (const auto& report : reports)
    {
        grouped[report.per_sample.size()].push_back(report);
    }
    std::string table_text;
    for (const auto& [size, group] : grouped)
    {
        table_text += metrics::format_table(group);
    }
    std::cout << table_text;
    if (!opt.table.empty())
    {
        write_text_file(opt.table, table_text);
    }
    if (!opt.csv.empty())
    {
        std::string csv_text;
        for (const auto& [size, group] : grouped)
        {
            csv_text += metrics::format_csv(group);
        }
        write_text_file(opt.csv, csv_text);
    }
}

// ----------------------------------------------------------------- info ----

struct InfoOptions
{
    std::string model_dir;
    std::string mesh;
};

void print_mesh_summary(const std::string& label, const core::Mesh& mesh)
{
    std::cout << label << ": " << mesh.vertices.size() << " vertices, " << mesh.faces.size() << " faces";
    if (mesh.has_colors())
    {
        std::cout << ", colored";
    }
    if (mesh.has_normals())
    {
        std::cout << ", with normals";
    }
    std::cout << '\n';
    if (!mesh.vertices.empty())
    {
        core::Vec3 lo = mesh.vertices.front();
        core::Vec3 hi = lo;
        for (const auto& p : mesh.vertices)
        {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        std::cout << "  bbox min " << lo.transpose() << "\n  bbox max " << hi.transpose() << '\n';
    }
}

void cmd_info(const InfoOptions& opt)
{
    if (!opt.mesh.empty())
    {
        print_mesh_summary(opt.mesh, core::load_mesh(opt.mesh));
        return;
    }
    if (opt.model_dir.empty())
    {
        throw std::runtime_error("info: pass --model-dir or --mesh");
    }
    if (fs::exists(fs::path(opt.model_dir) / "tree.json"))
    {
        const body::BodyModel model = body::load_body_model(opt.model_dir);
        std::cout << "body model: " << model.vertex_count() << " vertices, " << model.joint_count()
                  << " joints, " << model.shape_count() << " shape directions\n";
        std::cout << "  parents:";
        for (const int p : model.parents)
        {
            std::cout << ' ' << p;
        }
        std::cout << '\n';
        print_mesh_summary("  template", model.template_mesh);
    }
    else
    {
        const face::MorphableFaceModel model = face::load_face_model(opt.model_dir);
        std::cout << "face model: " << model.vertex_count() << " vertices, " << model.identity_count()
                  << " identity / " << model.expression_count() << " expression / " << model.texture_count()
                  << " texture directions\n";
        print_mesh_summary("  template", model.template_shape);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{ "morphfuse: face and body mesh reconstruction and fusion toolkit" };
    app.require_subcommand(1);

    SynthOptions synth_opt;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate deterministic toy models and scenes");
    synth_cmd->add_option("--kind", synth_opt.kind, "What to generate: face, body, or scene")
        ->required()
        ->check(CLI::IsMember({ "face", "body", "scene" }));
    synth_cmd->add_option("--seed", synth_opt.seed, "Seed for all randomness")->required();
    synth_cmd->add_option("--out", synth_opt.out, "Output directory")->required();
    synth_cmd->add_option("--n-id", synth_opt.n_identity, "Identity basis size (face kind)");
    synth_cmd->add_option("--n-exp", synth_opt.n_expression, "Expression basis size (face kind)");
    synth_cmd->add_option("--n-tex", synth_opt.n_texture, "Texture basis size (face kind)");
    synth_cmd->add_option("--n-beta", synth_opt.n_beta, "Shape basis size (body kind)");

    FaceOptions face_opt;
    CLI::App* face_cmd = app.add_subcommand("face", "Evaluate a face model to a mesh");
    face_cmd->add_option("--model-dir", face_opt.model_dir, "Face model directory")->required();
    face_cmd->add_option("--coeffs", face_opt.coeffs, "Coefficients JSON file")->required();
    face_cmd->add_option("--dmap", face_opt.dmap, "Per-vertex displacement map JSON file");
    face_cmd->add_option("--line-mask", face_opt.line_mask, "Contour mask PGM for the refinement field");
    face_cmd->add_option("--inside-mask", face_opt.inside_mask, "Inside-region mask PGM (signs the field)");
    face_cmd->add_option("--sdf-spacing", face_opt.sdf_spacing, "Grid spacing of the refinement field");
    face_cmd->add_option("--sdf-origin", face_opt.sdf_origin, "Grid origin of the field as x,y");
    face_cmd->add_option("--lambda", face_opt.lambda, "Refinement step size");
    face_cmd->add_option("--plane", face_opt.plane, "Projection plane: xy, xz, or yz");
    face_cmd->add_option("--iterations", face_opt.iterations, "Refinement iterations");
    face_cmd->add_option("--out", face_opt.out, "Output mesh path (.obj or .ply)")->required();

    FitOptions fit_opt;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit body parameters to 2D keypoints");
    fit_cmd->add_option("--model-dir", fit_opt.model_dir, "Body model directory")->required();
    fit_cmd->add_option("--keypoints", fit_opt.keypoints, "Keypoints JSON file")->required();
    fit_cmd->add_option("--config", fit_opt.config, "Fit configuration JSON file")->required();
    fit_cmd->add_option("--cache", fit_opt.cache, "Best-fit cache JSON file to read and update");
    fit_cmd->add_option("--sample-id", fit_opt.sample_id,
                        "Cache key (default: keypoints file name without extension)");
    fit_cmd->add_option("--out", fit_opt.out, "Output parameters JSON path")->required();
    fit_cmd->add_option("--trace", fit_opt.trace, "Trace CSV path (default: <out>.trace.csv)");
    fit_cmd->add_option("--out-joints", fit_opt.out_joints, "Also write posed 3D joints JSON here");
    CLI::Option* fit_lp = fit_cmd->add_option("--lambda-pose", fit_opt.lambda_pose,
                                              "Pose prior weight (overrides the config)");
    CLI::Option* fit_ls = fit_cmd->add_option("--lambda-shape", fit_opt.lambda_shape,
                                              "Shape prior weight (overrides the config)");

    FuseOptions fuse_opt;
    CLI::App* fuse_cmd = app.add_subcommand("fuse", "Paste a face scan onto a posed body");
    fuse_cmd->add_option("--model-dir", fuse_opt.model_dir, "Body model directory")->required();
    fuse_cmd->add_option("--params", fuse_opt.params, "Body parameters JSON file")->required();
    fuse_cmd->add_option("--face", fuse_opt.face, "Face scan mesh (.obj or .ply)")->required();
    fuse_cmd->add_option("--spec", fuse_opt.spec, "Face region spec JSON file")->required();
    fuse_cmd->add_option("--strategy", fuse_opt.strategy, "copy pastes as-is; opt refines the seam")
        ->check(CLI::IsMember({ "copy", "opt" }));
    fuse_cmd->add_option("--lambda-pose", fuse_opt.lambda_pose, "Pose prior weight for seam optimization");
    fuse_cmd->add_option("--lambda-shape", fuse_opt.lambda_shape, "Shape prior weight for seam optimization");
    fuse_cmd->add_option("--max-iter", fuse_opt.max_iter, "Seam optimization iteration cap");
    fuse_cmd->add_option("--out", fuse_opt.out, "Output fused mesh path")->required();
    fuse_cmd->add_option("--report", fuse_opt.report, "Output report JSON path")->required();
    fuse_cmd->add_option("--out-body", fuse_opt.out_body, "Also write the posed body mesh here");

    EvalOptions eval_opt;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
    eval_cmd->add_option("--pred", eval_opt.pred, "Directory of predicted meshes/joints")->required();
    eval_cmd->add_option("--gt", eval_opt.gt, "Directory of ground-truth meshes/joints")->required();
    eval_cmd->add_option("--metrics", eval_opt.metrics,
                         "Comma-separated list from: v2v,pa-v2v,mpjpe,pa-mpjpe,p2p,df");
    eval_cmd->add_option("--crop-center", eval_opt.crop_center, "Crop ball center as x,y,z (p2p only)");
    eval_cmd->add_option("--crop-radius", eval_opt.crop_radius, "Crop ball radius (p2p only)");
    eval_cmd->add_flag("--prealign", eval_opt.prealign, "Register pred to gt by ICP before p2p");
    eval_cmd->add_option("--out", eval_opt.out, "Output report JSON path")->required();
    eval_cmd->add_option("--table", eval_opt.table, "Also write the text table here");
    eval_cmd->add_option("--csv", eval_opt.csv, "Also write per-sample values as CSV here");

    InfoOptions info_opt;
    CLI::App* info_cmd = app.add_subcommand("info", "Describe a model directory or mesh file");
    info_cmd->add_option("--model-dir", info_opt.model_dir, "Model directory (face or body, autodetected)");
    info_cmd->add_option("--mesh", info_opt.mesh, "Mesh file (.obj or .ply)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*synth_cmd)
        {
            cmd_synth(synth_opt);
        }
        else if (*face_cmd)
        {
            cmd_face(face_opt);
        }
        else if (*fit_cmd)
        {
            fit_opt.lambda_pose_set = fit_lp->count() > 0;
            fit_opt.lambda_shape_set = fit_ls->count() > 0;
            cmd_fit(fit_opt);
        }
        else if (*fuse_cmd)
        {
            cmd_fuse(fuse_opt);
        }
        else if (*eval_cmd)
        {
            cmd_eval(eval_opt);
        }
        else if (*info_cmd)
        {
            cmd_info(info_opt);
        }
    }
    catch (const std::exception& e)
    {
        log_error(e.what());
        return 1;
    }
    return 0;
}
