/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: tests/acceptance.cpp
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
 *
 * Release acceptance suite. Each test covers one release criterion with
 * pinned tolerances and a wall-clock budget, and prints exactly one
 * machine-greppable PASS/FAIL line.
 */
#include "morphfuse/body/camera.hpp"
#include "morphfuse/body/deform.hpp"
#include "morphfuse/body/rotation.hpp"
#include "morphfuse/core/mesh_io.hpp"
#include "morphfuse/core/topology.hpp"
#include "morphfuse/face/model.hpp"
#include "morphfuse/face/sdf.hpp"
#include "morphfuse/fit/fitter.hpp"
#include "morphfuse/fuse/bridge.hpp"
#include "morphfuse/fuse/icp.hpp"
#include "morphfuse/io/json_io.hpp"
#include "morphfuse/metrics/metrics.hpp"
#include "morphfuse/synth/rng.hpp"
#include "morphfuse/synth/scene.hpp"
#include "morphfuse/synth/toy_models.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace morphfuse;
namespace fs = std::filesystem;

namespace {

class Stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(const char* id, double seconds, const char* description)
{
    const bool ok = !::testing::Test::HasFailure();
    std::printf("[%s] %s - %s (%.2f s)\n", id, ok ? "PASS" : "FAIL", description, seconds);
    std::fflush(stdout);
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "morphfuse_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string cli_path()
{
#ifdef MORPHFUSE_CLI_PATH
    return MORPHFUSE_CLI_PATH;
#else
    const char* env = std::getenv("MORPHFUSE_CLI_PATH");
    return env == nullptr ? std::string() : std::string(env);
#endif
}

int run_cli(const std::string& args)
{
    const std::string command = cli_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

body::BodyParams random_body_params(synth::SeededRng& rng, const body::BodyModel& model)
{
    body::BodyParams params;
    params.beta = Eigen::VectorXd(model.shape_count());
    for (Eigen::Index i = 0; i < params.beta.size(); ++i)
    {
        params.beta[i] = rng.uniform(-0.1, 0.1);
    }
    params.theta = Eigen::VectorXd(3 * model.joint_count());
    for (Eigen::Index i = 0; i < params.theta.size(); ++i)
    {
        params.theta[i] = rng.uniform(-0.2, 0.2);
    }
    params.camera.scale = rng.uniform(0.9, 1.5);
    params.camera.translation = core::Vec2(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
    return params;
}

std::vector<core::Vec3> random_cloud(synth::SeededRng& rng, int n)
{
    std::vector<core::Vec3> cloud;
    for (int i = 0; i < n; ++i)
    {
        cloud.push_back(rng.vec3(-1.0, 1.0));
    }
    return cloud;
}

double squared_residual(const std::vector<core::Vec3>& a, const std::vector<core::Vec3>& b)
{
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        total += (a[i] - b[i]).squaredNorm();
    }
    return total;
}

/// Two-joint chain whose posed positions are simple enough to write down.
body::BodyModel two_link_chain()
{
    body::BodyModel model;
    model.template_mesh.vertices = { core::Vec3(0, 0, 0), core::Vec3(1, 0, 0), core::Vec3(2, 0, 0),
                                     core::Vec3(0, 1, 0) };
    model.template_mesh.faces = { { 0, 1, 3 }, { 1, 2, 3 } };
    model.parents = { -1, 0 };
    model.shape_basis = Eigen::MatrixXd::Zero(12, 1);
    model.shape_basis(10, 0) = 1.0;
    model.pose_basis = Eigen::MatrixXd::Zero(12, 18);
    model.joint_regressor = Eigen::MatrixXd::Zero(2, 4);
    model.joint_regressor(0, 0) = 1.0; // joint 0 at vertex 0
    model.joint_regressor(1, 1) = 1.0; // joint 1 at vertex 1
    model.skinning_weights = Eigen::MatrixXd::Zero(4, 2);
    model.skinning_weights(0, 0) = 1.0;
    model.skinning_weights(1, 1) = 1.0;
    model.skinning_weights(2, 1) = 1.0;
    model.skinning_weights(3, 0) = 1.0;
    body::validate(model);
    return model;
}

fuse::FusionResult as_fusion_result(core::Mesh mesh)
{
    fuse::FusionResult result;
    result.provenance.assign(mesh.vertices.size(), fuse::Provenance::Body);
    result.body_to_fused.resize(mesh.vertices.size());
    std::iota(result.body_to_fused.begin(), result.body_to_fused.end(), 0);
    result.mesh = std::move(mesh);
    return result;
}

} // namespace

TEST(Acceptance, C01_BlendshapeLinearity)
{
    const Stopwatch clock;
    synth::SeededRng rng(1001);
    const face::MorphableFaceModel model = synth::make_toy_face_model(rng);

    face::FaceCoefficients zero;
    zero.identity = Eigen::VectorXd::Zero(model.identity_count());
    zero.expression = Eigen::VectorXd::Zero(model.expression_count());
    zero.texture = Eigen::VectorXd::Zero(model.texture_count());
    const core::Mesh base = face::evaluate_3dmm(model, zero);

    const auto draw = [&rng](Eigen::Index n, double radius) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            v[i] = rng.uniform(-radius, radius);
        }
        return v;
    };

    double worst = 0.0;
    for (int pair = 0; pair < 1000; ++pair)
    {
        face::FaceCoefficients c1, c2, sum;
        c1.identity = draw(model.identity_count(), 0.5);
        c1.expression = draw(model.expression_count(), 0.4);
        c1.texture = draw(model.texture_count(), 0.2);
        c2.identity = draw(model.identity_count(), 0.5);
        c2.expression = draw(model.expression_count(), 0.4);
        c2.texture = draw(model.texture_count(), 0.2);
        sum.identity = c1.identity + c2.identity;
        sum.expression = c1.expression + c2.expression;
        sum.texture = c1.texture + c2.texture;

        const core::Mesh m1 = face::evaluate_3dmm(model, c1);
        const core::Mesh m2 = face::evaluate_3dmm(model, c2);
        const core::Mesh ms = face::evaluate_3dmm(model, sum);
        for (std::size_t i = 0; i < base.vertices.size(); ++i)
        {
            const core::Vec3 super = m1.vertices[i] + m2.vertices[i] - base.vertices[i];
            worst = std::max(worst, (super - ms.vertices[i]).cwiseAbs().maxCoeff());
            const core::Vec3 color_super = m1.colors[i] + m2.colors[i] - base.colors[i];
            worst = std::max(worst, (color_super - ms.colors[i]).cwiseAbs().maxCoeff());
        }
    }
    EXPECT_LT(worst, 1e-9);

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 5.0);
    report("C01", elapsed, "blendshape linearity: 1000 random coefficient pairs superpose within 1e-9");
}

TEST(Acceptance, C02_LbsIdentityAndBruteForce)
{
    const Stopwatch clock;
    synth::SeededRng rng(1002);
    const body::BodyModel model = synth::make_toy_body_model(rng);
    const int k = model.joint_count();
    const auto v = static_cast<Eigen::Index>(model.vertex_count());

    // theta = 0 reproduces the shaped mesh bit for bit.
    for (int trial = 0; trial < 5; ++trial)
    {
        body::BodyParams params;
        params.beta = Eigen::VectorXd(model.shape_count());
        for (Eigen::Index i = 0; i < params.beta.size(); ++i)
        {
            params.beta[i] = rng.uniform(-0.3, 0.3);
        }
        params.theta = Eigen::VectorXd::Zero(3 * k);
        const core::Mesh shaped = body::shape_mesh(model, params.beta);
        const body::PoseResult posed = body::pose_body(model, params);
        ASSERT_EQ(posed.mesh.vertices.size(), shaped.vertices.size());
        for (std::size_t i = 0; i < shaped.vertices.size(); ++i)
        {
            EXPECT_EQ(posed.mesh.vertices[i], shaped.vertices[i]);
        }
    }

    // 100 random transform/weight fixtures against the brute-force oracle.
    double worst = 0.0;
    for (int fixture = 0; fixture < 100; ++fixture)
    {
        body::BodyModel variant = model;
        for (Eigen::Index i = 0; i < v; ++i)
        {
            Eigen::VectorXd row(k);
            for (int j = 0; j < k; ++j)
            {
                row[j] = rng.uniform(0.01, 1.0);
            }
            row /= row.sum();
            variant.skinning_weights.row(i) = row.transpose();
        }
        std::vector<core::RigidTransform> transforms(static_cast<std::size_t>(k));
        std::vector<core::Mat3> rotations(static_cast<std::size_t>(k));
        std::vector<core::Vec3> translations(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j)
        {
            rotations[static_cast<std::size_t>(j)] = rng.rotation();
            translations[static_cast<std::size_t>(j)] = rng.vec3(-0.5, 0.5);
            transforms[static_cast<std::size_t>(j)].rotation = rotations[static_cast<std::size_t>(j)];
            transforms[static_cast<std::size_t>(j)].translation = translations[static_cast<std::size_t>(j)];
        }
        const core::Mesh skinned = body::skin(variant, transforms, variant.template_mesh);
        for (Eigen::Index i = 0; i < v; ++i)
        {
            const core::Vec3 expected =
                oracles::brute_lbs(variant.template_mesh.vertices[static_cast<std::size_t>(i)],
                                   variant.skinning_weights.row(i).transpose(), rotations, translations);
            worst = std::max(worst,
                             (skinned.vertices[static_cast<std::size_t>(i)] - expected).cwiseAbs().maxCoeff());
        }
    }
    EXPECT_LT(worst, 1e-12);

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 5.0);
    report("C02", elapsed, "LBS: exact at rest, 100 random fixtures match brute force within 1e-12");
}

TEST(Acceptance, C03_ForwardKinematics)
{
    const Stopwatch clock;
    synth::SeededRng rng(1003);
    const body::BodyModel model = synth::make_toy_body_model(rng);

    // Global rotation: posing only the root spins everything about the
    // root joint, v -> R (v - j0) + j0.
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial)
    {
        body::BodyParams params;
        params.beta = Eigen::VectorXd::Zero(model.shape_count());
        params.theta = Eigen::VectorXd::Zero(3 * model.joint_count());
        const core::Vec3 axis_angle = rng.vec3(-1.2, 1.2);
        params.theta.head(3) = axis_angle;

        const core::Mesh shaped = body::shape_mesh(model, params.beta);
        const std::vector<core::Vec3> rest_joints = body::regress_joints(model, shaped);
        const core::Mat3 r = body::rodrigues(axis_angle);
        const core::Vec3 j0 = rest_joints[0];

        const body::PoseResult posed = body::pose_body(model, params);
        for (std::size_t i = 0; i < shaped.vertices.size(); ++i)
        {
            const core::Vec3 expected = r * (shaped.vertices[i] - j0) + j0;
            worst = std::max(worst, (posed.mesh.vertices[i] - expected).norm());
        }
        for (std::size_t jj = 0; jj < rest_joints.size(); ++jj)
        {
            const core::Vec3 expected = r * (rest_joints[jj] - j0) + j0;
            worst = std::max(worst, (posed.joints[jj] - expected).norm());
        }
    }
    EXPECT_LT(worst, 1e-9);

    // Two-link chain with hand-computed posed positions.
    const body::BodyModel chain = two_link_chain();
    body::BodyParams params;
    params.beta = Eigen::VectorXd::Zero(1);
    params.theta = Eigen::VectorXd::Zero(6);

    params.theta[5] = std::numbers::pi / 2.0; // child joint, z axis
    body::PoseResult posed = body::pose_body(chain, params);
    EXPECT_LT((posed.mesh.vertices[0] - core::Vec3(0, 0, 0)).norm(), 1e-9);
    EXPECT_LT((posed.mesh.vertices[1] - core::Vec3(1, 0, 0)).norm(), 1e-9);
    EXPECT_LT((posed.mesh.vertices[2] - core::Vec3(1, 1, 0)).norm(), 1e-9);
    EXPECT_LT((posed.mesh.vertices[3] - core::Vec3(0, 1, 0)).norm(), 1e-9);
    EXPECT_LT((posed.joints[1] - core::Vec3(1, 0, 0)).norm(), 1e-9);

    params.theta[2] = std::numbers::pi / 2.0; // root joint too
    posed = body::pose_body(chain, params);
    EXPECT_LT((posed.joints[1] - core::Vec3(0, 1, 0)).norm(), 1e-9);
    EXPECT_LT((posed.mesh.vertices[1] - core::Vec3(0, 1, 0)).norm(), 1e-9);
    EXPECT_LT((posed.mesh.vertices[2] - core::Vec3(-1, 1, 0)).norm(), 1e-9);
    EXPECT_LT((posed.mesh.vertices[3] - core::Vec3(-1, 0, 0)).norm(), 1e-9);

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 1.0);
    report("C03", elapsed, "forward kinematics: global rotation and two-link chain within 1e-9");
}

TEST(Acceptance, C04_FitRecovery)
{
    const Stopwatch clock;
    synth::SeededRng rng(1004);
    const body::BodyModel model = synth::make_toy_body_model(rng);

    int recovered = 0;
    for (int trial = 0; trial < 20; ++trial)
    {
        const body::BodyParams truth = random_body_params(rng, model);
        const body::PoseResult posed = body::pose_body(model, truth);
        body::Keypoints2D keypoints;
        keypoints.points = body::project(posed.joints, truth.camera);
        keypoints.visibility.assign(posed.joints.size(), 1);

        fit::FitConfig config;
        config.max_iterations = 500;
        config.init = truth;
        for (Eigen::Index i = 0; i < config.init.beta.size(); ++i)
        {
            config.init.beta[i] += rng.uniform(-0.05, 0.05);
        }
        for (Eigen::Index i = 0; i < config.init.theta.size(); ++i)
        {
            config.init.theta[i] += rng.uniform(-0.05, 0.05);
        }
        config.init.camera.scale += rng.uniform(-0.05, 0.05);
        config.init.camera.translation += core::Vec2(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));

        const fit::FitResult result = fit::fit_body(model, keypoints, config);
        if (result.final_loss < 1e-3)
        {
            ++recovered;
        }
        else
        {
            ADD_FAILURE() << "trial " << trial << " stalled at loss " << result.final_loss;
        }
    }
    EXPECT_EQ(recovered, 20);

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 60.0);
    report("C04", elapsed, "fit recovery: 20/20 perturbed-init trials reach loss < 1e-3 within 500 iters");
}

TEST(Acceptance, C05_GradientCheck)
{
    const Stopwatch clock;
    synth::SeededRng rng(1005);
    const body::BodyModel model = synth::make_toy_body_model(rng);
    const fit::ParamLayout layout = fit::ParamLayout::of(model);

    double worst = 0.0;
    for (int point = 0; point < 50; ++point)
    {
        const body::BodyParams at = random_body_params(rng, model);
        const body::BodyParams other = random_body_params(rng, model);
        body::Keypoints2D targets;
        targets.points = body::project(body::pose_body(model, other).joints, other.camera);
        targets.visibility.assign(targets.points.size(), 1);

        const Eigen::VectorXd x = fit::pack_params(at);
        const auto objective = [&](const Eigen::VectorXd& q) {
            return fit::fit_objective(model, targets, fit::unpack_params(q, layout), 0.0, 0.0);
        };
        const Eigen::VectorXd fd = oracles::central_difference(objective, x, 1e-5);
        const Eigen::VectorXd analytic =
            fit::fit_gradient(model, targets, at, 0.0, 0.0);

        ASSERT_GT(fd.norm(), 1e-3) << "degenerate sample " << point;
        worst = std::max(worst, (analytic - fd).norm() / fd.norm());
    }
    EXPECT_LT(worst, 1e-3);

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 30.0);
    report("C05", elapsed, "gradient check: analytic vs central differences, rel error < 1e-3 at 50 points");
}

TEST(Acceptance, C06_IcpRecovery)
{
    const Stopwatch clock;
    synth::SeededRng rng(1006);
    const core::Mesh head = synth::make_toy_face_model(rng).template_shape;

    double worst_rot = 0.0;
    double worst_trans = 0.0;
    double worst_scale = 0.0;
    for (int trial = 0; trial < 100; ++trial)
    {
        core::RigidTransform truth;
        truth.rotation = rng.rotation();
        truth.translation = rng.vec3(-2.0, 2.0);
        truth.scale = rng.uniform(0.5, 2.0);

        core::Mesh target = head;
        for (auto& p : target.vertices)
        {
            p = truth.apply(p);
        }
        const fuse::IcpResult result = fuse::icp_align_detail(head, target);
        worst_rot = std::max(worst_rot, (result.transform.rotation - truth.rotation).norm());
        worst_trans = std::max(worst_trans, (result.transform.translation - truth.translation).norm());
        worst_scale = std::max(worst_scale, std::abs(result.transform.scale - truth.scale));
    }
    EXPECT_LT(worst_rot, 1e-6);
    EXPECT_LT(worst_trans, 1e-6);
    EXPECT_LT(worst_scale, 1e-9);

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 30.0);
    report("C06", elapsed, "icp recovery: 100 similarity transforms within 1e-6 rot/trans and 1e-9 scale");
}

TEST(Acceptance, C07_EdtExactness)
{
    const Stopwatch clock;
    synth::SeededRng rng(1007);

    for (int grid_index = 0; grid_index < 200; ++grid_index)
    {
        const int rows = 1 + static_cast<int>(rng.index(64));
        const int cols = 1 + static_cast<int>(rng.index(64));
        face::BinaryGrid line(rows, cols);
        face::BinaryGrid inside(rows, cols);
        for (int r = 0; r < rows; ++r)
        {
            for (int c = 0; c < cols; ++c)
            {
                line.cells[static_cast<std::size_t>(r) * cols + c] = rng.uniform() < 0.07 ? 1 : 0;
                inside.cells[static_cast<std::size_t>(r) * cols + c] = rng.uniform() < 0.5 ? 1 : 0;
            }
        }
        // At least one set cell, placed at a random position.
        line.cells[rng.index(line.cells.size())] = 1;
        const double spacing = rng.uniform(0.05, 2.0);

        const face::ScalarField2D field = face::edt_sdf(line, spacing, inside, core::Vec2(0, 0));
        const std::vector<std::int64_t> d2 = oracles::brute_edt_squared(line);
        for (int r = 0; r < rows; ++r)
        {
            for (int c = 0; c < cols; ++c)
            {
                const double dist =
                    spacing * std::sqrt(static_cast<double>(d2[static_cast<std::size_t>(r) * cols + c]));
                const double expected = inside.at(r, c) ? -dist : dist;
                ASSERT_EQ(field.grid(r, c), expected)
                    << "grid " << grid_index << " cell (" << r << "," << c << ")";
            }
        }
    }

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 60.0);
    report("C07", elapsed, "edt exactness: bit-exact against brute force on 200 grids up to 64x64");
}

TEST(Acceptance, C08_FusionDescent)
{
    const Stopwatch clock;
    ASSERT_FALSE(cli_path().empty()) << "MORPHFUSE_CLI_PATH not set";
    const fs::path dir = fresh_dir("c08");
    const std::string scene = (dir / "scene").string();
    ASSERT_EQ(run_cli("synth --kind scene --seed 42 --out " + scene), 0);

    const std::string base = "fuse --model-dir " + scene + "/body_model --params " + scene +
                             "/gt/params.json --face " + scene + "/face.obj --spec " + scene + "/spec.json";
    ASSERT_EQ(run_cli(base + " --strategy copy --out " + (dir / "copy.obj").string() + " --report " +
                      (dir / "copy.json").string()),
              0);
    ASSERT_EQ(run_cli(base + " --strategy opt --lambda-pose 0 --lambda-shape 0 --out " +
                      (dir / "opt.obj").string() + " --report " + (dir / "opt.json").string()),
              0);

    const io::json copy_report = io::load_json_file((dir / "copy.json").string());
    const io::json opt_report = io::load_json_file((dir / "opt.json").string());
    const double copy_loss = copy_report.at("seam_loss_after").get<double>();
    const double opt_loss = opt_report.at("seam_loss_after").get<double>();
    EXPECT_GT(copy_loss, 0.0);
    EXPECT_LE(opt_loss, 0.5 * copy_loss);

    const auto& trace = opt_report.at("trace");
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i)
    {
        EXPECT_LE(trace[i].get<double>(), trace[i - 1].get<double>());
    }

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 60.0);
    report("C08", elapsed, "fusion descent: opt strategy halves the copy seam loss, non-increasing trace");
}

TEST(Acceptance, C09_WatertightBridging)
{
    const Stopwatch clock;

    // Two parallel congruent triangles; the bridge becomes the prism side.
    core::Mesh prism;
    prism.vertices = { core::Vec3(1, 0, 0),    core::Vec3(-0.5, 0.9, 0),   core::Vec3(-0.5, -0.9, 0),
                       core::Vec3(1, 0, 1.2),  core::Vec3(-0.5, 0.9, 1.2), core::Vec3(-0.5, -0.9, 1.2) };
    prism.faces = { { 0, 2, 1 }, { 3, 4, 5 } };
    const std::vector<std::array<int, 3>> original_faces = prism.faces;

    const auto loops = core::boundary_loops(prism);
    ASSERT_EQ(loops.size(), 2u);
    const fuse::FusionResult bridged =
        fuse::bridge_boundaries(as_fusion_result(prism), loops[0].vertices, loops[1].vertices);

    // Watertight across the junction: no boundary loop survives anywhere.
    EXPECT_TRUE(core::boundary_loops(bridged.mesh).empty());
    for (const auto& [edge, count] : core::edge_face_counts(bridged.mesh))
    {
        EXPECT_EQ(count, 2);
    }

    // Every pre-existing face is still present, in its original slot.
    ASSERT_GE(bridged.mesh.faces.size(), original_faces.size());
    for (std::size_t i = 0; i < original_faces.size(); ++i)
    {
        EXPECT_EQ(bridged.mesh.faces[i], original_faces[i]);
    }

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 1.0);
    report("C09", elapsed, "watertight bridging: prism junction closed, no pre-existing face removed");
}

TEST(Acceptance, C10_MetricLaws)
{
    const Stopwatch clock;
    synth::SeededRng rng(1010);
    const core::Mesh head = synth::make_toy_face_model(rng).template_shape;
    const std::vector<core::Vec3> joints = random_cloud(rng, 12);

    // Exactly zero on identical inputs, for every metric.
    EXPECT_EQ(metrics::v2v(head, head), 0.0);
    EXPECT_EQ(metrics::pa_v2v(head, head), 0.0);
    EXPECT_EQ(metrics::mpjpe(joints, joints), 0.0);
    EXPECT_EQ(metrics::pa_mpjpe(joints, joints), 0.0);
    EXPECT_EQ(metrics::point_to_plane(head, head).mean, 0.0);
    EXPECT_EQ(metrics::df_discrepancy(head, head, metrics::make_default_grid(head, head, 16)), 0.0);

    // Procrustes alignment absorbs rigid motion; the raw metric sees it.
    for (int trial = 0; trial < 10; ++trial)
    {
        core::RigidTransform motion;
        motion.rotation = rng.rotation();
        motion.translation = rng.vec3(-1.0, 1.0);
        std::vector<core::Vec3> moved;
        for (const auto& p : joints)
        {
            moved.push_back(motion.apply(p));
        }
        EXPECT_GT(metrics::mpjpe(moved, joints), 0.0);
        EXPECT_LT(metrics::pa_mpjpe(moved, joints), 1e-9);
    }

    // Symmetry of point_to_plane without prealignment.
    core::Mesh other = head;
    for (auto& p : other.vertices)
    {
        p += rng.vec3(-0.05, 0.05);
    }
    const auto forward = metrics::point_to_plane(head, other);
    const auto backward = metrics::point_to_plane(other, head);
    EXPECT_EQ(forward.mean, backward.mean);

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 5.0);
    report("C10", elapsed, "metric laws: exact zeros, procrustes absorbs rigid motion, p2p symmetric");
}

TEST(Acceptance, C11_ProcrustesOptimality)
{
    const Stopwatch clock;
    synth::SeededRng rng(1011);

    for (int pair = 0; pair < 50; ++pair)
    {
        const std::vector<core::Vec3> gt = random_cloud(rng, 20);
        std::vector<core::Vec3> pred = gt;
        for (auto& p : pred)
        {
            p += rng.vec3(-0.4, 0.4);
        }
        const double closed_form = squared_residual(metrics::procrustes_align(pred, gt).aligned, gt);

        double best_random = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 1000; ++trial)
        {
            core::RigidTransform t;
            t.rotation = rng.rotation();
            t.translation = rng.vec3(-1.0, 1.0);
            t.scale = rng.uniform(0.3, 3.0);
            std::vector<core::Vec3> moved;
            moved.reserve(pred.size());
            for (const auto& p : pred)
            {
                moved.push_back(t.apply(p));
            }
            best_random = std::min(best_random, squared_residual(moved, gt));
        }
        EXPECT_LE(closed_form, best_random) << "pair " << pair;
    }

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 30.0);
    report("C11", elapsed, "procrustes optimality: closed form beats 1000 random transforms on 50 pairs");
}

TEST(Acceptance, C12_EndToEndDeterminism)
{
    const Stopwatch clock;
    ASSERT_FALSE(cli_path().empty()) << "MORPHFUSE_CLI_PATH not set";

    const auto pipeline = [&](const fs::path& dir) {
        const std::string scene = (dir / "scene").string();
        ASSERT_EQ(run_cli("synth --kind scene --seed 7 --out " + scene), 0);
        ASSERT_EQ(run_cli("face --model-dir " + scene + "/face_model --coeffs " + scene +
                          "/coeffs.json --out " + (dir / "face_eval.ply").string()),
                  0);
        ASSERT_EQ(run_cli("fit --model-dir " + scene + "/body_model --keypoints " + scene +
                          "/keypoints.json --config " + scene + "/fit_config.json --out " +
                          (dir / "params.json").string() + " --out-joints " +
                          (dir / "joints.json").string()),
                  0);
        ASSERT_EQ(run_cli("fuse --model-dir " + scene + "/body_model --params " +
                          (dir / "params.json").string() + " --face " + scene + "/face.obj --spec " +
                          scene + "/spec.json --strategy opt --lambda-pose 0 --lambda-shape 0 --out " +
                          (dir / "fused.obj").string() + " --report " +
                          (dir / "fuse_report.json").string() + " --out-body " +
                          (dir / "posed.ply").string()),
                  0);
        fs::create_directories(dir / "pred");
        fs::create_directories(dir / "gt");
        fs::copy_file(dir / "posed.ply", dir / "pred" / "body.ply");
        fs::copy_file(dir / "fused.obj", dir / "pred" / "fused.obj");
        fs::copy_file(scene + "/gt/body.ply", dir / "gt" / "body.ply");
        fs::copy_file(dir / "fused.obj", dir / "gt" / "fused.obj");
        fs::copy_file(dir / "joints.json", dir / "pred" / "joints.json");
        fs::copy_file(scene + "/gt/joints.json", dir / "gt" / "joints.json");
        ASSERT_EQ(run_cli("eval --pred " + (dir / "pred").string() + " --gt " + (dir / "gt").string() +
                          " --metrics v2v,pa-v2v,mpjpe,pa-mpjpe,p2p,df --out " +
                          (dir / "eval.json").string() + " --csv " + (dir / "eval.csv").string() +
                          " --table " + (dir / "eval.txt").string()),
                  0);
    };

    const fs::path run1 = fresh_dir("c12_run1");
    const fs::path run2 = fresh_dir("c12_run2");
    pipeline(run1);
    pipeline(run2);
    if (::testing::Test::HasFailure())
    {
        report("C12", clock.seconds(), "end-to-end determinism: pipeline stage failed");
        return;
    }

    for (const char* name :
         { "scene/face.obj", "scene/coeffs.json", "scene/keypoints.json", "scene/spec.json",
           "scene/gt/params.json", "scene/gt/joints.json", "scene/gt/body.ply",
           "scene/face_model/template.ply", "scene/face_model/identity.mfa",
           "scene/body_model/template.ply", "scene/body_model/shape_basis.mfa", "face_eval.ply",
           "params.json", "params.json.trace.csv", "joints.json", "fused.obj", "fuse_report.json",
           "posed.ply", "eval.json", "eval.csv", "eval.txt" })
    {
        const std::string a = slurp(run1 / name);
        const std::string b = slurp(run2 / name);
        ASSERT_FALSE(a.empty()) << name;
        EXPECT_EQ(a, b) << name << " differs between runs";
    }

    const double elapsed = clock.seconds();
    EXPECT_LT(elapsed, 120.0);
    report("C12", elapsed, "end-to-end determinism: two seeded pipeline runs are byte-identical");
}
