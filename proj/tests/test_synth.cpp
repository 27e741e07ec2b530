/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: tests/test_synth.cpp
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
#include "morphfuse/core/topology.hpp"
#include "morphfuse/synth/rng.hpp"
#include "morphfuse/synth/scene.hpp"
#include "morphfuse/synth/toy_models.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

using namespace morphfuse;

TEST(Rng, EqualSeedsGiveEqualStreams)
{
    synth::SeededRng a(99);
    synth::SeededRng b(99);
    for (int i = 0; i < 100; ++i)
    {
        EXPECT_EQ(a.raw(), b.raw());
    }
    synth::SeededRng c(99);
    synth::SeededRng d(100);
    EXPECT_NE(c.raw(), d.raw());
}

TEST(Rng, UniformStaysInRangeAndRotationsAreProper)
{
    synth::SeededRng rng(17);
    for (int i = 0; i < 200; ++i)
    {
        const double u = rng.uniform(-2.0, 3.0);
        EXPECT_GE(u, -2.0);
        EXPECT_LT(u, 3.0);
    }
    for (int i = 0; i < 20; ++i)
    {
        const core::Mat3 r = rng.rotation();
        EXPECT_LT((r * r.transpose() - core::Mat3::Identity()).norm(), 1e-12);
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
    for (int i = 0; i < 100; ++i)
    {
        EXPECT_LT(rng.index(7), 7u);
    }
}

TEST(ToyFace, HasTheDocumentedShapeAndValidates)
{
    synth::SeededRng rng(901);
    const face::MorphableFaceModel model = synth::make_toy_face_model(rng);
    EXPECT_EQ(model.template_shape.vertices.size(), 145u); // apex + 9 rings of 16
    EXPECT_EQ(model.mean_texture.size(), 145u);
    EXPECT_EQ(model.identity_basis.cols(), 8);
    EXPECT_EQ(model.expression_basis.cols(), 6);
    EXPECT_EQ(model.texture_basis.cols(), 5);
    EXPECT_EQ(model.identity_basis.rows(), 3 * 145);
    EXPECT_NO_THROW(face::validate(model));

    // Mean texture sits inside (0, 1), clear of the clamp boundaries.
    for (const auto& c : model.mean_texture)
    {
        EXPECT_GT(c.minCoeff(), 0.05);
        EXPECT_LT(c.maxCoeff(), 0.95);
    }

    // The open bottom is the single boundary loop.
    const auto loops = core::boundary_loops(model.template_shape);
    ASSERT_EQ(loops.size(), 1u);
    EXPECT_EQ(loops.front().size(), 16u);

    EXPECT_THROW(synth::make_toy_face_model(rng, 0), std::invalid_argument);
}

TEST(ToyFace, IsDeterministicInTheSeed)
{
    synth::SeededRng rng_a(902);
    synth::SeededRng rng_b(902);
    const face::MorphableFaceModel a = synth::make_toy_face_model(rng_a);
    const face::MorphableFaceModel b = synth::make_toy_face_model(rng_b);
    EXPECT_EQ(a.identity_basis, b.identity_basis);
    EXPECT_EQ(a.expression_basis, b.expression_basis);
    EXPECT_EQ(a.texture_basis, b.texture_basis);
    for (std::size_t i = 0; i < a.template_shape.vertices.size(); ++i)
    {
        EXPECT_EQ(a.template_shape.vertices[i], b.template_shape.vertices[i]);
    }

    synth::SeededRng rng_c(903);
    const face::MorphableFaceModel c = synth::make_toy_face_model(rng_c);
    EXPECT_NE(a.identity_basis, c.identity_basis);
}

TEST(ToyBody, HasTheDocumentedLayoutAndValidates)
{
    using L = synth::ToyBodyLayout;
    synth::SeededRng rng(904);
    const body::BodyModel model = synth::make_toy_body_model(rng);

    EXPECT_EQ(model.template_mesh.vertices.size(), 181u);
    EXPECT_EQ(static_cast<int>(model.template_mesh.vertices.size()), L::vertex_count());
    EXPECT_EQ(model.joint_count(), 5);
    EXPECT_EQ(model.parents, (std::vector<int>{ -1, 0, 1, 1, 1 }));
    EXPECT_NO_THROW(body::validate(model));

    // First shape direction: a uniform +z shift of every vertex.
    const Eigen::Index v = 181;
    EXPECT_EQ(model.shape_basis.col(0).head(2 * v).norm(), 0.0);
    EXPECT_EQ(model.shape_basis.col(0).tail(v), Eigen::VectorXd::Ones(v));

    // The root slot of the pose corrective basis is identically zero.
    EXPECT_EQ(model.pose_basis.leftCols(9).norm(), 0.0);
    EXPECT_GT(model.pose_basis.rightCols(9 * 4).norm(), 0.0);

    // Torso is open at the bottom; everything else is stitched closed.
    const auto loops = core::boundary_loops(model.template_mesh);
    ASSERT_EQ(loops.size(), 1u);
    EXPECT_EQ(loops.front().size(), static_cast<std::size_t>(L::segments));
}

TEST(ToyBody, SkinningRowsAreStochastic)
{
    synth::SeededRng rng(905);
    const body::BodyModel model = synth::make_toy_body_model(rng);
    for (Eigen::Index i = 0; i < model.skinning_weights.rows(); ++i)
    {
        EXPECT_NEAR(model.skinning_weights.row(i).sum(), 1.0, 1e-12) << "row " << i;
        EXPECT_GE(model.skinning_weights.row(i).minCoeff(), 0.0);
    }
    for (Eigen::Index j = 0; j < model.joint_regressor.rows(); ++j)
    {
        EXPECT_NEAR(model.joint_regressor.row(j).sum(), 1.0, 1e-12) << "row " << j;
        EXPECT_GE(model.joint_regressor.row(j).minCoeff(), 0.0);
    }
}

TEST(Scene, IsDeterministicInTheSeed)
{
    const synth::Scene a = synth::make_scene(5);
    const synth::Scene b = synth::make_scene(5);
    EXPECT_EQ(a.gt_params.beta, b.gt_params.beta);
    EXPECT_EQ(a.gt_params.theta, b.gt_params.theta);
    EXPECT_EQ(a.gt_params.camera.scale, b.gt_params.camera.scale);
    EXPECT_EQ(a.keypoints.points, b.keypoints.points);
    ASSERT_EQ(a.face_mesh.vertices.size(), b.face_mesh.vertices.size());
    for (std::size_t i = 0; i < a.face_mesh.vertices.size(); ++i)
    {
        EXPECT_EQ(a.face_mesh.vertices[i], b.face_mesh.vertices[i]);
    }

    const synth::Scene c = synth::make_scene(6);
    EXPECT_NE(a.gt_params.beta, c.gt_params.beta);
}

TEST(Scene, KeypointsAreTheProjectedGroundTruthJoints)
{
    const synth::Scene scene = synth::make_scene(7);
    const auto projected = body::project(scene.gt_joints, scene.gt_params.camera);
    ASSERT_EQ(scene.keypoints.points.size(), projected.size());
    for (std::size_t i = 0; i < projected.size(); ++i)
    {
        EXPECT_EQ(scene.keypoints.points[i], projected[i]);
    }
    EXPECT_EQ(scene.keypoints.visibility, std::vector<int>(projected.size(), 1));

    const body::PoseResult posed = body::pose_body(scene.body_model, scene.gt_params);
    for (std::size_t i = 0; i < posed.joints.size(); ++i)
    {
        EXPECT_EQ(posed.joints[i], scene.gt_joints[i]);
    }
}

TEST(Scene, RegionCoversTheHeadCapWithSeamAndNeckRings)
{
    using L = synth::ToyBodyLayout;
    const synth::Scene scene = synth::make_scene(8);

    ASSERT_EQ(scene.region.face_vertices.size(), 37u); // apex + rings 1..3
    EXPECT_EQ(scene.region.face_vertices.front(), L::head_apex());
    EXPECT_EQ(scene.region.face_vertices[1], L::head_ring_start(1));

    ASSERT_EQ(scene.region.seam_vertices.size(), 12u);
    for (int s = 0; s < L::segments; ++s)
    {
        EXPECT_EQ(scene.region.seam_vertices[static_cast<std::size_t>(s)], L::head_ring_start(4) + s);
        EXPECT_EQ(scene.region.neck_vertices[static_cast<std::size_t>(s)],
                  (L::torso_rows - 1) * L::segments + s);
    }
    EXPECT_EQ(scene.region.correspondence.size(), scene.region.seam_vertices.size());
    EXPECT_NO_THROW(fuse::validate(scene.region, scene.gt_body, scene.face_mesh));
}

TEST(Scene, ScanDisplacementHasZeroMeanByConstruction)
{
    const synth::Scene scene = synth::make_scene(9);

    // Recover the body-side cap in submesh order (ascending parent index).
    std::vector<int> cap = scene.region.face_vertices;
    cap.insert(cap.end(), scene.region.seam_vertices.begin(), scene.region.seam_vertices.end());
    const core::Submesh sub = core::extract_submesh(scene.gt_body, cap);
    ASSERT_EQ(sub.mesh.vertices.size(), scene.face_mesh.vertices.size());

    double mean_dz = 0.0;
    for (std::size_t i = 0; i < sub.mesh.vertices.size(); ++i)
    {
        const core::Vec3 offset = scene.face_mesh.vertices[i] - sub.mesh.vertices[i];
        EXPECT_EQ(offset.x(), 0.0);
        EXPECT_EQ(offset.y(), 0.0);
        mean_dz += offset.z();
    }
    mean_dz /= static_cast<double>(sub.mesh.vertices.size());
    EXPECT_NEAR(mean_dz, 0.0, 1e-12);

    // Seam ring out, interior in: the scan really is displaced both ways.
    const std::size_t n_face = scene.region.face_vertices.size();
    EXPECT_LT(scene.face_mesh.vertices[0].z() - sub.mesh.vertices[0].z(), 0.0);
    EXPECT_NEAR(scene.face_mesh.vertices[n_face].z() - sub.mesh.vertices[n_face].z(), 0.15, 1e-15);
}

TEST(Scene, WriteSceneProducesTheFullFileSet)
{
    const auto dir = std::filesystem::temp_directory_path() / "morphfuse_scene_test";
    std::filesystem::remove_all(dir);
    const synth::Scene scene = synth::make_scene(10);
    synth::write_scene(dir.string(), scene);

    for (const char* name : { "face_model/template.ply", "face_model/identity.mfa",
                              "face_model/expression.mfa", "face_model/texture.mfa",
                              "body_model/template.ply", "body_model/shape_basis.mfa",
                              "body_model/pose_basis.mfa", "body_model/joint_regressor.mfa",
                              "body_model/skinning_weights.mfa", "body_model/tree.json", "face.obj",
                              "coeffs.json", "keypoints.json", "fit_config.json", "spec.json",
                              "gt/body.ply", "gt/params.json", "gt/joints.json" })
    {
        EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
    }

    // Round trip: a reloaded model matches the in-memory one.
    const body::BodyModel reloaded = body::load_body_model((dir / "body_model").string());
    EXPECT_EQ(reloaded.shape_basis, scene.body_model.shape_basis);
    EXPECT_EQ(reloaded.parents, scene.body_model.parents);
}
