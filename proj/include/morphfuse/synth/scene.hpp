/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/synth/scene.hpp
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
#pragma once

#ifndef MORPHFUSE_SYNTH_SCENE_HPP
#define MORPHFUSE_SYNTH_SCENE_HPP

#include "morphfuse/body/camera.hpp"
#include "morphfuse/body/deform.hpp"
#include "morphfuse/body/model_io.hpp"
#include "morphfuse/core/submesh.hpp"
#include "morphfuse/face/model_io.hpp"
#include "morphfuse/fit/fitter.hpp"
#include "morphfuse/fuse/region.hpp"
#include "morphfuse/io/json_io.hpp"
#include "morphfuse/synth/toy_models.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace morphfuse {
namespace synth {

/**
 * A complete synthetic evaluation scene: a body model with ground-truth
 * parameters and their posed mesh, 2D keypoints observed from the
 * ground-truth camera, a face model with sample coefficients, a face scan
 * to paste onto the body, the region spec wiring it to the head, and a fit
 * configuration for recovering the parameters from the keypoints.
 */
struct Scene
{
    face::MorphableFaceModel face_model;
    body::BodyModel body_model;

    body::BodyParams gt_params;
    std::vector<core::Vec3> gt_joints;
    core::Mesh gt_body;

    body::Keypoints2D keypoints;
    face::FaceCoefficients coeffs;
    core::Mesh face_mesh;
    fuse::FaceRegionSpec region;
    fit::FitConfig fit_config;
};

/**
 * Builds a scene deterministically from a seed.
 *
 * The face scan is the head cap of the ground-truth body, cut along a ring
 * of the head sphere and displaced out of the body surface: its boundary
 * ring moves +0.15z while the interior moves the opposite way by the
 * amount that keeps the mean displacement at zero, so a rigid alignment of
 * the scan to the head cannot undo the mismatch and seam optimization has
 * real work to do.
 */
inline Scene make_scene(std::uint64_t seed)
{
    SeededRng rng(seed);
    Scene scene;
    scene.body_model = make_toy_body_model(rng);
    scene.face_model = make_toy_face_model(rng);

    scene.gt_params.beta = Eigen::VectorXd(scene.body_model.shape_count());
    for (Eigen::Index c = 0; c < scene.gt_params.beta.size(); ++c)
    {
        scene.gt_params.beta[c] = rng.uniform(-0.06, 0.06);
    }
    scene.gt_params.theta = Eigen::VectorXd(3 * scene.body_model.joint_count());
    for (Eigen::Index c = 0; c < scene.gt_params.theta.size(); ++c)
    {
        scene.gt_params.theta[c] = rng.uniform(-0.12, 0.12);
    }
    scene.gt_params.camera.scale = rng.uniform(1.0, 1.4);
    scene.gt_params.camera.translation = core::Vec2(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));

    const body::PoseResult posed = body::pose_body(scene.body_model, scene.gt_params);
    scene.gt_body = posed.mesh;
    scene.gt_joints = posed.joints;
    scene.keypoints.points = body::project(posed.joints, scene.gt_params.camera);
    scene.keypoints.visibility.assign(posed.joints.size(), 1);

    scene.coeffs.identity = Eigen::VectorXd(scene.face_model.identity_count());
    for (Eigen::Index c = 0; c < scene.coeffs.identity.size(); ++c)
    {
        scene.coeffs.identity[c] = rng.uniform(-0.5, 0.5);
    }
    scene.coeffs.expression = Eigen::VectorXd(scene.face_model.expression_count());
    for (Eigen::Index c = 0; c < scene.coeffs.expression.size(); ++c)
    {
        scene.coeffs.expression[c] = rng.uniform(-0.4, 0.4);
    }
    scene.coeffs.texture = Eigen::VectorXd(scene.face_model.texture_count());
    for (Eigen::Index c = 0; c < scene.coeffs.texture.size(); ++c)
    {
        scene.coeffs.texture[c] = rng.uniform(-0.3, 0.3);
    }

    // Head cap region: apex plus the top three rings are replaced by the
    // scan; the fourth ring is the seam; the torso's top row is the neck.
    using L = ToyBodyLayout;
    scene.region.face_vertices.push_back(L::head_apex());
    for (int ring = 1; ring <= 3; ++ring)
    {
        for (int s = 0; s < L::segments; ++s)
        {
            scene.region.face_vertices.push_back(L::head_ring_start(ring) + s);
        }
    }
    for (int s = 0; s < L::segments; ++s)
    {
        scene.region.seam_vertices.push_back(L::head_ring_start(4) + s);
    }
    for (int s = 0; s < L::segments; ++s)
    {
        scene.region.neck_vertices.push_back((L::torso_rows - 1) * L::segments + s);
    }

    std::vector<int> cap = scene.region.face_vertices;
    cap.insert(cap.end(), scene.region.seam_vertices.begin(), scene.region.seam_vertices.end());
    const core::Submesh sub = core::extract_submesh(scene.gt_body, cap);
    scene.face_mesh = sub.mesh;

    const double ring_shift = 0.15;
    const double interior_shift = ring_shift * static_cast<double>(scene.region.seam_vertices.size()) /
                                  static_cast<double>(scene.region.face_vertices.size());
    std::vector<char> is_seam(scene.gt_body.vertices.size(), 0);
    for (const int b : scene.region.seam_vertices)
    {
        is_seam[static_cast<std::size_t>(b)] = 1;
    }
    for (std::size_t local = 0; local < scene.face_mesh.vertices.size(); ++local)
    {
        const int parent = sub.to_parent[local];
        scene.face_mesh.vertices[local].z() +=
            is_seam[static_cast<std::size_t>(parent)] ? ring_shift : -interior_shift;
    }
    for (const int b : scene.region.seam_vertices)
    {
        scene.region.correspondence.emplace_back(sub.from_parent[static_cast<std::size_t>(b)], b);
    }
    fuse::validate(scene.region, scene.gt_body, scene.face_mesh);

    scene.fit_config.max_iterations = 200;
    return scene;
}

/// Writes every part of a scene under the given directory.
inline void write_scene(const std::string& dir, const Scene& scene)
{
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "gt");
    face::save_face_model(scene.face_model, (fs::path(dir) / "face_model").string());
    body::save_body_model(scene.body_model, (fs::path(dir) / "body_model").string());
    core::save_mesh(scene.face_mesh, (fs::path(dir) / "face.obj").string());
    io::save_json_file((fs::path(dir) / "coeffs.json").string(), io::coefficients_to_json(scene.coeffs));
    io::save_json_file((fs::path(dir) / "keypoints.json").string(), io::keypoints_to_json(scene.keypoints));
    io::save_json_file((fs::path(dir) / "fit_config.json").string(),
                       io::fit_config_to_json(scene.fit_config));
    io::save_json_file((fs::path(dir) / "spec.json").string(), io::region_spec_to_json(scene.region));
    core::save_mesh(scene.gt_body, (fs::path(dir) / "gt" / "body.ply").string());
    io::save_json_file((fs::path(dir) / "gt" / "params.json").string(),
                       io::body_params_to_json(scene.gt_params));
    io::save_json_file((fs::path(dir) / "gt" / "joints.json").string(), io::joints_to_json(scene.gt_joints));
}

} // namespace synth
} // namespace morphfuse

#endif /* MORPHFUSE_SYNTH_SCENE_HPP */
