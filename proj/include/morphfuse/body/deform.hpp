/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/body/deform.hpp
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

#ifndef MORPHFUSE_BODY_DEFORM_HPP
#define MORPHFUSE_BODY_DEFORM_HPP

#include "morphfuse/body/model.hpp"
#include "morphfuse/body/rotation.hpp"
#include "morphfuse/core/basis.hpp"
#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/types.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morphfuse {
namespace body {

/**
 * Applies the shape blendshapes: template + shape_basis * beta. Faces and
 * colors come from the template.
 *
 * @throws std::invalid_argument on coefficient length mismatch.
 */
inline core::Mesh shape_mesh(const BodyModel& model, const Eigen::VectorXd& beta)
{
    if (beta.size() != model.shape_basis.cols())
    {
        throw std::invalid_argument("shape_mesh: " + std::to_string(beta.size()) +
                                    " coefficients for a rank-" +
                                    std::to_string(model.shape_basis.cols()) + " shape basis");
    }
    const auto offsets = core::basis_offsets(model.shape_basis, beta);
    core::Mesh shaped = model.template_mesh;
    for (std::size_t i = 0; i < shaped.vertices.size(); ++i)
    {
        shaped.vertices[i] += offsets[i];
    }
    return shaped;
}

/**
 * Pose-dependent corrective offsets: for each joint k the row-major
 * flattening of R(theta_k) - I scales the joint's 9 pose-basis columns.
 * Zero pose yields exactly zero offsets.
 *
 * @throws std::invalid_argument on theta length mismatch.
 */
inline std::vector<core::Vec3> pose_offsets(const BodyModel& model, const Eigen::VectorXd& theta)
{
    const int k = model.joint_count();
    if (theta.size() != 3 * k)
    {
        throw std::invalid_argument("pose_offsets: theta has " + std::to_string(theta.size()) +
                                    " entries, expected " + std::to_string(3 * k));
    }
    Eigen::VectorXd rotation_deltas(9 * k);
    for (int j = 0; j < k; ++j)
    {
        const core::Vec3 axis_angle = theta.segment<3>(3 * j);
        rotation_deltas.segment<9>(9 * j) = vec_rotation_delta(rodrigues(axis_angle));
    }
    return core::basis_offsets(model.pose_basis, rotation_deltas);
}

/**
 * Joint positions as the regressor-weighted sum of mesh vertices.
 *
 * @throws std::invalid_argument if the mesh vertex count does not match the
 *         regressor.
 */
inline std::vector<core::Vec3> regress_joints(const BodyModel& model, const core::Mesh& shaped)
{
    if (static_cast<Eigen::Index>(shaped.vertices.size()) != model.joint_regressor.cols())
    {
        throw std::invalid_argument("regress_joints: mesh has " + std::to_string(shaped.vertices.size()) +
                                    " vertices but the regressor expects " +
                                    std::to_string(model.joint_regressor.cols()));
    }
    const int k = model.joint_count();
    std::vector<core::Vec3> joints(static_cast<std::size_t>(k), core::Vec3::Zero());
    for (int j = 0; j < k; ++j)
    {
        core::Vec3 acc = core::Vec3::Zero();
        for (Eigen::Index v = 0; v < model.joint_regressor.cols(); ++v)
        {
            const double w = model.joint_regressor(j, v);
            if (w != 0.0)
            {
                acc += w * shaped.vertices[static_cast<std::size_t>(v)];
            }
        }
        joints[static_cast<std::size_t>(j)] = acc;
    }
    return joints;
}

/**
 * Forward kinematics: composes per-joint rotations parent-to-child into
 * world transforms. Each joint rotates about its own rest location, so
 * transform k maps rest_joints[k] to the joint's posed position; the root
 * transform carries the global orientation theta[0..2].
 *
 * @throws std::invalid_argument on size mismatch or an invalid tree.
 */
inline std::vector<core::RigidTransform> forward_kinematics(const BodyModel& model,
                                                            const Eigen::VectorXd& theta,
                                                            const std::vector<core::Vec3>& rest_joints)
{
    const int k = model.joint_count();
    if (theta.size() != 3 * k)
    {
        throw std::invalid_argument("forward_kinematics: theta has " + std::to_string(theta.size()) +
                                    " entries, expected " + std::to_string(3 * k));
    }
    if (static_cast<int>(rest_joints.size()) != k)
    {
        throw std::invalid_argument("forward_kinematics: " + std::to_string(rest_joints.size()) +
                                    " rest joints for " + std::to_string(k) + " joints");
    }
    std::vector<core::RigidTransform> transforms(static_cast<std::size_t>(k));
    std::vector<bool> done(static_cast<std::size_t>(k), false);
    // Parents always precede children in SMPL-style joint orderings, but the
    // loop below does not rely on that: it resolves each chain on demand.
    const auto resolve = [&](const auto& self, int j) -> void {
        if (done[static_cast<std::size_t>(j)])
        {
            return;
        }
        const int parent = model.parents[static_cast<std::size_t>(j)];
        const core::Mat3 local_rotation = rodrigues(theta.segment<3>(3 * j));
        const core::Vec3& joint = rest_joints[static_cast<std::size_t>(j)];
        core::RigidTransform& world = transforms[static_cast<std::size_t>(j)];
        if (parent < 0)
        {
            world.rotation = local_rotation;
            world.translation = joint - local_rotation * joint;
        } else
        {
            if (parent >= k)
            {
                throw std::invalid_argument("forward_kinematics: joint " + std::to_string(j) +
                                            " has out-of-range parent " + std::to_string(parent));
            }
            self(self, parent);
            const core::RigidTransform& p = transforms[static_cast<std::size_t>(parent)];
            world.rotation = p.rotation * local_rotation;
            world.translation = p.rotation * (joint - local_rotation * joint) + p.translation;
        }
        world.scale = 1.0;
        done[static_cast<std::size_t>(j)] = true;
    };
    for (int j = 0; j < k; ++j)
    {
        resolve(resolve, j);
    }
    return transforms;
}

/**
 * Linear blend skinning: every vertex is carried by the weight-blended
 * per-joint transforms. Computed in delta form,
 * v' = v + sum_k w_ik (T_k(v) - v), which reproduces the rest mesh exactly
 * when all transforms are the identity; with rows summing to 1 this equals
 * the plain weighted sum.
 *
 * @throws std::invalid_argument on size mismatch.
 */
inline core::Mesh skin(const BodyModel& model, const std::vector<core::RigidTransform>& transforms,
                       const core::Mesh& rest)
{
    const int k = model.joint_count();
    if (static_cast<int>(transforms.size()) != k)
    {
        throw std::invalid_argument("skin: " + std::to_string(transforms.size()) + " transforms for " +
                                    std::to_string(k) + " joints");
    }
    if (static_cast<Eigen::Index>(rest.vertices.size()) != model.skinning_weights.rows())
    {
        throw std::invalid_argument("skin: mesh has " + std::to_string(rest.vertices.size()) +
                                    " vertices but the weights expect " +
                                    std::to_string(model.skinning_weights.rows()));
    }
    core::Mesh posed = rest;
    for (std::size_t i = 0; i < posed.vertices.size(); ++i)
    {
        const core::Vec3& v = rest.vertices[i];
        core::Vec3 delta = core::Vec3::Zero();
        for (int j = 0; j < k; ++j)
        {
            const double w = model.skinning_weights(static_cast<Eigen::Index>(i), j);
            if (w != 0.0)
            {
                const core::RigidTransform& t = transforms[static_cast<std::size_t>(j)];
                delta += w * (t.rotation * v + t.translation - v);
            }
        }
        posed.vertices[i] = v + delta;
    }
    return posed;
}

/// Result of posing a body: the skinned mesh plus the posed joint locations.
struct PoseResult
{
    core::Mesh mesh;
    std::vector<core::Vec3> joints;
};

/**
 * Full posing pipeline: shape the template, add pose-dependent offsets,
 * regress rest joints from the shaped mesh (before pose offsets), run
 * forward kinematics and skin. Returns the posed mesh and joints.
 */
inline PoseResult pose_body(const BodyModel& model, const BodyParams& params)
{
    validate(params, model);
    const core::Mesh shaped = shape_mesh(model, params.beta);
    const std::vector<core::Vec3> rest_joints = regress_joints(model, shaped);
    const std::vector<core::Vec3> offsets = pose_offsets(model, params.theta);
    core::Mesh rest = shaped;
    for (std::size_t i = 0; i < rest.vertices.size(); ++i)
    {
        rest.vertices[i] += offsets[i];
    }
    const auto transforms = forward_kinematics(model, params.theta, rest_joints);
    PoseResult result;
    result.mesh = skin(model, transforms, rest);
    result.joints.resize(rest_joints.size());
    for (std::size_t j = 0; j < rest_joints.size(); ++j)
    {
        result.joints[j] = transforms[j].rotation * rest_joints[j] + transforms[j].translation;
    }
    return result;
}

} // namespace body
} // namespace morphfuse

#endif /* MORPHFUSE_BODY_DEFORM_HPP */
