/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/fit/jacobians.hpp
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

#ifndef MORPHFUSE_FIT_JACOBIANS_HPP
#define MORPHFUSE_FIT_JACOBIANS_HPP

#include "morphfuse/body/camera.hpp"
#include "morphfuse/body/deform.hpp"
#include "morphfuse/body/model.hpp"
#include "morphfuse/body/rotation.hpp"
#include "morphfuse/core/basis.hpp"
#include "morphfuse/core/types.hpp"

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morphfuse {
namespace fit {

/**
 * Flat parameter vector layout shared by the fitter and the seam optimizer:
 * [beta (n_beta) | theta (3K) | camera scale | camera tx | camera ty].
 */
struct ParamLayout
{
    int n_beta = 0;
    int n_joints = 0;

    int beta_offset() const { return 0; }
    int theta_offset() const { return n_beta; }
    int camera_offset() const { return n_beta + 3 * n_joints; }
    int size() const { return n_beta + 3 * n_joints + 3; }

    static ParamLayout of(const body::BodyModel& model)
    {
        return ParamLayout{ model.shape_count(), model.joint_count() };
    }
};

inline Eigen::VectorXd pack_params(const body::BodyParams& params)
{
    Eigen::VectorXd q(params.beta.size() + params.theta.size() + 3);
    q.head(params.beta.size()) = params.beta;
    q.segment(params.beta.size(), params.theta.size()) = params.theta;
    q[params.beta.size() + params.theta.size()] = params.camera.scale;
    q.tail(2) = params.camera.translation;
    return q;
}

inline body::BodyParams unpack_params(const Eigen::VectorXd& q, const ParamLayout& layout)
{
    if (q.size() != layout.size())
    {
        throw std::invalid_argument("unpack_params: vector has " + std::to_string(q.size()) +
                                    " entries, expected " + std::to_string(layout.size()));
    }
    body::BodyParams params;
    params.beta = q.head(layout.n_beta);
    params.theta = q.segment(layout.theta_offset(), 3 * layout.n_joints);
    params.camera.scale = q[layout.camera_offset()];
    params.camera.translation = q.tail(2);
    return params;
}

namespace detail {

/**
 * Forward kinematics with forward-mode derivatives: world transforms
 * (A_k, b_k) per joint together with their partials for every shape and
 * pose parameter. Shape enters through the regressed rest joints (rotations
 * do not depend on beta, so dA/dbeta = 0 and is skipped); pose enters
 * through the per-joint Rodrigues rotations.
 */
struct FkDerivatives
{
    core::Mesh shaped;                          // template + shape offsets
    std::vector<core::Vec3> rest_joints;        // K
    std::vector<core::RigidTransform> world;    // K world transforms
    std::vector<core::Vec3> posed_joints;       // K
    // d(rest joint k)/d(beta j): rest_joint_dirs[j][k]
    std::vector<std::vector<core::Vec3>> rest_joint_dirs;
    // Pose partials, indexed [theta component e][joint k]:
    std::vector<std::vector<core::Mat3>> drot_theta;
    std::vector<std::vector<core::Vec3>> dtrans_theta;
    // Shape partials of the translation, indexed [beta j][joint k]:
    std::vector<std::vector<core::Vec3>> dtrans_beta;
};

inline FkDerivatives fk_derivatives(const body::BodyModel& model, const body::BodyParams& params)
{
    body::validate(params, model);
    const int k = model.joint_count();
    const int n_beta = model.shape_count();

    FkDerivatives out;
    out.shaped = body::shape_mesh(model, params.beta);
    out.rest_joints = body::regress_joints(model, out.shaped);

    // Regressor image of each shape basis column.
    out.rest_joint_dirs.assign(static_cast<std::size_t>(n_beta),
                               std::vector<core::Vec3>(static_cast<std::size_t>(k), core::Vec3::Zero()));
    const Eigen::Index v_count = model.joint_regressor.cols();
    for (int j = 0; j < n_beta; ++j)
    {
        for (int joint = 0; joint < k; ++joint)
        {
            core::Vec3 acc = core::Vec3::Zero();
            for (Eigen::Index v = 0; v < v_count; ++v)
            {
                const double w = model.joint_regressor(joint, v);
                if (w != 0.0)
                {
                    acc += w * core::basis_column_offset(model.shape_basis, j, v);
                }
            }
            out.rest_joint_dirs[static_cast<std::size_t>(j)][static_cast<std::size_t>(joint)] = acc;
        }
    }

    // Local rotations and their axis-angle partials.
    std::vector<core::Mat3> local(static_cast<std::size_t>(k));
    std::vector<std::array<core::Mat3, 3>> dlocal(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
    {
        const core::Vec3 aa = params.theta.segment<3>(3 * j);
        local[static_cast<std::size_t>(j)] = body::rodrigues(aa);
        dlocal[static_cast<std::size_t>(j)] = body::rodrigues_jacobian(aa);
    }

    out.world.resize(static_cast<std::size_t>(k));
    out.drot_theta.assign(static_cast<std::size_t>(3 * k),
                          std::vector<core::Mat3>(static_cast<std::size_t>(k), core::Mat3::Zero()));
    out.dtrans_theta.assign(static_cast<std::size_t>(3 * k),
                            std::vector<core::Vec3>(static_cast<std::size_t>(k), core::Vec3::Zero()));
    out.dtrans_beta.assign(static_cast<std::size_t>(n_beta),
                           std::vector<core::Vec3>(static_cast<std::size_t>(k), core::Vec3::Zero()));

    // Joints are visited parents-first.
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(k));
    {
        std::vector<bool> placed(static_cast<std::size_t>(k), false);
        while (static_cast<int>(order.size()) < k)
        {
            bool progress = false;
            for (int j = 0; j < k; ++j)
            {
                if (placed[static_cast<std::size_t>(j)])
                {
                    continue;
                }
                const int p = model.parents[static_cast<std::size_t>(j)];
                if (p < 0 || placed[static_cast<std::size_t>(p)])
                {
                    order.push_back(j);
                    placed[static_cast<std::size_t>(j)] = true;
                    progress = true;
                }
            }
            if (!progress)
            {
                throw std::invalid_argument("fk_derivatives: kinematic tree has a cycle");
            }
        }
    }

    for (const int j : order)
    {
        const int parent = model.parents[static_cast<std::size_t>(j)];
        const core::Mat3& r = local[static_cast<std::size_t>(j)];
        const core::Vec3& joint = out.rest_joints[static_cast<std::size_t>(j)];
        core::RigidTransform& world = out.world[static_cast<std::size_t>(j)];
        const core::Vec3 anchor = joint - r * joint;

        if (parent < 0)
        {
            world.rotation = r;
            world.translation = anchor;
        } else
        {
            const core::RigidTransform& pw = out.world[static_cast<std::size_t>(parent)];
            world.rotation = pw.rotation * r;
            world.translation = pw.rotation * anchor + pw.translation;
        }
        world.scale = 1.0;

        // Pose partials: the own-joint rotation components plus everything
        // inherited from the parent chain.
        for (int e = 0; e < 3 * k; ++e)
        {
            const int owner = e / 3;
            const int comp = e % 3;
            const bool own = owner == j;
            core::Mat3 dr_local = core::Mat3::Zero();
            if (own)
            {
                dr_local = dlocal[static_cast<std::size_t>(j)][static_cast<std::size_t>(comp)];
            }
            auto& drot = out.drot_theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)];
            auto& dtrans = out.dtrans_theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)];
            if (parent < 0)
            {
                if (own)
                {
                    drot = dr_local;
                    dtrans = -dr_local * joint;
                }
            } else
            {
                const auto& pdrot = out.drot_theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(parent)];
                const auto& pdtrans = out.dtrans_theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(parent)];
                const core::RigidTransform& pw = out.world[static_cast<std::size_t>(parent)];
                drot = pdrot * r;
                dtrans = pdrot * anchor + pdtrans;
                if (own)
                {
                    drot += pw.rotation * dr_local;
                    dtrans += pw.rotation * (-dr_local * joint);
                }
            }
        }

        // Shape partials: rotations are beta-independent, so only the
        // translations move, driven by the rest-joint directions.
        for (int b = 0; b < n_beta; ++b)
        {
            const core::Vec3& dj = out.rest_joint_dirs[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
            auto& dtrans = out.dtrans_beta[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
            const core::Vec3 danchor = dj - r * dj;
            if (parent < 0)
            {
                dtrans = danchor;
            } else
            {
                const auto& pdtrans = out.dtrans_beta[static_cast<std::size_t>(b)][static_cast<std::size_t>(parent)];
                const core::RigidTransform& pw = out.world[static_cast<std::size_t>(parent)];
                dtrans = pw.rotation * danchor + pdtrans;
            }
        }
    }

    out.posed_joints.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
    {
        const auto& w = out.world[static_cast<std::size_t>(j)];
        out.posed_joints[static_cast<std::size_t>(j)] =
            w.rotation * out.rest_joints[static_cast<std::size_t>(j)] + w.translation;
    }
    return out;
}

} // namespace detail

/// Projected joints together with their full parameter Jacobians.
struct ProjectedJointsJacobian
{
    ParamLayout layout;
    std::vector<core::Vec2> projected;                          // K
    std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> jac;  // K matrices, 2 x layout.size()
    std::vector<core::Vec3> posed_joints;                       // K, prior to projection
};

/**
 * Projected joint positions and their derivatives with respect to every
 * parameter in the ParamLayout order. The 3D joint position derivative is
 * d(A_k j_k + b_k) = dA_k j_k + A_k dj_k + db_k, then the weak-perspective
 * chain rule appends the camera columns.
 */
inline ProjectedJointsJacobian projected_joints_jacobian(const body::BodyModel& model,
                                                         const body::BodyParams& params)
{
    const auto fk = detail::fk_derivatives(model, params);
    const ParamLayout layout = ParamLayout::of(model);
    const int k = model.joint_count();

    ProjectedJointsJacobian out;
    out.layout = layout;
    out.posed_joints = fk.posed_joints;
    out.projected = body::project(fk.posed_joints, params.camera);
    out.jac.assign(static_cast<std::size_t>(k),
                   Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, layout.size()));

    const double s = params.camera.scale;
    for (int j = 0; j < k; ++j)
    {
        const core::Vec3& joint = fk.rest_joints[static_cast<std::size_t>(j)];
        const auto& world = fk.world[static_cast<std::size_t>(j)];
        auto& jac = out.jac[static_cast<std::size_t>(j)];

        for (int b = 0; b < layout.n_beta; ++b)
        {
            const core::Vec3 dg =
                world.rotation * fk.rest_joint_dirs[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] +
                fk.dtrans_beta[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
            jac.col(b) = s * dg.head<2>();
        }
        for (int e = 0; e < 3 * k; ++e)
        {
            const core::Vec3 dg =
                fk.drot_theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)] * joint +
                fk.dtrans_theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)];
            jac.col(layout.theta_offset() + e) = s * dg.head<2>();
        }
        const core::Vec3& g = fk.posed_joints[static_cast<std::size_t>(j)];
        jac.col(layout.camera_offset()) = g.head<2>();
        jac.col(layout.camera_offset() + 1) = core::Vec2(1.0, 0.0);
        jac.col(layout.camera_offset() + 2) = core::Vec2(0.0, 1.0);
    }
    return out;
}

/// Skinned positions of selected vertices together with parameter Jacobians.
struct SkinnedVerticesJacobian
{
    ParamLayout layout;
    std::vector<core::Vec3> positions;                          // one per requested vertex
    std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> jac;  // 3 x layout.size() each
};

/**
 * Positions and parameter derivatives of a subset of skinned body vertices,
 * differentiating the full pipeline: shape offsets, pose-dependent
 * corrective offsets, forward kinematics and linear blend skinning. Camera
 * columns are zero (the camera acts after skinning).
 *
 * @throws std::invalid_argument on an out-of-range vertex index.
 */
inline SkinnedVerticesJacobian skinned_vertices_jacobian(const body::BodyModel& model,
                                                         const body::BodyParams& params,
                                                         const std::vector<int>& vertex_indices)
{
    const auto fk = detail::fk_derivatives(model, params);
    const ParamLayout layout = ParamLayout::of(model);
    const int k = model.joint_count();
    const int v_count = model.vertex_count();

    const std::vector<core::Vec3> offsets = body::pose_offsets(model, params.theta);

    // Row-major partials of each joint's vec(R - I) slot.
    std::vector<std::array<Eigen::Matrix<double, 9, 1>, 3>> dvec(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
    {
        const auto djac = body::rodrigues_jacobian(params.theta.segment<3>(3 * j));
        for (int c = 0; c < 3; ++c)
        {
            auto& v9 = dvec[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
            for (int row = 0; row < 3; ++row)
            {
                for (int col = 0; col < 3; ++col)
                {
                    v9[3 * row + col] = djac[static_cast<std::size_t>(c)](row, col);
                }
            }
        }
    }

    SkinnedVerticesJacobian out;
    out.layout = layout;
    out.positions.reserve(vertex_indices.size());
    out.jac.reserve(vertex_indices.size());

    for (const int vi : vertex_indices)
    {
        if (vi < 0 || vi >= v_count)
        {
            throw std::invalid_argument("skinned_vertices_jacobian: vertex index " + std::to_string(vi) +
                                        " out of range for " + std::to_string(v_count) + " vertices");
        }
        const core::Vec3 rest =
            fk.shaped.vertices[static_cast<std::size_t>(vi)] + offsets[static_cast<std::size_t>(vi)];

        // Rest-position partials.
        Eigen::Matrix<double, 3, Eigen::Dynamic> drest =
            Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, layout.size());
        for (int b = 0; b < layout.n_beta; ++b)
        {
            drest.col(b) = core::basis_column_offset(model.shape_basis, b, vi);
        }
        for (int j = 0; j < k; ++j)
        {
            for (int c = 0; c < 3; ++c)
            {
                core::Vec3 doff = core::Vec3::Zero();
                const auto& v9 = dvec[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
                for (int t = 0; t < 9; ++t)
                {
                    const Eigen::Index col = 9 * j + t;
                    doff += v9[t] * core::basis_column_offset(model.pose_basis, col, vi);
                }
                drest.col(layout.theta_offset() + 3 * j + c) = doff;
            }
        }

        // Skinning in delta form plus its chain rule.
        core::Vec3 position = rest;
        Eigen::Matrix<double, 3, Eigen::Dynamic> jac = drest;
        for (int j = 0; j < k; ++j)
        {
            const double w = model.skinning_weights(vi, j);
            if (w == 0.0)
            {
                continue;
            }
            const auto& world = fk.world[static_cast<std::size_t>(j)];
            position += w * (world.rotation * rest + world.translation - rest);
            for (int b = 0; b < layout.n_beta; ++b)
            {
                const core::Vec3 dr = drest.col(b);
                jac.col(b) += w * (world.rotation * dr +
                                   fk.dtrans_beta[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] - dr);
            }
            for (int e = 0; e < 3 * k; ++e)
            {
                const core::Vec3 dr = drest.col(layout.theta_offset() + e);
                jac.col(layout.theta_offset() + e) +=
                    w * (fk.drot_theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)] * rest +
                         world.rotation * dr +
                         fk.dtrans_theta[static_cast<std::size_t>(e)][static_cast<std::size_t>(j)] - dr);
            }
        }
        out.positions.push_back(position);
        out.jac.push_back(std::move(jac));
    }
    return out;
}

} // namespace fit
} // namespace morphfuse

#endif /* MORPHFUSE_FIT_JACOBIANS_HPP */
