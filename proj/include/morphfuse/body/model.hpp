/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/body/model.hpp
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

#ifndef MORPHFUSE_BODY_MODEL_HPP
#define MORPHFUSE_BODY_MODEL_HPP

#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace body {

/**
 * SMPL-style parametric body: template mesh, shape and pose blendshape
 * bases, a joint regressor, skinning weights and a kinematic tree.
 *
 * Bases use the (3V x n) layout of core::basis_offsets. The pose basis has
 * one 9-column slot per joint, consuming the row-major flattening of
 * R(theta_k) - I. The regressor is K x V, skinning weights V x K; both are
 * nonnegative with rows summing to 1. parents[k] is the parent joint index,
 * -1 for the single root.
 */
struct BodyModel
{
    core::Mesh template_mesh;
    Eigen::MatrixXd shape_basis;      // 3V x n_beta
    Eigen::MatrixXd pose_basis;       // 3V x 9K
    Eigen::MatrixXd joint_regressor;  // K x V
    Eigen::MatrixXd skinning_weights; // V x K
    std::vector<int> parents;         // K entries, -1 marks the root

    int vertex_count() const { return static_cast<int>(template_mesh.vertices.size()); }
    int joint_count() const { return static_cast<int>(parents.size()); }
    int shape_count() const { return static_cast<int>(shape_basis.cols()); }
};

/// Weak-perspective camera: uniform image scale plus a 2D translation.
struct Camera
{
    double scale = 1.0;
    core::Vec2 translation = core::Vec2::Zero();
};

/// Optimization variables of one body instance: shape, pose, camera.
struct BodyParams
{
    Eigen::VectorXd beta;  // n_beta shape coefficients
    Eigen::VectorXd theta; // 3K axis-angle entries, joint-major
    Camera camera;
};

/// 2D joint annotations: pixel positions plus 0/1 visibility flags.
struct Keypoints2D
{
    std::vector<core::Vec2> points;
    std::vector<int> visibility;
};

/**
 * Checks the model's structural invariants: matrix shapes, nonnegative
 * regressor/skinning entries with rows summing to 1 within 1e-9, and a
 * kinematic tree that is a single rooted tree.
 *
 * @throws std::invalid_argument naming the first violated invariant.
 */
inline void validate(const BodyModel& model)
{
    core::validate(model.template_mesh);
    const auto v = static_cast<Eigen::Index>(model.template_mesh.vertices.size());
    const auto k = static_cast<Eigen::Index>(model.parents.size());
    if (v == 0)
    {
        throw std::invalid_argument("body model: template has no vertices");
    }
    if (k == 0)
    {
        throw std::invalid_argument("body model: kinematic tree is empty");
    }
    if (model.shape_basis.rows() != 3 * v)
    {
        throw std::invalid_argument("body model: shape basis has " +
                                    std::to_string(model.shape_basis.rows()) + " rows, expected " +
                                    std::to_string(3 * v));
    }
    if (model.pose_basis.rows() != 3 * v || model.pose_basis.cols() != 9 * k)
    {
        throw std::invalid_argument("body model: pose basis is " + std::to_string(model.pose_basis.rows()) +
                                    "x" + std::to_string(model.pose_basis.cols()) + ", expected " +
                                    std::to_string(3 * v) + "x" + std::to_string(9 * k));
    }
    if (model.joint_regressor.rows() != k || model.joint_regressor.cols() != v)
    {
        throw std::invalid_argument("body model: joint regressor is " +
                                    std::to_string(model.joint_regressor.rows()) + "x" +
                                    std::to_string(model.joint_regressor.cols()) + ", expected " +
                                    std::to_string(k) + "x" + std::to_string(v));
    }
    if (model.skinning_weights.rows() != v || model.skinning_weights.cols() != k)
    {
        throw std::invalid_argument("body model: skinning weights are " +
                                    std::to_string(model.skinning_weights.rows()) + "x" +
                                    std::to_string(model.skinning_weights.cols()) + ", expected " +
                                    std::to_string(v) + "x" + std::to_string(k));
    }

    const auto check_stochastic_rows = [](const Eigen::MatrixXd& m, const char* name) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
        {
            double sum = 0.0;
            for (Eigen::Index c = 0; c < m.cols(); ++c)
            {
                const double w = m(r, c);
                if (!std::isfinite(w) || w < 0.0)
                {
                    throw std::invalid_argument(std::string("body model: ") + name + " row " +
                                                std::to_string(r) + " has a negative or non-finite entry");
                }
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-9)
            {
                throw std::invalid_argument(std::string("body model: ") + name + " row " +
                                            std::to_string(r) + " sums to " + std::to_string(sum) +
                                            ", expected 1");
            }
        }
    };
    check_stochastic_rows(model.joint_regressor, "joint regressor");
    check_stochastic_rows(model.skinning_weights, "skinning weights");

    // The parent array must describe one root and reach every joint without cycles.
    int root_count = 0;
    for (std::size_t j = 0; j < model.parents.size(); ++j)
    {
        const int p = model.parents[j];
        if (p == -1)
        {
            ++root_count;
        } else if (p < 0 || p >= static_cast<int>(k))
        {
            throw std::invalid_argument("body model: joint " + std::to_string(j) +
                                        " has out-of-range parent " + std::to_string(p));
        }
    }
    if (root_count != 1)
    {
        throw std::invalid_argument("body model: kinematic tree has " + std::to_string(root_count) +
                                    " roots, expected exactly 1");
    }
    for (std::size_t j = 0; j < model.parents.size(); ++j)
    {
        int hops = 0;
        int cur = static_cast<int>(j);
        while (model.parents[static_cast<std::size_t>(cur)] != -1)
        {
            cur = model.parents[static_cast<std::size_t>(cur)];
            if (++hops > static_cast<int>(k))
            {
                throw std::invalid_argument("body model: kinematic tree has a cycle through joint " +
                                            std::to_string(j));
            }
        }
    }
}

/**
 * Checks parameter sizes against a model and basic value sanity (finite
 * entries, positive camera scale).
 */
inline void validate(const BodyParams& params, const BodyModel& model)
{
    if (params.beta.size() != model.shape_basis.cols())
    {
        throw std::invalid_argument("body params: " + std::to_string(params.beta.size()) +
                                    " shape coefficients for a rank-" +
                                    std::to_string(model.shape_basis.cols()) + " basis");
    }
    if (params.theta.size() != 3 * model.joint_count())
    {
        throw std::invalid_argument("body params: theta has " + std::to_string(params.theta.size()) +
                                    " entries, expected " + std::to_string(3 * model.joint_count()));
    }
    if (!params.beta.allFinite() || !params.theta.allFinite() ||
        !std::isfinite(params.camera.scale) || !params.camera.translation.allFinite())
    {
        throw std::invalid_argument("body params: non-finite entry");
    }
    if (params.camera.scale <= 0.0)
    {
        throw std::invalid_argument("body params: camera scale must be positive, got " +
                                    std::to_string(params.camera.scale));
    }
}

/// Checks keypoint count against the model and that visibility flags are 0/1.
inline void validate(const Keypoints2D& keypoints, int joint_count)
{
    if (static_cast<int>(keypoints.points.size()) != joint_count ||
        static_cast<int>(keypoints.visibility.size()) != joint_count)
    {
        throw std::invalid_argument("keypoints: got " + std::to_string(keypoints.points.size()) +
                                    " points and " + std::to_string(keypoints.visibility.size()) +
                                    " visibility flags for " + std::to_string(joint_count) + " joints");
    }
    for (std::size_t i = 0; i < keypoints.visibility.size(); ++i)
    {
        if (keypoints.visibility[i] != 0 && keypoints.visibility[i] != 1)
        {
            throw std::invalid_argument("keypoints: visibility flag at joint " + std::to_string(i) +
                                        " must be 0 or 1");
        }
        if (!keypoints.points[i].allFinite())
        {
            throw std::invalid_argument("keypoints: non-finite point at joint " + std::to_string(i));
        }
    }
}

/// Zero shape and pose with a unit camera, sized for the given model.
inline BodyParams zero_params(const BodyModel& model)
{
    BodyParams params;
    params.beta = Eigen::VectorXd::Zero(model.shape_basis.cols());
    params.theta = Eigen::VectorXd::Zero(3 * model.joint_count());
    return params;
}

} // namespace body
} // namespace morphfuse

#endif /* MORPHFUSE_BODY_MODEL_HPP */
