/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/body/camera.hpp
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

#ifndef MORPHFUSE_BODY_CAMERA_HPP
#define MORPHFUSE_BODY_CAMERA_HPP

#include "morphfuse/body/model.hpp"
#include "morphfuse/core/types.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace body {

/**
 * Weak-perspective projection: (x, y, z) maps to scale * (x, y) +
 * translation; depth is dropped.
 *
 * @throws std::invalid_argument if scale is not positive.
 */
inline std::vector<core::Vec2> project(const std::vector<core::Vec3>& joints, const Camera& camera)
{
    if (camera.scale <= 0.0)
    {
        throw std::invalid_argument("project: camera scale must be positive, got " +
                                    std::to_string(camera.scale));
    }
    std::vector<core::Vec2> projected(joints.size());
    for (std::size_t i = 0; i < joints.size(); ++i)
    {
        projected[i] = camera.scale * joints[i].head<2>() + camera.translation;
    }
    return projected;
}

/**
 * Reprojection loss: the sum over joints of the visibility-masked Euclidean
 * distance between projected and target keypoints. The distances are not
 * squared.
 *
 * @throws std::invalid_argument on size mismatch.
 */
inline double joint_loss(const std::vector<core::Vec2>& projected, const Keypoints2D& targets)
{
    if (projected.size() != targets.points.size() || projected.size() != targets.visibility.size())
    {
        throw std::invalid_argument("joint_loss: " + std::to_string(projected.size()) +
                                    " projected joints vs " + std::to_string(targets.points.size()) +
                                    " targets with " + std::to_string(targets.visibility.size()) +
                                    " visibility flags");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < projected.size(); ++i)
    {
        if (targets.visibility[i] != 0)
        {
            loss += (projected[i] - targets.points[i]).norm();
        }
    }
    return loss;
}

} // namespace body
} // namespace morphfuse

#endif /* MORPHFUSE_BODY_CAMERA_HPP */
