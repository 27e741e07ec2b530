/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/types.hpp
 *
 * Copyright 2026 The morphfuse authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef MORPHFUSE_CORE_TYPES_HPP
#define MORPHFUSE_CORE_TYPES_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace morphfuse {
namespace core {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/**
 * A similarity transform: p -> scale * rotation * p + translation.
 *
 * Rotation must be orthonormal with determinant +1 and scale strictly
 * positive; validate() enforces both.
 */
struct RigidTransform
{
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }

    /// Rotates a direction vector; scale and translation do not apply.
    Vec3 apply_direction(const Vec3& d) const { return rotation * d; }

    /// this ∘ other: apply `other` first, then this transform.
    RigidTransform compose(const RigidTransform& other) const
    {
        RigidTransform out;
        out.rotation = rotation * other.rotation;
        out.scale = scale * other.scale;
        out.translation = scale * (rotation * other.translation) + translation;
        return out;
    }

    RigidTransform inverse() const
    {
        RigidTransform out;
        out.rotation = rotation.transpose();
        out.scale = 1.0 / scale;
        out.translation = -(out.scale * (out.rotation * translation));
        return out;
    }
};

inline void validate(const RigidTransform& t)
{
    if (!(t.scale > 0.0))
        throw std::invalid_argument("RigidTransform: scale must be positive, got " +
                                    std::to_string(t.scale));
    const Mat3 rtr = t.rotation.transpose() * t.rotation;
    if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("RigidTransform: rotation is not orthonormal");
    if (t.rotation.determinant() < 0.0)
        throw std::invalid_argument("RigidTransform: rotation determinant must be +1");
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_TYPES_HPP */
