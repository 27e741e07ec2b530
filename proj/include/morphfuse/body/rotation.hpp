/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/body/rotation.hpp
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

#ifndef MORPHFUSE_BODY_ROTATION_HPP
#define MORPHFUSE_BODY_ROTATION_HPP

#include "morphfuse/core/types.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>

namespace morphfuse {
namespace body {

/// Cross-product (skew-symmetric) matrix of a 3-vector.
inline core::Mat3 skew(const core::Vec3& v)
{
    core::Mat3 m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

/**
 * Axis-angle to rotation matrix (Rodrigues' formula). The vector's direction
 * is the rotation axis, its norm the angle in radians. The zero vector maps
 * to the exact identity.
 */
inline core::Mat3 rodrigues(const core::Vec3& axis_angle)
{
    const double angle2 = axis_angle.squaredNorm();
    if (angle2 < 1e-16)
    {
        return core::Mat3::Identity();
    }
    const double angle = std::sqrt(angle2);
    const core::Vec3 axis = axis_angle / angle;
    const core::Mat3 k = skew(axis);
    return core::Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

/**
 * Derivatives of the Rodrigues rotation with respect to the three axis-angle
 * components, after Gallego & Yezzi (J Math Imaging Vis, 2015):
 *
 *   dR/dv_i = (v_i [v]x + [v x ((I - R) e_i)]x) / |v|^2 * R
 *
 * with the skew-of-basis-vector limit [e_i]x at v = 0. Returned in component
 * order (d/dv_x, d/dv_y, d/dv_z).
 */
inline std::array<core::Mat3, 3> rodrigues_jacobian(const core::Vec3& axis_angle)
{
    std::array<core::Mat3, 3> jac;
    const double angle2 = axis_angle.squaredNorm();
    if (angle2 < 1e-16)
    {
        for (int i = 0; i < 3; ++i)
        {
            jac[static_cast<std::size_t>(i)] = skew(core::Vec3::Unit(i));
        }
        return jac;
    }
    const core::Mat3 r = rodrigues(axis_angle);
    const core::Mat3 i_minus_r = core::Mat3::Identity() - r;
    for (int i = 0; i < 3; ++i)
    {
        const core::Vec3 e = core::Vec3::Unit(i);
        const core::Mat3 term =
            axis_angle[i] * skew(axis_angle) + skew(axis_angle.cross(i_minus_r * e));
        jac[static_cast<std::size_t>(i)] = (term / angle2) * r;
    }
    return jac;
}

/**
 * Row-major flattening of R - I, the 9-vector consumed by one pose-basis
 * slot: (m00, m01, m02, m10, ..., m22).
 */
inline Eigen::Matrix<double, 9, 1> vec_rotation_delta(const core::Mat3& r)
{
    Eigen::Matrix<double, 9, 1> v;
    const core::Mat3 delta = r - core::Mat3::Identity();
    for (int row = 0; row < 3; ++row)
    {
        for (int col = 0; col < 3; ++col)
        {
            v[3 * row + col] = delta(row, col);
        }
    }
    return v;
}

} // namespace body
} // namespace morphfuse

#endif /* MORPHFUSE_BODY_ROTATION_HPP */
