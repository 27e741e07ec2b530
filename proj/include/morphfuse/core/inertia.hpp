/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/inertia.hpp
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

#ifndef MORPHFUSE_CORE_INERTIA_HPP
#define MORPHFUSE_CORE_INERTIA_HPP

#include "morphfuse/core/types.hpp"

#include <Eigen/Eigenvalues>

#include <span>
#include <stdexcept>
#include <vector>

namespace morphfuse {
namespace core {

inline Vec3 centroid(std::span<const Vec3> points)
{
    if (points.empty())
        throw std::invalid_argument("centroid: empty point set");
    Vec3 sum = Vec3::Zero();
    for (const Vec3& p : points)
        sum += p;
    return sum / static_cast<double>(points.size());
}

/**
 * Principal axes of a point set: the eigenvectors of the covariance
 * tensor about the centroid, as matrix columns ordered by descending
 * eigenvalue and flipped to a right-handed (det +1) frame.
 *
 * Column signs are canonicalized (largest-magnitude component positive,
 * then handedness restored on the last axis) so the result is
 * deterministic. Degenerate sets - fewer than 3 points, or all points
 * collinear - raise an error.
 */
inline Mat3 inertia_axes(std::span<const Vec3> points)
{
    if (points.size() < 3)
        throw std::invalid_argument("inertia_axes: need at least 3 points");
    const Vec3 mean = centroid(points);
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : points)
    {
        const Vec3 d = p - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(points.size());

    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("inertia_axes: eigendecomposition failed");

    // Eigen returns ascending eigenvalues; we want descending.
    Vec3 values;
    Mat3 axes;
    for (int i = 0; i < 3; ++i)
    {
        values[i] = eig.eigenvalues()[2 - i];
        axes.col(i) = eig.eigenvectors().col(2 - i);
    }
    if (!(values[0] > 0.0) || values[1] <= values[0] * 1e-12)
        throw std::invalid_argument(
            "inertia_axes: degenerate (collinear or coincident) point set");

    for (int i = 0; i < 3; ++i)
    {
        int arg = 0;
        axes.col(i).cwiseAbs().maxCoeff(&arg);
        if (axes(arg, i) < 0.0)
            axes.col(i) = -axes.col(i);
    }
    if (axes.determinant() < 0.0)
        axes.col(2) = -axes.col(2);
    return axes;
}

inline Mat3 inertia_axes(const std::vector<Vec3>& points)
{
    return inertia_axes(std::span<const Vec3>(points));
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_INERTIA_HPP */
