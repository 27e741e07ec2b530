/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/procrustes.hpp
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

#ifndef MORPHFUSE_CORE_PROCRUSTES_HPP
#define MORPHFUSE_CORE_PROCRUSTES_HPP

#include "morphfuse/core/types.hpp"

#include <Eigen/SVD>

#include <span>
#include <stdexcept>
#include <vector>

namespace morphfuse {
namespace core {

/**
 * Closed-form similarity transform minimizing sum_i ||s R p_i + t - q_i||^2
 * over rotation R (det +1), scale s > 0, and translation t, for point
 * sets in index correspondence.
 *
 * This is the orthogonal-Procrustes solution with scale: SVD of the
 * cross-covariance with a sign correction on the smallest singular
 * direction keeps R a proper rotation.
 */
inline RigidTransform similarity_from_correspondences(std::span<const Vec3> source,
                                                      std::span<const Vec3> target)
{
    if (source.size() != target.size())
        throw std::invalid_argument("similarity_from_correspondences: size mismatch");
    if (source.size() < 3)
        throw std::invalid_argument("similarity_from_correspondences: need at least 3 pairs");

    const std::size_t n = source.size();
    Vec3 mean_src = Vec3::Zero();
    Vec3 mean_tgt = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i)
    {
        mean_src += source[i];
        mean_tgt += target[i];
    }
    mean_src /= static_cast<double>(n);
    mean_tgt /= static_cast<double>(n);

    Mat3 cross = Mat3::Zero();
    double var_src = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec3 ps = source[i] - mean_src;
        const Vec3 pt = target[i] - mean_tgt;
        cross += pt * ps.transpose();
        var_src += ps.squaredNorm();
    }
    cross /= static_cast<double>(n);
    var_src /= static_cast<double>(n);
    if (var_src <= 0.0)
        throw std::invalid_argument(
            "similarity_from_correspondences: source points are coincident");

    Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 sign = Mat3::Identity();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0)
        sign(2, 2) = -1.0;

    RigidTransform out;
    out.rotation = svd.matrixU() * sign * svd.matrixV().transpose();
    const double trace_ds = (svd.singularValues().asDiagonal() * sign).trace();
    out.scale = trace_ds / var_src;
    if (!(out.scale > 0.0))
        throw std::runtime_error(
            "similarity_from_correspondences: degenerate configuration (non-positive scale)");
    out.translation = mean_tgt - out.scale * (out.rotation * mean_src);
    return out;
}

inline RigidTransform similarity_from_correspondences(const std::vector<Vec3>& source,
                                                      const std::vector<Vec3>& target)
{
    return similarity_from_correspondences(std::span<const Vec3>(source),
                                           std::span<const Vec3>(target));
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_PROCRUSTES_HPP */
