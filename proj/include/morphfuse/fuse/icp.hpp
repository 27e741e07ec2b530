/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/fuse/icp.hpp
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

#ifndef MORPHFUSE_FUSE_ICP_HPP
#define MORPHFUSE_FUSE_ICP_HPP

#include "morphfuse/core/inertia.hpp"
#include "morphfuse/core/kdtree.hpp"
#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/procrustes.hpp"
#include "morphfuse/core/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace fuse {

/// Alignment transform plus the mean correspondence-distance trace.
struct IcpResult
{
    core::RigidTransform transform;
    std::vector<double> trace; // mean nearest-vertex distance after init and each accepted update
    int iterations = 0;        // accepted similarity re-solves
};

namespace detail {

inline double mean_nearest_distance(const std::vector<core::Vec3>& source,
                                    const core::RigidTransform& transform, const core::KdTree3& tree,
                                    const std::vector<core::Vec3>& target)
{
    double total = 0.0;
    for (const auto& p : source)
    {
        const core::Vec3 moved = transform.apply(p);
        total += (moved - target[static_cast<std::size_t>(tree.nearest(moved))]).norm();
    }
    return total / static_cast<double>(source.size());
}

} // namespace detail

/**
 * Registers the source onto the target with a similarity transform
 * (rotation, translation, uniform scale).
 *
 * Initialization aligns the principal inertia axes of the two vertex sets:
 * since eigenvectors carry no canonical sign, all four right-handed sign
 * assignments are tried and the candidate with the smallest mean
 * nearest-vertex distance wins; scale starts at the RMS-radius ratio. Each
 * subsequent iteration fixes nearest-vertex correspondences and re-solves
 * the closed-form similarity from the original source points, which makes
 * the mean correspondence distance non-increasing; iteration stops when the
 * improvement drops below tol or after max_iter re-solves.
 *
 * @throws std::invalid_argument for degenerate inputs (fewer than 3
 *         vertices or collinear geometry).
 */
inline IcpResult icp_align_detail(const core::Mesh& source, const core::Mesh& target, int max_iter = 50,
                                  double tol = 1e-10)
{
    if (source.vertices.size() < 3 || target.vertices.size() < 3)
    {
        throw std::invalid_argument("icp_align: both meshes need at least 3 vertices, got " +
                                    std::to_string(source.vertices.size()) + " and " +
                                    std::to_string(target.vertices.size()));
    }
    if (max_iter < 0 || tol < 0.0)
    {
        throw std::invalid_argument("icp_align: max_iter and tol must be nonnegative");
    }

    const auto& src = source.vertices;
    const auto& tgt = target.vertices;
    const core::KdTree3 tree(tgt);

    // Principal-axes initialization with sign disambiguation.
    const core::Mat3 axes_src = core::inertia_axes(src);
    const core::Mat3 axes_tgt = core::inertia_axes(tgt);
    const core::Vec3 centroid_src = core::centroid(src);
    const core::Vec3 centroid_tgt = core::centroid(tgt);

    double var_src = 0.0, var_tgt = 0.0;
    for (const auto& p : src)
    {
        var_src += (p - centroid_src).squaredNorm();
    }
    for (const auto& p : tgt)
    {
        var_tgt += (p - centroid_tgt).squaredNorm();
    }
    var_src /= static_cast<double>(src.size());
    var_tgt /= static_cast<double>(tgt.size());
    if (var_src <= 0.0)
    {
        throw std::invalid_argument("icp_align: source has coincident vertices only");
    }
    const double scale0 = std::sqrt(var_tgt / var_src);

    core::RigidTransform best_init;
    double best_dist = std::numeric_limits<double>::infinity();
    // Right-handed sign flips of the source axes: identity and the three
    // 180-degree rotations about a principal axis.
    const double sign_sets[4][3] = { { 1, 1, 1 }, { 1, -1, -1 }, { -1, 1, -1 }, { -1, -1, 1 } };
    for (const auto& signs : sign_sets)
    {
        core::Mat3 flipped = axes_src;
        for (int c = 0; c < 3; ++c)
        {
            flipped.col(c) *= signs[c];
        }
        core::RigidTransform candidate;
        candidate.rotation = axes_tgt * flipped.transpose();
        candidate.scale = scale0;
        candidate.translation = centroid_tgt - candidate.scale * (candidate.rotation * centroid_src);
        const double dist = detail::mean_nearest_distance(src, candidate, tree, tgt);
        if (dist < best_dist)
        {
            best_dist = dist;
            best_init = candidate;
        }
    }

    IcpResult result;
    result.transform = best_init;
    result.trace.push_back(best_dist);

    std::vector<core::Vec3> corresponded(src.size());
    for (int iteration = 0; iteration < max_iter; ++iteration)
    {
        // Fix correspondences under the current transform, then re-solve the
        // similarity from the original source points in closed form.
        for (std::size_t i = 0; i < src.size(); ++i)
        {
            const core::Vec3 moved = result.transform.apply(src[i]);
            corresponded[i] = tgt[static_cast<std::size_t>(tree.nearest(moved))];
        }
        const core::RigidTransform refined = core::similarity_from_correspondences(src, corresponded);
        const double dist = detail::mean_nearest_distance(src, refined, tree, tgt);
        const double previous = result.trace.back();
        if (dist >= previous)
        {
            break; // the re-solve no longer helps; keep the better transform
        }
        result.transform = refined;
        result.trace.push_back(dist);
        ++result.iterations;
        if (previous - dist < tol)
        {
            break;
        }
    }
    return result;
}

/// Convenience wrapper returning only the transform.
inline core::RigidTransform icp_align(const core::Mesh& source, const core::Mesh& target,
                                      int max_iter = 50, double tol = 1e-10)
{
    return icp_align_detail(source, target, max_iter, tol).transform;
}

} // namespace fuse
} // namespace morphfuse

#endif /* MORPHFUSE_FUSE_ICP_HPP */
