/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/fuse/shading.hpp
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

#ifndef MORPHFUSE_FUSE_SHADING_HPP
#define MORPHFUSE_FUSE_SHADING_HPP

#include "morphfuse/core/kdtree.hpp"
#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/normals.hpp"
#include "morphfuse/core/types.hpp"
#include "morphfuse/fuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace fuse {

/**
 * Recomputes angle-weighted vertex normals over the whole fused mesh, so
 * shading is smooth across the seam and bridge band instead of inheriting
 * normals computed on the parts in isolation.
 */
inline FusionResult smooth_merged_normals(const FusionResult& fused)
{
    FusionResult result = fused;
    result.mesh.normals = core::compute_vertex_normals(result.mesh, core::NormalWeighting::Angle);
    return result;
}

/**
 * Overrides the normals of fused face and bridge vertices near the neck by
 * the normal of the nearest designated neck vertex on the body, hiding the
 * shading discontinuity where the pasted face meets the torso. Vertex
 * positions are untouched.
 *
 * @param fused fused result whose mesh already has normals.
 * @param body posed body mesh with normals; neck_vertices index into it.
 * @param neck_vertices body vertices forming the neck region.
 * @param radius influence radius around the neck centroid; pass a
 *        nonpositive value to derive it as 1.25 times the neck's own
 *        spread around its centroid.
 *
 * @throws std::invalid_argument if either mesh lacks normals, the neck set
 *         is empty, or a neck index is out of range.
 */
inline FusionResult transfer_neck_normals(const FusionResult& fused, const core::Mesh& body,
                                          const std::vector<int>& neck_vertices, double radius = 0.0)
{
    if (!fused.mesh.has_normals())
    {
        throw std::invalid_argument("transfer_neck_normals: fused mesh has no normals");
    }
    if (!body.has_normals())
    {
        throw std::invalid_argument("transfer_neck_normals: body mesh has no normals");
    }
    if (neck_vertices.empty())
    {
        throw std::invalid_argument("transfer_neck_normals: empty neck vertex set");
    }

    std::vector<int> neck = neck_vertices;
    std::sort(neck.begin(), neck.end());
    neck.erase(std::unique(neck.begin(), neck.end()), neck.end());
    std::vector<core::Vec3> neck_points;
    neck_points.reserve(neck.size());
    core::Vec3 center = core::Vec3::Zero();
    for (const int vi : neck)
    {
        if (vi < 0 || vi >= static_cast<int>(body.vertices.size()))
        {
            throw std::invalid_argument("transfer_neck_normals: neck vertex " + std::to_string(vi) +
                                        " out of range");
        }
        neck_points.push_back(body.vertices[static_cast<std::size_t>(vi)]);
        center += neck_points.back();
    }
    center /= static_cast<double>(neck.size());

    if (radius <= 0.0)
    {
        double spread = 0.0;
        for (const auto& p : neck_points)
        {
            spread = std::max(spread, (p - center).norm());
        }
        radius = 1.25 * spread;
    }

    // Sorted ascending body indices make nearest-neighbour ties resolve to
    // the lowest body index, matching the exhaustive scan convention.
    const core::KdTree3 tree(neck_points);
    FusionResult result = fused;
    for (std::size_t vi = 0; vi < result.mesh.vertices.size(); ++vi)
    {
        if (result.provenance[vi] == Provenance::Body)
        {
            continue;
        }
        const core::Vec3& p = result.mesh.vertices[vi];
        if ((p - center).norm() > radius)
        {
            continue;
        }
        const int hit = tree.nearest(p);
        result.mesh.normals[vi] = body.normals[static_cast<std::size_t>(neck[static_cast<std::size_t>(hit)])];
    }
    return result;
}

} // namespace fuse
} // namespace morphfuse

#endif /* MORPHFUSE_FUSE_SHADING_HPP */
