/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/metrics/metrics.hpp
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

#ifndef MORPHFUSE_METRICS_METRICS_HPP
#define MORPHFUSE_METRICS_METRICS_HPP

#include "morphfuse/core/kdtree.hpp"
#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/normals.hpp"
#include "morphfuse/core/procrustes.hpp"
#include "morphfuse/core/types.hpp"
#include "morphfuse/fuse/icp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace metrics {

/// Euclidean ball used to restrict surface metrics to a region of interest.
struct CropSpec
{
    core::Vec3 center = core::Vec3::Zero();
    double radius = 0.0;
};

/**
 * Vertex-to-vertex error: mean Euclidean distance between corresponding
 * vertices. The meshes must share vertex count and index correspondence.
 *
 * @throws std::invalid_argument on count mismatch or empty meshes.
 */
inline double v2v(const core::Mesh& pred, const core::Mesh& gt)
{
    if (pred.vertices.size() != gt.vertices.size())
    {
        throw std::invalid_argument("v2v: vertex count mismatch (" + std::to_string(pred.vertices.size()) +
                                    " vs " + std::to_string(gt.vertices.size()) + ")");
    }
    if (pred.vertices.empty())
    {
        throw std::invalid_argument("v2v: empty meshes");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pred.vertices.size(); ++i)
    {
        total += (pred.vertices[i] - gt.vertices[i]).norm();
    }
    return total / static_cast<double>(pred.vertices.size());
}

/// A similarity alignment together with the transformed points.
struct ProcrustesResult
{
    core::RigidTransform transform;
    std::vector<core::Vec3> aligned;
};

/**
 * Closed-form similarity Procrustes: finds scale, rotation, and
 * translation minimizing the summed squared distance from transformed pred
 * points to gt points, and returns the transformed points alongside.
 *
 * @throws std::invalid_argument on count mismatch, fewer than 3 pairs, or
 *         a degenerate (coincident) pred configuration.
 */
inline ProcrustesResult procrustes_align(const std::vector<core::Vec3>& pred,
                                         const std::vector<core::Vec3>& gt)
{
    ProcrustesResult result;
    result.transform = core::similarity_from_correspondences(pred, gt);
    result.aligned.reserve(pred.size());
    double aligned_sq = 0.0;
    double raw_sq = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
    {
        result.aligned.push_back(result.transform.apply(pred[i]));
        aligned_sq += (result.aligned[i] - gt[i]).squaredNorm();
        raw_sq += (pred[i] - gt[i]).squaredNorm();
    }
    // The identity is itself a similarity transform, so the alignment must
    // never lose to it. Rounding in the SVD path would otherwise leave a
    // nonzero residual on clouds that already match.
    if (raw_sq <= aligned_sq)
    {
        result.transform = core::RigidTransform{};
        result.aligned.assign(pred.begin(), pred.end());
    }
    return result;
}

/**
 * Mean per-joint position error: mean Euclidean distance between matched
 * joint arrays.
 *
 * @throws std::invalid_argument on count mismatch or empty arrays.
 */
inline double mpjpe(const std::vector<core::Vec3>& pred, const std::vector<core::Vec3>& gt)
{
    if (pred.size() != gt.size())
    {
        throw std::invalid_argument("mpjpe: joint count mismatch (" + std::to_string(pred.size()) +
                                    " vs " + std::to_string(gt.size()) + ")");
    }
    if (pred.empty())
    {
        throw std::invalid_argument("mpjpe: empty joint arrays");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
    {
        total += (pred[i] - gt[i]).norm();
    }
    return total / static_cast<double>(pred.size());
}

/// Procrustes-aligned MPJPE: similarity alignment first, then mpjpe.
inline double pa_mpjpe(const std::vector<core::Vec3>& pred, const std::vector<core::Vec3>& gt)
{
    return mpjpe(procrustes_align(pred, gt).aligned, gt);
}

/// Procrustes-aligned V2V: similarity alignment of the vertex clouds, then v2v.
inline double pa_v2v(const core::Mesh& pred, const core::Mesh& gt)
{
    const ProcrustesResult aligned = procrustes_align(pred.vertices, gt.vertices);
    core::Mesh moved = pred;
    moved.vertices = aligned.aligned;
    return v2v(moved, gt);
}

/// Mean and per-point distances of a symmetric point-to-plane evaluation.
struct PointToPlaneResult
{
    double mean = 0.0;
    std::vector<double> pred_to_gt; // one entry per (cropped) pred vertex
    std::vector<double> gt_to_pred; // one entry per (cropped) gt vertex
};

namespace detail {

inline std::vector<int> crop_indices(const core::Mesh& mesh, const std::optional<CropSpec>& crop,
                                     const char* which)
{
    std::vector<int> kept;
    kept.reserve(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    {
        if (!crop || (mesh.vertices[i] - crop->center).norm() <= crop->radius)
        {
            kept.push_back(static_cast<int>(i));
        }
    }
    if (kept.empty())
    {
        throw std::invalid_argument(std::string("point_to_plane: crop region is empty on the ") + which +
                                    " mesh");
    }
    return kept;
}

inline double mean_plane_distance(const std::vector<core::Vec3>& queries,
                                  const std::vector<core::Vec3>& points,
                                  const std::vector<core::Vec3>& normals, std::vector<double>& per_point)
{
    const core::KdTree3 tree(points);
    per_point.clear();
    per_point.reserve(queries.size());
    double total = 0.0;
    for (const auto& q : queries)
    {
        const std::size_t hit = static_cast<std::size_t>(tree.nearest(q));
        const double d = std::abs(normals[hit].dot(q - points[hit]));
        per_point.push_back(d);
        total += d;
    }
    return total / static_cast<double>(queries.size());
}

} // namespace detail

/**
 * Symmetric point-to-plane distance between two meshes: for each vertex of
 * one mesh, the unsigned distance to the tangent plane at the nearest
 * vertex of the other (plane through that vertex, normal to its
 * angle-weighted vertex normal), averaged both ways and halved.
 *
 * Normals are computed on the full meshes before any cropping, so crop
 * boundaries do not distort them. With crop set, only vertices inside the
 * ball take part, on both sides. With prealign, the (cropped) pred cloud
 * is first registered to the (cropped) gt cloud by ICP; prealign breaks
 * the symmetry of the measure, without it the result is symmetric in its
 * arguments.
 *
 * @throws std::invalid_argument if either mesh has no faces, the crop
 *         radius is nonpositive, or the crop region is empty.
 */
inline PointToPlaneResult point_to_plane(const core::Mesh& pred, const core::Mesh& gt,
                                         const std::optional<CropSpec>& crop = std::nullopt,
                                         bool prealign = false)
{
    if (pred.faces.empty() || gt.faces.empty())
    {
        throw std::invalid_argument("point_to_plane: both meshes need faces to define tangent planes");
    }
    if (crop && crop->radius <= 0.0)
    {
        throw std::invalid_argument("point_to_plane: crop radius must be positive");
    }

    const std::vector<core::Vec3> pred_normals_full =
        core::compute_vertex_normals(pred, core::NormalWeighting::Angle);
    const std::vector<core::Vec3> gt_normals_full =
        core::compute_vertex_normals(gt, core::NormalWeighting::Angle);

    const std::vector<int> pred_kept = detail::crop_indices(pred, crop, "pred");
    const std::vector<int> gt_kept = detail::crop_indices(gt, crop, "gt");

    std::vector<core::Vec3> pred_points, pred_normals, gt_points, gt_normals;
    for (const int i : pred_kept)
    {
        pred_points.push_back(pred.vertices[static_cast<std::size_t>(i)]);
        pred_normals.push_back(pred_normals_full[static_cast<std::size_t>(i)]);
    }
    for (const int i : gt_kept)
    {
        gt_points.push_back(gt.vertices[static_cast<std::size_t>(i)]);
        gt_normals.push_back(gt_normals_full[static_cast<std::size_t>(i)]);
    }

    if (prealign)
    {
        core::Mesh source, target;
        source.vertices = pred_points;
        target.vertices = gt_points;
        const core::RigidTransform align = fuse::icp_align(source, target);
        for (auto& p : pred_points)
        {
            p = align.apply(p);
        }
        for (auto& n : pred_normals)
        {
            n = align.rotation * n;
        }
    }

    PointToPlaneResult result;
    const double forward = detail::mean_plane_distance(pred_points, gt_points, gt_normals, result.pred_to_gt);
    const double backward =
        detail::mean_plane_distance(gt_points, pred_points, pred_normals, result.gt_to_pred);
    result.mean = 0.5 * (forward + backward);
    return result;
}

/// Regular 3D grid: node (i,j,k) sits at origin + spacing * (i,j,k).
struct GridSpec3
{
    core::Vec3 origin = core::Vec3::Zero();
    double spacing = 1.0;
    std::array<int, 3> dims = { 0, 0, 0 };
};

/**
 * Distance-field discrepancy: samples the unsigned distance to the nearest
 * vertex of each mesh on every grid node and returns the mean absolute
 * difference of the two fields. Symmetric in its arguments by definition.
 *
 * @throws std::invalid_argument on an empty mesh, nonpositive spacing, or
 *         grid dimensions below 1.
 */
inline double df_discrepancy(const core::Mesh& pred, const core::Mesh& gt, const GridSpec3& grid)
{
    if (pred.vertices.empty() || gt.vertices.empty())
    {
        throw std::invalid_argument("df_discrepancy: empty mesh");
    }
    if (grid.spacing <= 0.0)
    {
        throw std::invalid_argument("df_discrepancy: grid spacing must be positive");
    }
    if (grid.dims[0] < 1 || grid.dims[1] < 1 || grid.dims[2] < 1)
    {
        throw std::invalid_argument("df_discrepancy: grid dimensions must be at least 1");
    }

    const core::KdTree3 pred_tree(pred.vertices);
    const core::KdTree3 gt_tree(gt.vertices);
    double total = 0.0;
    for (int k = 0; k < grid.dims[2]; ++k)
    {
        for (int j = 0; j < grid.dims[1]; ++j)
        {
            for (int i = 0; i < grid.dims[0]; ++i)
            {
                const core::Vec3 node = grid.origin + grid.spacing * core::Vec3(i, j, k);
                total += std::abs(pred_tree.nearest_distance(node) - gt_tree.nearest_distance(node));
            }
        }
    }
    const double nodes =
        static_cast<double>(grid.dims[0]) * static_cast<double>(grid.dims[1]) * static_cast<double>(grid.dims[2]);
    return total / nodes;
}

/**
 * Builds a cubic grid covering both meshes with 10% padding on every side.
 *
 * @throws std::invalid_argument if either mesh is empty or resolution < 2.
 */
inline GridSpec3 make_default_grid(const core::Mesh& pred, const core::Mesh& gt, int resolution = 32)
{
    if (pred.vertices.empty() || gt.vertices.empty())
    {
        throw std::invalid_argument("make_default_grid: empty mesh");
    }
    if (resolution < 2)
    {
        throw std::invalid_argument("make_default_grid: resolution must be at least 2");
    }
    core::Vec3 lo = pred.vertices.front();
    core::Vec3 hi = lo;
    const auto absorb = [&](const std::vector<core::Vec3>& points) {
        for (const auto& p : points)
        {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    };
    absorb(pred.vertices);
    absorb(gt.vertices);

    const core::Vec3 center = 0.5 * (lo + hi);
    double half = 0.5 * (hi - lo).maxCoeff();
    half = std::max(half, 1e-6) * 1.2;

    GridSpec3 grid;
    grid.origin = center - core::Vec3::Constant(half);
    grid.spacing = 2.0 * half / static_cast<double>(resolution - 1);
    grid.dims = { resolution, resolution, resolution };
    return grid;
}

} // namespace metrics
} // namespace morphfuse

#endif /* MORPHFUSE_METRICS_METRICS_HPP */
