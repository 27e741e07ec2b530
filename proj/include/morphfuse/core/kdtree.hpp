/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/kdtree.hpp
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

#ifndef MORPHFUSE_CORE_KDTREE_HPP
#define MORPHFUSE_CORE_KDTREE_HPP

#include "morphfuse/core/mesh.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace morphfuse {
namespace core {

/**
 * Static kd-tree over a fixed set of 3D points.
 *
 * Query semantics are identical to an exhaustive scan: the nearest point
 * by Euclidean distance, with exact distance ties broken toward the
 * lowest point index. Pruning keeps equal-distance subtrees alive so the
 * tie rule holds exactly.
 */
class KdTree3
{
public:
    KdTree3() = default;

    explicit KdTree3(std::vector<Vec3> points) : points_(std::move(points))
    {
        index_.resize(points_.size());
        std::iota(index_.begin(), index_.end(), 0);
        if (!points_.empty())
            build(0, static_cast<int>(points_.size()), 0);
    }

    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }

    /// Index of the nearest point; ties break to the lowest index.
    int nearest(const Vec3& query) const
    {
        if (points_.empty())
            throw std::invalid_argument("KdTree3::nearest: empty point set");
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        search(0, static_cast<int>(points_.size()), 0, query, best, best_d2);
        return best;
    }

    double nearest_distance(const Vec3& query) const
    {
        return (points_[nearest(query)] - query).norm();
    }

private:
    // in-place median build over index_[begin,end)
    void build(int begin, int end, int axis)
    {
        if (end - begin <= 1)
            return;
        const int mid = begin + (end - begin) / 2;
        std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                         [&](int a, int b) {
                             const double pa = points_[a][axis];
                             const double pb = points_[b][axis];
                             return pa < pb || (pa == pb && a < b);
                         });
        const int next = (axis + 1) % 3;
        build(begin, mid, next);
        build(mid + 1, end, next);
    }

    void search(int begin, int end, int axis, const Vec3& query, int& best,
                double& best_d2) const
    {
        if (begin >= end)
            return;
        const int mid = begin + (end - begin) / 2;
        const int node = index_[mid];
        const double d2 = (points_[node] - query).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && node < best))
        {
            best = node;
            best_d2 = d2;
        }
        const double delta = query[axis] - points_[node][axis];
        const int next = (axis + 1) % 3;
        if (delta < 0.0)
        {
            search(begin, mid, next, query, best, best_d2);
            if (delta * delta <= best_d2)
                search(mid + 1, end, next, query, best, best_d2);
        }
        else
        {
            search(mid + 1, end, next, query, best, best_d2);
            if (delta * delta <= best_d2)
                search(begin, mid, next, query, best, best_d2);
        }
    }

    std::vector<Vec3> points_;
    std::vector<int> index_;
};

/**
 * Index of the mesh vertex closest to `query`; ties break to the lowest
 * index. Errors on an empty mesh.
 */
inline int nearest_vertex(const Vec3& query, const Mesh& mesh)
{
    if (mesh.vertices.empty())
        throw std::invalid_argument("nearest_vertex: mesh has no vertices");
    int best = 0;
    double best_d2 = (mesh.vertices[0] - query).squaredNorm();
    for (std::size_t i = 1; i < mesh.vertices.size(); ++i)
    {
        const double d2 = (mesh.vertices[i] - query).squaredNorm();
        if (d2 < best_d2)
        {
            best = static_cast<int>(i);
            best_d2 = d2;
        }
    }
    return best;
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_KDTREE_HPP */
