/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: tests/oracles.hpp
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

#ifndef MORPHFUSE_TESTS_ORACLES_HPP
#define MORPHFUSE_TESTS_ORACLES_HPP

#include "morphfuse/core/types.hpp"
#include "morphfuse/face/sdf.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

/*
 * Deliberately naive reference implementations. Each one recomputes a
 * quantity the library produces by a faster or more structured algorithm,
 * using nothing but loops and first principles, so a test comparing the two
 * exercises the real code path rather than its own mirror image.
 */
namespace oracles {

/// All-pairs squared Euclidean distance (in cells) to the nearest set cell.
inline std::vector<std::int64_t> brute_edt_squared(const morphfuse::face::BinaryGrid& mask)
{
    std::vector<std::pair<int, int>> sources;
    for (int r = 0; r < mask.rows; ++r)
    {
        for (int c = 0; c < mask.cols; ++c)
        {
            if (mask.at(r, c))
            {
                sources.emplace_back(r, c);
            }
        }
    }
    std::vector<std::int64_t> out(static_cast<std::size_t>(mask.rows) * mask.cols,
                                  std::numeric_limits<std::int64_t>::max());
    for (int r = 0; r < mask.rows; ++r)
    {
        for (int c = 0; c < mask.cols; ++c)
        {
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (const auto& [sr, sc] : sources)
            {
                const std::int64_t dr = r - sr;
                const std::int64_t dc = c - sc;
                best = std::min(best, dr * dr + dc * dc);
            }
            out[static_cast<std::size_t>(r) * mask.cols + c] = best;
        }
    }
    return out;
}

/// Nearest point by linear scan; ties go to the lowest index.
inline int linear_nearest(const std::vector<morphfuse::core::Vec3>& points,
                          const morphfuse::core::Vec3& query)
{
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        const double d2 = (points[i] - query).squaredNorm();
        if (d2 < best_d2)
        {
            best_d2 = d2;
            best = static_cast<int>(i);
        }
    }
    return best;
}

/// Linear blend skinning as the literal weighted sum of per-joint rigid maps.
inline morphfuse::core::Vec3 brute_lbs(const morphfuse::core::Vec3& vertex,
                                       const Eigen::VectorXd& weights,
                                       const std::vector<morphfuse::core::Mat3>& rotations,
                                       const std::vector<morphfuse::core::Vec3>& translations)
{
    morphfuse::core::Vec3 out = morphfuse::core::Vec3::Zero();
    for (int k = 0; k < weights.size(); ++k)
    {
        out += weights[k] * (rotations[static_cast<std::size_t>(k)] * vertex +
                             translations[static_cast<std::size_t>(k)]);
    }
    return out;
}

/// Central finite-difference gradient of a scalar function.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double step)
{
    Eigen::VectorXd grad(x.size());
    for (int i = 0; i < x.size(); ++i)
    {
        Eigen::VectorXd hi = x;
        Eigen::VectorXd lo = x;
        hi[i] += step;
        lo[i] -= step;
        grad[i] = (f(hi) - f(lo)) / (2.0 * step);
    }
    return grad;
}

/// Count of mesh edges that belong to exactly one face, by scanning all faces.
inline int brute_boundary_edge_count(const morphfuse::core::Mesh& mesh)
{
    std::vector<std::pair<int, int>> edges;
    for (const auto& face : mesh.faces)
    {
        for (int e = 0; e < 3; ++e)
        {
            const int a = face[static_cast<std::size_t>(e)];
            const int b = face[static_cast<std::size_t>((e + 1) % 3)];
            edges.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    int count = 0;
    for (std::size_t i = 0; i < edges.size(); ++i)
    {
        int incidence = 0;
        for (std::size_t j = 0; j < edges.size(); ++j)
        {
            if (edges[j] == edges[i])
            {
                ++incidence;
            }
        }
        bool first = true;
        for (std::size_t j = 0; j < i; ++j)
        {
            if (edges[j] == edges[i])
            {
                first = false;
                break;
            }
        }
        if (incidence == 1 && first)
        {
            ++count;
        }
    }
    return count;
}

} // namespace oracles

#endif /* MORPHFUSE_TESTS_ORACLES_HPP */
