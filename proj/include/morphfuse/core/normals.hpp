/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/normals.hpp
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

#ifndef MORPHFUSE_CORE_NORMALS_HPP
#define MORPHFUSE_CORE_NORMALS_HPP

#include "morphfuse/core/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace core {

enum class NormalWeighting
{
    Uniform, // every incident face contributes equally
    Angle    // each face weighted by its interior angle at the vertex
};

// Faces with twice-area below this are skipped during accumulation.
inline constexpr double kDegenerateFaceArea = 1e-12;

/**
 * Per-vertex normals as the weighted mean of incident face normals,
 * renormalized to unit length.
 *
 * Degenerate faces (area < 1e-12) contribute nothing. A vertex whose
 * incident faces are all degenerate raises an error naming the vertex;
 * a vertex referenced by no face at all gets the default normal (0,0,1).
 */
inline std::vector<Vec3> compute_vertex_normals(const Mesh& mesh, NormalWeighting weighting)
{
    if (mesh.faces.empty())
        throw std::invalid_argument("compute_vertex_normals: mesh has no faces");
    validate(mesh);

    std::vector<Vec3> accum(mesh.vertices.size(), Vec3::Zero());
    std::vector<char> referenced(mesh.vertices.size(), 0);
    std::vector<char> contributed(mesh.vertices.size(), 0);

    for (const auto& face : mesh.faces)
    {
        const Vec3& a = mesh.vertices[face[0]];
        const Vec3& b = mesh.vertices[face[1]];
        const Vec3& c = mesh.vertices[face[2]];
        for (int corner : face)
            referenced[corner] = 1;

        const Vec3 cross = (b - a).cross(c - a);
        const double twice_area = cross.norm();
        if (0.5 * twice_area < kDegenerateFaceArea)
            continue;
        const Vec3 fnormal = cross / twice_area;

        for (int corner = 0; corner < 3; ++corner)
        {
            double w = 1.0;
            if (weighting == NormalWeighting::Angle)
            {
                const Vec3& p = mesh.vertices[face[corner]];
                const Vec3& q = mesh.vertices[face[(corner + 1) % 3]];
                const Vec3& r = mesh.vertices[face[(corner + 2) % 3]];
                const Vec3 e1 = (q - p).normalized();
                const Vec3 e2 = (r - p).normalized();
                w = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
            }
            accum[face[corner]] += w * fnormal;
            contributed[face[corner]] = 1;
        }
    }

    std::vector<Vec3> normals(mesh.vertices.size());
    for (std::size_t i = 0; i < normals.size(); ++i)
    {
        if (!referenced[i])
        {
            normals[i] = Vec3(0.0, 0.0, 1.0);
            continue;
        }
        if (!contributed[i])
            throw std::runtime_error("compute_vertex_normals: vertex " + std::to_string(i) +
                                     " has no non-degenerate incident face");
        const double len = accum[i].norm();
        if (len <= 0.0)
            throw std::runtime_error("compute_vertex_normals: incident face normals cancel at vertex " +
                                     std::to_string(i));
        normals[i] = accum[i] / len;
    }
    return normals;
}

/// Returns a copy of the mesh with freshly computed per-vertex normals.
inline Mesh with_vertex_normals(const Mesh& mesh, NormalWeighting weighting)
{
    Mesh out = mesh;
    out.normals = compute_vertex_normals(mesh, weighting);
    return out;
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_NORMALS_HPP */
