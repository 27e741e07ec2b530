/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/mesh.hpp
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

#ifndef MORPHFUSE_CORE_MESH_HPP
#define MORPHFUSE_CORE_MESH_HPP

#include "morphfuse/core/types.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace core {

/**
 * Triangle mesh: vertex positions, faces as vertex-index triples, and
 * optional per-vertex color (RGB in [0,1]) and unit normals.
 *
 * Positions are in model units; the metric interpretation (mm, m, ...)
 * is up to the caller. Indices are 0-based in memory; file formats that
 * use 1-based indices convert in the I/O layer.
 */
struct Mesh
{
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> colors;  // empty, or one RGB triple per vertex
    std::vector<Vec3> normals; // empty, or one unit vector per vertex

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }
    bool has_colors() const { return !colors.empty(); }
    bool has_normals() const { return !normals.empty(); }
};

/**
 * Checks the Mesh invariants and throws std::invalid_argument naming the
 * first violation: face indices in range, no degenerate index triples,
 * attribute arrays sized to the vertex count, normals unit length
 * (within 1e-6).
 */
inline void validate(const Mesh& mesh)
{
    const int vcount = static_cast<int>(mesh.vertices.size());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    {
        const auto& face = mesh.faces[f];
        for (int idx : face)
        {
            if (idx < 0 || idx >= vcount)
                throw std::invalid_argument("Mesh: face " + std::to_string(f) +
                                            " references vertex " + std::to_string(idx) +
                                            " but the mesh has " + std::to_string(vcount) +
                                            " vertices");
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
            throw std::invalid_argument("Mesh: face " + std::to_string(f) +
                                        " references the same vertex twice");
    }
    if (!mesh.colors.empty() && mesh.colors.size() != mesh.vertices.size())
        throw std::invalid_argument("Mesh: color count " + std::to_string(mesh.colors.size()) +
                                    " does not match vertex count " +
                                    std::to_string(mesh.vertices.size()));
    if (!mesh.normals.empty())
    {
        if (mesh.normals.size() != mesh.vertices.size())
            throw std::invalid_argument("Mesh: normal count " +
                                        std::to_string(mesh.normals.size()) +
                                        " does not match vertex count " +
                                        std::to_string(mesh.vertices.size()));
        for (std::size_t i = 0; i < mesh.normals.size(); ++i)
        {
            if (std::abs(mesh.normals[i].norm() - 1.0) > 1e-6)
                throw std::invalid_argument("Mesh: normal " + std::to_string(i) +
                                            " is not unit length");
        }
    }
}

/// Applies a similarity transform to all vertex positions (normals rotate).
inline Mesh transformed(const Mesh& mesh, const RigidTransform& t)
{
    Mesh out = mesh;
    for (auto& v : out.vertices)
        v = t.apply(v);
    for (auto& n : out.normals)
        n = t.apply_direction(n);
    return out;
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_MESH_HPP */
