/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/submesh.hpp
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

#ifndef MORPHFUSE_CORE_SUBMESH_HPP
#define MORPHFUSE_CORE_SUBMESH_HPP

#include "morphfuse/core/mesh.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace core {

/// A vertex-selected submesh plus the index maps between it and its parent.
struct Submesh
{
    Mesh mesh;
    std::vector<int> to_parent;   // submesh vertex -> parent vertex
    std::vector<int> from_parent; // parent vertex -> submesh vertex, -1 if dropped
};

/**
 * Extracts the submesh over a vertex selection: kept vertices appear in
 * ascending parent order, and a face survives iff all three of its vertices
 * are selected. Per-vertex colors and normals are carried over.
 *
 * @throws std::invalid_argument on out-of-range or duplicate selection
 *         indices.
 */
inline Submesh extract_submesh(const Mesh& mesh, const std::vector<int>& vertex_indices)
{
    const int v_count = static_cast<int>(mesh.vertices.size());
    Submesh out;
    out.from_parent.assign(static_cast<std::size_t>(v_count), -1);
    std::vector<char> selected(static_cast<std::size_t>(v_count), 0);
    for (const int vi : vertex_indices)
    {
        if (vi < 0 || vi >= v_count)
        {
            throw std::invalid_argument("extract_submesh: vertex index " + std::to_string(vi) +
                                        " out of range for " + std::to_string(v_count) + " vertices");
        }
        if (selected[static_cast<std::size_t>(vi)])
        {
            throw std::invalid_argument("extract_submesh: duplicate vertex index " + std::to_string(vi));
        }
        selected[static_cast<std::size_t>(vi)] = 1;
    }
    for (int vi = 0; vi < v_count; ++vi)
    {
        if (selected[static_cast<std::size_t>(vi)])
        {
            out.from_parent[static_cast<std::size_t>(vi)] = static_cast<int>(out.to_parent.size());
            out.to_parent.push_back(vi);
            out.mesh.vertices.push_back(mesh.vertices[static_cast<std::size_t>(vi)]);
            if (!mesh.colors.empty())
            {
                out.mesh.colors.push_back(mesh.colors[static_cast<std::size_t>(vi)]);
            }
            if (!mesh.normals.empty())
            {
                out.mesh.normals.push_back(mesh.normals[static_cast<std::size_t>(vi)]);
            }
        }
    }
    for (const auto& face : mesh.faces)
    {
        const int a = out.from_parent[static_cast<std::size_t>(face[0])];
        const int b = out.from_parent[static_cast<std::size_t>(face[1])];
        const int c = out.from_parent[static_cast<std::size_t>(face[2])];
        if (a >= 0 && b >= 0 && c >= 0)
        {
            out.mesh.faces.push_back({ a, b, c });
        }
    }
    return out;
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_SUBMESH_HPP */
