/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/face/displacement.hpp
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

#ifndef MORPHFUSE_FACE_DISPLACEMENT_HPP
#define MORPHFUSE_FACE_DISPLACEMENT_HPP

#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/normals.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace face {

/// Per-vertex signed scalar offsets, applied along the vertex normal.
using DisplacementMap = std::vector<double>;

/**
 * Offsets every vertex along its angle-weighted normal by the corresponding
 * displacement value. Topology and any per-vertex color are unchanged;
 * normals are recomputed for the displaced geometry.
 *
 * @throws std::invalid_argument if the map length does not match the vertex
 *         count or a displacement value is not finite; errors from normal
 *         computation (degenerate vertices) propagate.
 */
inline core::Mesh apply_displacement(const core::Mesh& mesh, const DisplacementMap& dmap)
{
    if (dmap.size() != mesh.vertices.size())
    {
        throw std::invalid_argument("apply_displacement: map length " + std::to_string(dmap.size()) +
                                    " does not match vertex count " +
                                    std::to_string(mesh.vertices.size()));
    }
    for (std::size_t i = 0; i < dmap.size(); ++i)
    {
        if (!std::isfinite(dmap[i]))
        {
            throw std::invalid_argument("apply_displacement: non-finite displacement at vertex " +
                                        std::to_string(i));
        }
    }
    const auto normals = core::compute_vertex_normals(mesh, core::NormalWeighting::Angle);
    core::Mesh result = mesh;
    for (std::size_t i = 0; i < result.vertices.size(); ++i)
    {
        result.vertices[i] += dmap[i] * normals[i];
    }
    if (!result.normals.empty())
    {
        result.normals = core::compute_vertex_normals(result, core::NormalWeighting::Angle);
    }
    return result;
}

} // namespace face
} // namespace morphfuse

#endif /* MORPHFUSE_FACE_DISPLACEMENT_HPP */
