/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/fuse/region.hpp
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

#ifndef MORPHFUSE_FUSE_REGION_HPP
#define MORPHFUSE_FUSE_REGION_HPP

#include "morphfuse/core/mesh.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morphfuse {
namespace fuse {

/**
 * Index sets steering the fusion: which body vertices to cut out, which
 * boundary vertices the seam loss measures, the fixed face-to-body seam
 * correspondence, and the neck vertices used for normal transfer.
 */
struct FaceRegionSpec
{
    std::vector<int> face_vertices;                 // body vertices to remove
    std::vector<int> seam_vertices;                 // body seam set S
    std::vector<std::pair<int, int>> correspondence; // (face vertex, body seam vertex) pairs
    std::vector<int> neck_vertices;                 // body vertices whose normals seed the transfer
};

/**
 * Validates a region spec against the meshes it indexes: all indices in
 * range, the seam disjoint from the removal set, every seam vertex adjacent
 * to the removal region, and an injective correspondence (both sides).
 *
 * @throws std::invalid_argument naming the first violation.
 */
inline void validate(const FaceRegionSpec& spec, const core::Mesh& body, const core::Mesh& face)
{
    const int body_count = static_cast<int>(body.vertices.size());
    const int face_count = static_cast<int>(face.vertices.size());

    const auto check_range = [](const std::vector<int>& indices, int count, const char* what) {
        for (const int i : indices)
        {
            if (i < 0 || i >= count)
            {
                throw std::invalid_argument("region spec: " + std::string(what) + " index " +
                                            std::to_string(i) + " out of range for " +
                                            std::to_string(count) + " vertices");
            }
        }
    };
    check_range(spec.face_vertices, body_count, "face_vertices");
    check_range(spec.seam_vertices, body_count, "seam_vertices");
    check_range(spec.neck_vertices, body_count, "neck_vertices");

    const std::set<int> removal(spec.face_vertices.begin(), spec.face_vertices.end());
    if (removal.size() != spec.face_vertices.size())
    {
        throw std::invalid_argument("region spec: duplicate face_vertices entry");
    }
    const std::set<int> seam(spec.seam_vertices.begin(), spec.seam_vertices.end());
    if (seam.size() != spec.seam_vertices.size())
    {
        throw std::invalid_argument("region spec: duplicate seam_vertices entry");
    }
    for (const int s : spec.seam_vertices)
    {
        if (removal.count(s) != 0)
        {
            throw std::invalid_argument("region spec: seam vertex " + std::to_string(s) +
                                        " is also listed for removal");
        }
    }

    // Each seam vertex must touch the removal boundary: it shares a face
    // with a removed vertex.
    if (!spec.seam_vertices.empty())
    {
        std::set<int> adjacent_to_removal;
        for (const auto& f : body.faces)
        {
            const bool touches = removal.count(f[0]) != 0 || removal.count(f[1]) != 0 ||
                                 removal.count(f[2]) != 0;
            if (touches)
            {
                adjacent_to_removal.insert(f.begin(), f.end());
            }
        }
        for (const int s : spec.seam_vertices)
        {
            if (adjacent_to_removal.count(s) == 0)
            {
                throw std::invalid_argument("region spec: seam vertex " + std::to_string(s) +
                                            " is not adjacent to the removal region");
            }
        }
    }

    std::set<int> seen_face, seen_body;
    for (const auto& [face_v, body_v] : spec.correspondence)
    {
        if (face_v < 0 || face_v >= face_count)
        {
            throw std::invalid_argument("region spec: correspondence face index " +
                                        std::to_string(face_v) + " out of range for " +
                                        std::to_string(face_count) + " vertices");
        }
        if (body_v < 0 || body_v >= body_count)
        {
            throw std::invalid_argument("region spec: correspondence body index " +
                                        std::to_string(body_v) + " out of range for " +
                                        std::to_string(body_count) + " vertices");
        }
        if (!seen_face.insert(face_v).second)
        {
            throw std::invalid_argument("region spec: face vertex " + std::to_string(face_v) +
                                        " appears in multiple correspondence pairs");
        }
        if (!seen_body.insert(body_v).second)
        {
            throw std::invalid_argument("region spec: body vertex " + std::to_string(body_v) +
                                        " appears in multiple correspondence pairs");
        }
    }
}

} // namespace fuse
} // namespace morphfuse

#endif /* MORPHFUSE_FUSE_REGION_HPP */
