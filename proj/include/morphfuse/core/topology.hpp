/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/topology.hpp
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

#ifndef MORPHFUSE_CORE_TOPOLOGY_HPP
#define MORPHFUSE_CORE_TOPOLOGY_HPP

#include "morphfuse/core/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morphfuse {
namespace core {

/**
 * A closed cycle of boundary edges (edges used by exactly one face),
 * stored as the ordered vertex indices around the cycle. The loop
 * follows the winding of the faces it borders.
 */
struct BoundaryLoop
{
    std::vector<int> vertices;

    std::size_t size() const { return vertices.size(); }
};

namespace detail {

inline std::uint64_t edge_key(int a, int b)
{
    const std::uint32_t lo = static_cast<std::uint32_t>(std::min(a, b));
    const std::uint32_t hi = static_cast<std::uint32_t>(std::max(a, b));
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

} // namespace detail

/// Undirected edge -> number of incident faces. Keys are (min,max) packed.
inline std::map<std::uint64_t, int> edge_face_counts(const Mesh& mesh)
{
    std::map<std::uint64_t, int> counts;
    for (const auto& f : mesh.faces)
    {
        counts[detail::edge_key(f[0], f[1])]++;
        counts[detail::edge_key(f[1], f[2])]++;
        counts[detail::edge_key(f[2], f[0])]++;
    }
    return counts;
}

/**
 * Extracts every maximal cycle of boundary edges. A closed mesh yields an
 * empty list. Requires edge-manifoldness: an edge used by three or more
 * faces raises an error naming the edge.
 *
 * Output is deterministic: each loop starts at its smallest vertex index
 * and loops are sorted by that starting index.
 */
inline std::vector<BoundaryLoop> boundary_loops(const Mesh& mesh)
{
    validate(mesh);
    const auto counts = edge_face_counts(mesh);
    for (const auto& [key, count] : counts)
    {
        if (count > 2)
            throw std::runtime_error("boundary_loops: non-manifold edge (" +
                                     std::to_string(static_cast<int>(key & 0xffffffffu)) + ", " +
                                     std::to_string(static_cast<int>(key >> 32)) + ") used by " +
                                     std::to_string(count) + " faces");
    }

    // Directed boundary edges follow the face winding: a boundary edge
    // appears in exactly one face, in exactly one direction.
    std::map<int, std::vector<int>> successors; // tail vertex -> head candidates
    std::size_t boundary_edge_count = 0;
    for (const auto& f : mesh.faces)
    {
        const int corners[3][2] = {{f[0], f[1]}, {f[1], f[2]}, {f[2], f[0]}};
        for (const auto& e : corners)
        {
            if (counts.at(detail::edge_key(e[0], e[1])) == 1)
            {
                successors[e[0]].push_back(e[1]);
                ++boundary_edge_count;
            }
        }
    }
    for (auto& [tail, heads] : successors)
        std::sort(heads.begin(), heads.end());

    // Walk cycles, always taking the smallest unused continuation so the
    // result does not depend on face order.
    std::map<std::pair<int, int>, bool> used;
    for (const auto& [tail, heads] : successors)
        for (int head : heads)
            used[{tail, head}] = false;

    std::vector<BoundaryLoop> loops;
    for (auto& [start_tail, heads] : successors)
    {
        for (int start_head : heads)
        {
            if (used[{start_tail, start_head}])
                continue;
            BoundaryLoop loop;
            int tail = start_tail;
            int head = start_head;
            for (;;)
            {
                used[{tail, head}] = true;
                loop.vertices.push_back(tail);
                if (head == start_tail)
                    break;
                auto it = successors.find(head);
                if (it == successors.end())
                    throw std::runtime_error("boundary_loops: boundary does not close at vertex " +
                                             std::to_string(head));
                int next = -1;
                for (int cand : it->second)
                {
                    if (!used[{head, cand}])
                    {
                        next = cand;
                        break;
                    }
                }
                if (next < 0)
                    throw std::runtime_error("boundary_loops: boundary does not close at vertex " +
                                             std::to_string(head));
                tail = head;
                head = next;
            }

            // canonical start: smallest vertex index first
            auto min_it = std::min_element(loop.vertices.begin(), loop.vertices.end());
            std::rotate(loop.vertices.begin(), min_it, loop.vertices.end());
            loops.push_back(std::move(loop));
        }
    }
    std::sort(loops.begin(), loops.end(), [](const BoundaryLoop& a, const BoundaryLoop& b) {
        return a.vertices.front() < b.vertices.front();
    });

    std::size_t total = 0;
    for (const auto& l : loops)
        total += l.size();
    if (total != boundary_edge_count)
        throw std::runtime_error("boundary_loops: traversal covered " + std::to_string(total) +
                                 " of " + std::to_string(boundary_edge_count) +
                                 " boundary edges");
    return loops;
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_TOPOLOGY_HPP */
