/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/fuse/bridge.hpp
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

#ifndef MORPHFUSE_FUSE_BRIDGE_HPP
#define MORPHFUSE_FUSE_BRIDGE_HPP

#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/types.hpp"
#include "morphfuse/fuse/fusion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace fuse {

namespace detail {

/// In-plane frame for measuring angles around a bridge axis.
struct LoopFrame
{
    core::Vec3 mid;
    core::Vec3 u;
    core::Vec3 v;

    double angle(const core::Vec3& p) const
    {
        const core::Vec3 d = p - mid;
        return std::atan2(d.dot(v), d.dot(u));
    }
};

inline void check_loop(const core::Mesh& mesh, const std::vector<int>& loop, const char* caller)
{
    if (loop.size() < 3)
    {
        throw std::invalid_argument(std::string(caller) + ": a boundary loop needs at least 3 vertices");
    }
    std::set<int> seen;
    for (const int vi : loop)
    {
        if (vi < 0 || vi >= static_cast<int>(mesh.vertices.size()))
        {
            throw std::invalid_argument(std::string(caller) + ": loop vertex " + std::to_string(vi) +
                                        " out of range");
        }
        if (!seen.insert(vi).second)
        {
            throw std::invalid_argument(std::string(caller) + ": loop repeats vertex " + std::to_string(vi));
        }
    }
}

inline core::Vec3 loop_centroid(const core::Mesh& mesh, const std::vector<int>& loop)
{
    core::Vec3 c = core::Vec3::Zero();
    for (const int vi : loop)
    {
        c += mesh.vertices[static_cast<std::size_t>(vi)];
    }
    return c / static_cast<double>(loop.size());
}

inline core::Vec3 newell_normal(const core::Mesh& mesh, const std::vector<int>& loop)
{
    core::Vec3 n = core::Vec3::Zero();
    for (std::size_t k = 0; k < loop.size(); ++k)
    {
        const core::Vec3& p = mesh.vertices[static_cast<std::size_t>(loop[k])];
        const core::Vec3& q = mesh.vertices[static_cast<std::size_t>(loop[(k + 1) % loop.size()])];
        n.x() += (p.y() - q.y()) * (p.z() + q.z());
        n.y() += (p.z() - q.z()) * (p.x() + q.x());
        n.z() += (p.x() - q.x()) * (p.y() + q.y());
    }
    return n;
}

inline LoopFrame make_frame(const core::Mesh& mesh, const std::vector<int>& loop_a,
                            const std::vector<int>& loop_b)
{
    const core::Vec3 ca = loop_centroid(mesh, loop_a);
    const core::Vec3 cb = loop_centroid(mesh, loop_b);

    // The loops' own plane normals give the cleanest sweep axis; the
    // centroid offset only decides between near-collinear alternatives and
    // serves as fallback when a loop is too wrinkled for a Newell normal.
    core::Vec3 na = newell_normal(mesh, loop_a);
    core::Vec3 nb = newell_normal(mesh, loop_b);
    if (na.dot(nb) < 0.0)
    {
        nb = -nb;
    }
    core::Vec3 axis = na + nb;
    if (axis.norm() < 1e-12)
    {
        axis = cb - ca;
    }
    if (axis.norm() < 1e-12)
    {
        throw std::invalid_argument("bridge_boundaries: degenerate loop geometry, no bridging axis");
    }
    LoopFrame frame;
    frame.mid = 0.5 * (ca + cb);
    const core::Vec3 n = axis.normalized();
    const core::Vec3 pick = std::abs(n.x()) < 0.9 ? core::Vec3::UnitX() : core::Vec3::UnitY();
    frame.u = n.cross(pick).normalized();
    frame.v = n.cross(frame.u);
    return frame;
}

/// A loop rewound counterclockwise in the frame, starting at its
/// minimum-angle vertex, with monotonically unwrapped angles (one extra
/// entry closing the cycle).
struct OrientedLoop
{
    std::vector<int> order;
    std::vector<double> angles;
};

inline OrientedLoop orient_loop(const core::Mesh& mesh, const std::vector<int>& loop,
                                const LoopFrame& frame)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<int> order = loop;

    double area2 = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        const core::Vec3 d0 = mesh.vertices[static_cast<std::size_t>(order[k])] - frame.mid;
        const core::Vec3 d1 =
            mesh.vertices[static_cast<std::size_t>(order[(k + 1) % order.size()])] - frame.mid;
        area2 += d0.dot(frame.u) * d1.dot(frame.v) - d1.dot(frame.u) * d0.dot(frame.v);
    }
    if (area2 < 0.0)
    {
        std::reverse(order.begin(), order.end());
    }

    std::vector<double> raw(order.size());
    std::size_t start = 0;
    for (std::size_t k = 0; k < order.size(); ++k)
    {
        raw[k] = frame.angle(mesh.vertices[static_cast<std::size_t>(order[k])]);
        if (raw[k] < raw[start])
        {
            start = k;
        }
    }
    std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(start), order.end());
    std::rotate(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(start), raw.end());

    OrientedLoop oriented;
    oriented.order = std::move(order);
    oriented.angles.resize(oriented.order.size() + 1);
    oriented.angles[0] = raw[0];
    for (std::size_t k = 0; k + 1 <= oriented.order.size(); ++k)
    {
        const double next_raw = raw[(k + 1) % oriented.order.size()];
        double delta = std::fmod(next_raw - raw[k % oriented.order.size()], two_pi);
        if (delta < 0.0)
        {
            delta += two_pi;
        }
        oriented.angles[k + 1] = oriented.angles[k] + delta;
    }
    return oriented;
}

/**
 * Zips two oriented loops into a closed triangle band: m + n triangles in
 * which every loop edge appears exactly once and every diagonal exactly
 * twice, so the junction introduces no new boundary.
 */
inline std::vector<std::array<int, 3>> zip_loops(const OrientedLoop& a, const OrientedLoop& b)
{
    const std::size_t m = a.order.size();
    const std::size_t n = b.order.size();
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(m + n);
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < m || j < n)
    {
        bool advance_a = false;
        if (j == n)
        {
            advance_a = true;
        }
        else if (i < m)
        {
            advance_a = (a.angles[i + 1] - a.angles[0]) <= (b.angles[j + 1] - b.angles[0]);
        }
        if (advance_a)
        {
            triangles.push_back({ a.order[i], a.order[(i + 1) % m], b.order[j % n] });
            ++i;
        }
        else
        {
            triangles.push_back({ a.order[i % m], b.order[(j + 1) % n], b.order[j] });
            ++j;
        }
    }
    return triangles;
}

/// Position on the loop polygon at the given frame angle, by walking the
/// unwrapped angle table and interpolating within the containing segment.
inline core::Vec3 position_at_angle(const core::Mesh& mesh, const OrientedLoop& loop, double theta)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const std::size_t n = loop.order.size();
    double shifted = theta;
    while (shifted < loop.angles[0])
    {
        shifted += two_pi;
    }
    while (shifted >= loop.angles[0] + two_pi)
    {
        shifted -= two_pi;
    }
    std::size_t k = 0;
    while (k + 1 < n && loop.angles[k + 1] <= shifted)
    {
        ++k;
    }
    const double lo = loop.angles[k];
    const double hi = loop.angles[k + 1];
    const double t = hi > lo ? std::clamp((shifted - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    const core::Vec3& p = mesh.vertices[static_cast<std::size_t>(loop.order[k])];
    const core::Vec3& q = mesh.vertices[static_cast<std::size_t>(loop.order[(k + 1) % n])];
    return (1.0 - t) * p + t * q;
}

} // namespace detail

/**
 * Bridges two boundary loops of a fused mesh with a watertight triangle
 * band. The loops are swept around a common axis and zipped in angular
 * order; when one loop has more than twice the vertices of the other, an
 * intermediate ring of midpoints is inserted first so the band triangles
 * stay well shaped. Inserted ring vertices are tagged Provenance::Bridge.
 *
 * Existing faces are never removed and stale normals are dropped (callers
 * recompute shading after all topology edits).
 *
 * @throws std::invalid_argument for loops shorter than 3 vertices, loops
 *         that share vertices, repeated or out-of-range indices, or
 *         geometry with no usable bridging axis.
 */
inline FusionResult bridge_boundaries(const FusionResult& fused, const std::vector<int>& loop_a,
                                      const std::vector<int>& loop_b)
{
    detail::check_loop(fused.mesh, loop_a, "bridge_boundaries");
    detail::check_loop(fused.mesh, loop_b, "bridge_boundaries");
    for (const int vi : loop_a)
    {
        if (std::find(loop_b.begin(), loop_b.end(), vi) != loop_b.end())
        {
            throw std::invalid_argument("bridge_boundaries: loops overlap at vertex " + std::to_string(vi));
        }
    }

    FusionResult result = fused;
    result.mesh.normals.clear();
    const detail::LoopFrame frame = detail::make_frame(result.mesh, loop_a, loop_b);
    const detail::OrientedLoop a = detail::orient_loop(result.mesh, loop_a, frame);
    const detail::OrientedLoop b = detail::orient_loop(result.mesh, loop_b, frame);

    const std::size_t longer_size = std::max(a.order.size(), b.order.size());
    const std::size_t shorter_size = std::min(a.order.size(), b.order.size());
    std::vector<std::array<int, 3>> band;
    if (longer_size > 2 * shorter_size)
    {
        const detail::OrientedLoop& longer = a.order.size() >= b.order.size() ? a : b;
        const detail::OrientedLoop& shorter = a.order.size() >= b.order.size() ? b : a;

        std::vector<int> ring;
        ring.reserve(longer.order.size());
        const bool colored = result.mesh.has_colors();
        for (std::size_t l = 0; l < longer.order.size(); ++l)
        {
            const core::Vec3 on_longer = result.mesh.vertices[static_cast<std::size_t>(longer.order[l])];
            const double theta = frame.angle(on_longer);
            const core::Vec3 on_shorter = detail::position_at_angle(result.mesh, shorter, theta);
            ring.push_back(static_cast<int>(result.mesh.vertices.size()));
            result.mesh.vertices.push_back(0.5 * (on_longer + on_shorter));
            if (colored)
            {
                result.mesh.colors.push_back(result.mesh.colors[static_cast<std::size_t>(longer.order[l])]);
            }
            result.provenance.push_back(Provenance::Bridge);
        }
        const detail::OrientedLoop mid = detail::orient_loop(result.mesh, ring, frame);
        band = detail::zip_loops(longer, mid);
        const auto lower = detail::zip_loops(mid, shorter);
        band.insert(band.end(), lower.begin(), lower.end());
    }
    else
    {
        band = detail::zip_loops(a, b);
    }
    result.mesh.faces.insert(result.mesh.faces.end(), band.begin(), band.end());
    return result;
}

/**
 * Closes a boundary loop with a centroid fan: one new vertex at the loop
 * centroid (tagged Provenance::Bridge) and one triangle per loop edge.
 *
 * @throws std::invalid_argument for loops shorter than 3 vertices or with
 *         repeated or out-of-range indices.
 */
inline FusionResult fill_hole(const FusionResult& fused, const std::vector<int>& loop)
{
    detail::check_loop(fused.mesh, loop, "fill_hole");

    FusionResult result = fused;
    result.mesh.normals.clear();
    const int center = static_cast<int>(result.mesh.vertices.size());
    result.mesh.vertices.push_back(detail::loop_centroid(result.mesh, loop));
    if (result.mesh.has_colors())
    {
        core::Vec3 color = core::Vec3::Zero();
        for (const int vi : loop)
        {
            color += result.mesh.colors[static_cast<std::size_t>(vi)];
        }
        result.mesh.colors.push_back(color / static_cast<double>(loop.size()));
    }
    result.provenance.push_back(Provenance::Bridge);
    for (std::size_t k = 0; k < loop.size(); ++k)
    {
        result.mesh.faces.push_back({ loop[k], loop[(k + 1) % loop.size()], center });
    }
    return result;
}

} // namespace fuse
} // namespace morphfuse

#endif /* MORPHFUSE_FUSE_BRIDGE_HPP */
