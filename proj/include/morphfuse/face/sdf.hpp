/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/face/sdf.hpp
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

#ifndef MORPHFUSE_FACE_SDF_HPP
#define MORPHFUSE_FACE_SDF_HPP

#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/normals.hpp"
#include "morphfuse/core/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morphfuse {
namespace face {

/// Binary occupancy grid (row-major), e.g. a rasterized contour or region mask.
struct BinaryGrid
{
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> cells; // row-major, rows*cols entries, nonzero = set

    BinaryGrid() = default;
    BinaryGrid(int r, int c) : rows(r), cols(c), cells(static_cast<std::size_t>(r) * c, 0) {}

    bool at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c] != 0; }
    void set(int r, int c, bool value = true)
    {
        cells[static_cast<std::size_t>(r) * cols + c] = value ? 1 : 0;
    }
};

/**
 * Signed distance values sampled on a regular 2D grid. grid(r, c) is the
 * value at the point origin + spacing * (c, r): columns advance along x,
 * rows along y.
 */
struct ScalarField2D
{
    Eigen::MatrixXd grid; // rows x cols
    core::Vec2 origin = core::Vec2::Zero();
    double spacing = 1.0;
};

/// Checks spacing positivity and that every grid value is finite.
inline void validate(const ScalarField2D& field)
{
    if (field.spacing <= 0.0)
    {
        throw std::invalid_argument("scalar field: spacing must be positive, got " +
                                    std::to_string(field.spacing));
    }
    if (field.grid.size() == 0)
    {
        throw std::invalid_argument("scalar field: empty grid");
    }
    if (!field.grid.allFinite())
    {
        throw std::invalid_argument("scalar field: grid contains non-finite values");
    }
}

namespace detail {

// Distance value acting as infinity for cells with no set cell in their
// column; squares must stay well inside the int64 range.
constexpr std::int64_t edt_inf = std::int64_t{ 1 } << 20;

/**
 * 1D squared-distance transform (lower envelope of parabolas). f holds the
 * squared distance contributed by each source position; d receives
 * min_i (q - i)^2 + f[i] for every q. All values are exact integers; the
 * double-precision intersection abscissas cannot mis-rank parabolas because
 * integer-valued parabolas that differ at an integer abscissa differ by at
 * least 1 there, while the rounding error is far below 1/(2n).
 */
inline void edt_1d(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& d)
{
    const int n = static_cast<int>(f.size());
    std::vector<int> v(static_cast<std::size_t>(n), 0);
    std::vector<double> z(static_cast<std::size_t>(n) + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q)
    {
        double s = 0.0;
        while (true)
        {
            const int p = v[static_cast<std::size_t>(k)];
            s = (static_cast<double>(f[static_cast<std::size_t>(q)] -
                                     f[static_cast<std::size_t>(p)]) +
                 static_cast<double>(static_cast<std::int64_t>(q) * q -
                                     static_cast<std::int64_t>(p) * p)) /
                (2.0 * (q - p));
            if (s > z[static_cast<std::size_t>(k)])
            {
                break;
            }
            --k;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    d.resize(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q)
    {
        while (z[static_cast<std::size_t>(k) + 1] < q)
        {
            ++k;
        }
        const std::int64_t dq = q - v[static_cast<std::size_t>(k)];
        d[static_cast<std::size_t>(q)] = dq * dq + f[static_cast<std::size_t>(v[static_cast<std::size_t>(k)])];
    }
}

} // namespace detail

/**
 * Exact Euclidean distance transform of a binary contour mask, signed by an
 * explicit inside mask.
 *
 * Runs the two-pass algorithm entirely in integer squared distances (per
 * column scans for the vertical term, then a 1D lower-envelope pass along
 * each row), so the result equals the brute-force all-pairs minimum exactly.
 * Each cell value is spacing * sqrt(d2) in model units, negated where
 * inside_mask is set.
 *
 * @throws std::invalid_argument if line_mask has no set cell or the mask
 *         shapes disagree.
 */
inline ScalarField2D edt_sdf(const BinaryGrid& line_mask, double spacing, const BinaryGrid& inside_mask,
                             const core::Vec2& origin = core::Vec2::Zero())
{
    if (spacing <= 0.0)
    {
        throw std::invalid_argument("edt_sdf: spacing must be positive");
    }
    if (line_mask.rows <= 0 || line_mask.cols <= 0)
    {
        throw std::invalid_argument("edt_sdf: empty grid");
    }
    if (inside_mask.rows != line_mask.rows || inside_mask.cols != line_mask.cols)
    {
        throw std::invalid_argument("edt_sdf: inside_mask is " + std::to_string(inside_mask.rows) + "x" +
                                    std::to_string(inside_mask.cols) + " but line_mask is " +
                                    std::to_string(line_mask.rows) + "x" + std::to_string(line_mask.cols));
    }
    bool any_set = false;
    for (const auto cell : line_mask.cells)
    {
        if (cell != 0)
        {
            any_set = true;
            break;
        }
    }
    if (!any_set)
    {
        throw std::invalid_argument("edt_sdf: line_mask has no set cell");
    }

    const int rows = line_mask.rows;
    const int cols = line_mask.cols;

    // Vertical pass: per-column distance (in rows) to the nearest set cell.
    std::vector<std::int64_t> row_dist(static_cast<std::size_t>(rows) * cols, detail::edt_inf);
    for (int c = 0; c < cols; ++c)
    {
        std::int64_t d = detail::edt_inf;
        for (int r = 0; r < rows; ++r)
        {
            if (line_mask.at(r, c))
            {
                d = 0;
            } else if (d < detail::edt_inf)
            {
                ++d;
            }
            row_dist[static_cast<std::size_t>(r) * cols + c] = d;
        }
        d = detail::edt_inf;
        for (int r = rows - 1; r >= 0; --r)
        {
            if (line_mask.at(r, c))
            {
                d = 0;
            } else if (d < detail::edt_inf)
            {
                ++d;
            }
            auto& cell = row_dist[static_cast<std::size_t>(r) * cols + c];
            cell = std::min(cell, d);
        }
    }

    // Horizontal pass: combine squared vertical distances across columns.
    ScalarField2D field;
    field.grid.resize(rows, cols);
    field.origin = origin;
    field.spacing = spacing;
    std::vector<std::int64_t> f(static_cast<std::size_t>(cols));
    std::vector<std::int64_t> d2;
    for (int r = 0; r < rows; ++r)
    {
        for (int c = 0; c < cols; ++c)
        {
            const std::int64_t rd = row_dist[static_cast<std::size_t>(r) * cols + c];
            f[static_cast<std::size_t>(c)] = rd >= detail::edt_inf ? detail::edt_inf * detail::edt_inf
                                                                   : rd * rd;
        }
        detail::edt_1d(f, d2);
        for (int c = 0; c < cols; ++c)
        {
            const double dist = spacing * std::sqrt(static_cast<double>(d2[static_cast<std::size_t>(c)]));
            field.grid(r, c) = inside_mask.at(r, c) ? -dist : dist;
        }
    }
    return field;
}

namespace detail {

/// Bilinear interpolation at fractional grid coordinates (gx along columns, gy along rows).
inline double bilinear_at(const ScalarField2D& field, double gx, double gy)
{
    const int max_c = static_cast<int>(field.grid.cols()) - 1;
    const int max_r = static_cast<int>(field.grid.rows()) - 1;
    int c0 = static_cast<int>(std::floor(gx));
    int r0 = static_cast<int>(std::floor(gy));
    c0 = std::max(0, std::min(c0, max_c - 1));
    r0 = std::max(0, std::min(r0, max_r - 1));
    const double tx = gx - c0;
    const double ty = gy - r0;
    const double v00 = field.grid(r0, c0);
    const double v01 = field.grid(r0, c0 + 1);
    const double v10 = field.grid(r0 + 1, c0);
    const double v11 = field.grid(r0 + 1, c0 + 1);
    return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11);
}

} // namespace detail

/**
 * Samples the field at a 2D point: value by bilinear interpolation,
 * gradient by central differences of the interpolated field with step =
 * spacing. The point must lie inside the domain with a one-cell margin so
 * the gradient stencil stays in range.
 *
 * @throws std::invalid_argument on out-of-domain queries.
 */
inline std::pair<double, core::Vec2> sample_sdf(const ScalarField2D& field, const core::Vec2& p)
{
    if (field.grid.rows() < 3 || field.grid.cols() < 3)
    {
        throw std::invalid_argument("sample_sdf: field must be at least 3x3 for gradient queries");
    }
    const double gx = (p.x() - field.origin.x()) / field.spacing;
    const double gy = (p.y() - field.origin.y()) / field.spacing;
    const double max_x = static_cast<double>(field.grid.cols()) - 2.0;
    const double max_y = static_cast<double>(field.grid.rows()) - 2.0;
    if (!(gx >= 1.0 && gx <= max_x && gy >= 1.0 && gy <= max_y))
    {
        throw std::invalid_argument("sample_sdf: point (" + std::to_string(p.x()) + ", " +
                                    std::to_string(p.y()) +
                                    ") is outside the field domain (one-cell margin required)");
    }
    const double value = detail::bilinear_at(field, gx, gy);
    const double dx =
        (detail::bilinear_at(field, gx + 1.0, gy) - detail::bilinear_at(field, gx - 1.0, gy)) /
        (2.0 * field.spacing);
    const double dy =
        (detail::bilinear_at(field, gx, gy + 1.0) - detail::bilinear_at(field, gx, gy - 1.0)) /
        (2.0 * field.spacing);
    return { value, core::Vec2(dx, dy) };
}

/// Axis-aligned plane selecting which two vertex coordinates the SDF refines.
enum class ProjectionPlane
{
    XY, // refine x and y, keep z
    XZ, // refine x and z, keep y
    YZ  // refine y and z, keep x
};

/**
 * Moves each vertex against the SDF gradient: the in-plane coordinates are
 * updated as q' = q - lambda * SDF(q) * grad SDF(q), the out-of-plane
 * coordinate stays fixed, and connectivity is untouched. With multiple
 * iterations the step is reapplied at the fresh position.
 *
 * @throws std::invalid_argument if lambda or iterations is negative or a
 *         projected vertex falls outside the field domain.
 */
inline core::Mesh refine_with_sdf(const core::Mesh& mesh, const ScalarField2D& field, double lambda,
                                  ProjectionPlane plane = ProjectionPlane::XY, int iterations = 1)
{
    if (lambda < 0.0)
    {
        throw std::invalid_argument("refine_with_sdf: lambda must be nonnegative");
    }
    if (iterations < 0)
    {
        throw std::invalid_argument("refine_with_sdf: iteration count must be nonnegative");
    }
    int axis_u = 0, axis_v = 1;
    switch (plane)
    {
    case ProjectionPlane::XY: axis_u = 0; axis_v = 1; break;
    case ProjectionPlane::XZ: axis_u = 0; axis_v = 2; break;
    case ProjectionPlane::YZ: axis_u = 1; axis_v = 2; break;
    }
    core::Mesh result = mesh;
    for (std::size_t i = 0; i < result.vertices.size(); ++i)
    {
        core::Vec2 q(result.vertices[i][axis_u], result.vertices[i][axis_v]);
        for (int it = 0; it < iterations; ++it)
        {
            std::pair<double, core::Vec2> sample;
            try
            {
                sample = sample_sdf(field, q);
            } catch (const std::invalid_argument&)
            {
                throw std::invalid_argument("refine_with_sdf: vertex " + std::to_string(i) +
                                            " projects outside the field domain");
            }
            q -= lambda * sample.first * sample.second;
        }
        result.vertices[i][axis_u] = q.x();
        result.vertices[i][axis_v] = q.y();
    }
    if (!result.normals.empty())
    {
        result.normals = core::compute_vertex_normals(result, core::NormalWeighting::Angle);
    }
    return result;
}

} // namespace face
} // namespace morphfuse

#endif /* MORPHFUSE_FACE_SDF_HPP */
