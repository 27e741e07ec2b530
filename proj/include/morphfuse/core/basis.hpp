/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/core/basis.hpp
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

#ifndef MORPHFUSE_CORE_BASIS_HPP
#define MORPHFUSE_CORE_BASIS_HPP

#include "morphfuse/core/types.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace core {

/**
 * Evaluates a linear blendshape basis: returns the per-vertex 3D offsets
 * basis * coefficients.
 *
 * The basis is a (3V x n) matrix whose row v + V*c holds coordinate c of
 * vertex v, i.e. all x components first, then y, then z (the layout of a
 * column-major (V, 3, n) array).
 *
 * @throws std::invalid_argument on dimension mismatch.
 */
inline std::vector<Vec3> basis_offsets(const Eigen::MatrixXd& basis, const Eigen::VectorXd& coefficients)
{
    if (basis.rows() % 3 != 0)
    {
        throw std::invalid_argument("basis_offsets: basis row count " + std::to_string(basis.rows()) +
                                    " is not a multiple of 3");
    }
    if (basis.cols() != coefficients.size())
    {
        throw std::invalid_argument("basis_offsets: basis has " + std::to_string(basis.cols()) +
                                    " columns but " + std::to_string(coefficients.size()) +
                                    " coefficients were given");
    }
    const Eigen::Index vertex_count = basis.rows() / 3;
    const Eigen::VectorXd flat = basis * coefficients;
    std::vector<Vec3> offsets(static_cast<std::size_t>(vertex_count));
    for (Eigen::Index v = 0; v < vertex_count; ++v)
    {
        offsets[static_cast<std::size_t>(v)] =
            Vec3(flat[v], flat[vertex_count + v], flat[2 * vertex_count + v]);
    }
    return offsets;
}

/// Reads the per-vertex 3D offset of one basis column (coefficient = 1).
inline Vec3 basis_column_offset(const Eigen::MatrixXd& basis, Eigen::Index column, Eigen::Index vertex)
{
    const Eigen::Index vertex_count = basis.rows() / 3;
    return Vec3(basis(vertex, column), basis(vertex_count + vertex, column),
                basis(2 * vertex_count + vertex, column));
}

} // namespace core
} // namespace morphfuse

#endif /* MORPHFUSE_CORE_BASIS_HPP */
