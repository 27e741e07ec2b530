/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/face/model.hpp
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

#ifndef MORPHFUSE_FACE_MODEL_HPP
#define MORPHFUSE_FACE_MODEL_HPP

#include "morphfuse/core/basis.hpp"
#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace face {

/**
 * Linear blendshape face model: a template shape with identity, expression
 * and texture bases, plus a per-vertex mean texture.
 *
 * Each basis is stored as a (3V x n) matrix; see core::basis_offsets for the
 * row layout. Basis columns are directions of correlated per-vertex change,
 * scaled by the corresponding coefficient.
 */
struct MorphableFaceModel
{
    core::Mesh template_shape;
    std::vector<core::Vec3> mean_texture; // per-vertex RGB in [0, 1]
    Eigen::MatrixXd identity_basis;       // 3V x n_id
    Eigen::MatrixXd expression_basis;     // 3V x n_exp
    Eigen::MatrixXd texture_basis;        // 3V x n_tex

    int vertex_count() const { return static_cast<int>(template_shape.vertices.size()); }
    int identity_count() const { return static_cast<int>(identity_basis.cols()); }
    int expression_count() const { return static_cast<int>(expression_basis.cols()); }
    int texture_count() const { return static_cast<int>(texture_basis.cols()); }
};

/// Coefficient vectors for one face instance; lengths must match the model's basis ranks.
struct FaceCoefficients
{
    Eigen::VectorXd identity;
    Eigen::VectorXd expression;
    Eigen::VectorXd texture;
};

/**
 * Checks the model's structural invariants: all bases share the template's
 * vertex count and every basis column has a finite, nonzero norm.
 *
 * @throws std::invalid_argument describing the first violated invariant.
 */
inline void validate(const MorphableFaceModel& model)
{
    core::validate(model.template_shape);
    const auto v = static_cast<Eigen::Index>(model.template_shape.vertices.size());
    if (v == 0)
    {
        throw std::invalid_argument("face model: template has no vertices");
    }
    if (static_cast<Eigen::Index>(model.mean_texture.size()) != v)
    {
        throw std::invalid_argument("face model: mean texture has " +
                                    std::to_string(model.mean_texture.size()) + " entries for " +
                                    std::to_string(v) + " vertices");
    }
    const struct
    {
        const char* name;
        const Eigen::MatrixXd& basis;
    } bases[] = { { "identity", model.identity_basis },
                  { "expression", model.expression_basis },
                  { "texture", model.texture_basis } };
    for (const auto& entry : bases)
    {
        if (entry.basis.rows() != 3 * v)
        {
            throw std::invalid_argument(std::string("face model: ") + entry.name + " basis has " +
                                        std::to_string(entry.basis.rows()) + " rows, expected " +
                                        std::to_string(3 * v));
        }
        for (Eigen::Index j = 0; j < entry.basis.cols(); ++j)
        {
            const double norm = entry.basis.col(j).norm();
            if (!std::isfinite(norm) || norm == 0.0)
            {
                throw std::invalid_argument(std::string("face model: ") + entry.name + " basis column " +
                                            std::to_string(j) + " has non-finite or zero norm");
            }
        }
    }
}

/**
 * Evaluates the blendshape model at the given coefficients.
 *
 * Geometry is template + identity and expression offsets; the per-vertex
 * color is the mean texture plus texture offsets, clamped to [0, 1].
 * Faces are copied from the template.
 *
 * @throws std::invalid_argument if a coefficient vector length does not
 *         match the corresponding basis rank.
 */
inline core::Mesh evaluate_3dmm(const MorphableFaceModel& model, const FaceCoefficients& coeffs)
{
    if (coeffs.identity.size() != model.identity_basis.cols())
    {
        throw std::invalid_argument("evaluate_3dmm: " + std::to_string(coeffs.identity.size()) +
                                    " identity coefficients for a rank-" +
                                    std::to_string(model.identity_basis.cols()) + " basis");
    }
    if (coeffs.expression.size() != model.expression_basis.cols())
    {
        throw std::invalid_argument("evaluate_3dmm: " + std::to_string(coeffs.expression.size()) +
                                    " expression coefficients for a rank-" +
                                    std::to_string(model.expression_basis.cols()) + " basis");
    }
    if (coeffs.texture.size() != model.texture_basis.cols())
    {
        throw std::invalid_argument("evaluate_3dmm: " + std::to_string(coeffs.texture.size()) +
                                    " texture coefficients for a rank-" +
                                    std::to_string(model.texture_basis.cols()) + " basis");
    }

    const auto id_offsets = core::basis_offsets(model.identity_basis, coeffs.identity);
    const auto exp_offsets = core::basis_offsets(model.expression_basis, coeffs.expression);
    const auto tex_offsets = core::basis_offsets(model.texture_basis, coeffs.texture);

    core::Mesh result;
    result.faces = model.template_shape.faces;
    result.vertices.resize(model.template_shape.vertices.size());
    result.colors.resize(model.template_shape.vertices.size());
    for (std::size_t i = 0; i < result.vertices.size(); ++i)
    {
        result.vertices[i] = model.template_shape.vertices[i] + id_offsets[i] + exp_offsets[i];
        const core::Vec3 color = model.mean_texture[i] + tex_offsets[i];
        result.colors[i] = color.cwiseMax(0.0).cwiseMin(1.0);
    }
    return result;
}

} // namespace face
} // namespace morphfuse

#endif /* MORPHFUSE_FACE_MODEL_HPP */
