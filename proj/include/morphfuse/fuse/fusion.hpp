/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/fuse/fusion.hpp
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

#ifndef MORPHFUSE_FUSE_FUSION_HPP
#define MORPHFUSE_FUSE_FUSION_HPP

#include "morphfuse/body/deform.hpp"
#include "morphfuse/body/model.hpp"
#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/types.hpp"
#include "morphfuse/fit/fitter.hpp"
#include "morphfuse/fit/jacobians.hpp"
#include "morphfuse/fuse/region.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace fuse {

/// Origin tag of a vertex in a fused mesh.
enum class Provenance
{
    Body,
    Face,
    Bridge
};

/**
 * A fused mesh with bookkeeping: per-vertex provenance plus the index maps
 * from the original body and face meshes into the fused vertex array (-1
 * for removed body vertices).
 */
struct FusionResult
{
    core::Mesh mesh;
    double seam_loss = 0.0;
    std::vector<Provenance> provenance; // one tag per fused vertex
    std::vector<int> body_to_fused;     // body vertex -> fused index, -1 if removed
    std::vector<int> face_to_fused;     // face vertex -> fused index
};

/**
 * Cut-and-paste fusion: deletes every body face touching the removal set,
 * drops the removed vertices, re-indexes the remainder, and appends the
 * aligned face mesh. As a degenerate pass-through, an empty removal set
 * with an empty face mesh returns the body unchanged.
 *
 * The seam_loss field of the result is left at 0; callers compute it via
 * seam_loss() once a spec with correspondences is in hand.
 *
 * @throws std::invalid_argument if the spec indexes out of range or the
 *         removal set is empty while a face mesh is supplied.
 */
inline FusionResult copy_paste_fuse(const core::Mesh& body, const core::Mesh& face,
                                    const FaceRegionSpec& spec, const core::RigidTransform& align)
{
    validate(spec, body, face);
    core::validate(align);
    if (spec.face_vertices.empty() && !face.vertices.empty())
    {
        throw std::invalid_argument("copy_paste_fuse: empty removal set with a nonempty face mesh");
    }

    FusionResult result;
    const int body_count = static_cast<int>(body.vertices.size());
    result.body_to_fused.assign(static_cast<std::size_t>(body_count), -1);

    if (spec.face_vertices.empty())
    {
        result.mesh = body;
        result.provenance.assign(body.vertices.size(), Provenance::Body);
        for (int i = 0; i < body_count; ++i)
        {
            result.body_to_fused[static_cast<std::size_t>(i)] = i;
        }
        return result;
    }

    std::vector<char> removed(static_cast<std::size_t>(body_count), 0);
    for (const int vi : spec.face_vertices)
    {
        removed[static_cast<std::size_t>(vi)] = 1;
    }

    const bool body_colors = body.has_colors() && face.has_colors();
    for (int vi = 0; vi < body_count; ++vi)
    {
        if (removed[static_cast<std::size_t>(vi)])
        {
            continue;
        }
        result.body_to_fused[static_cast<std::size_t>(vi)] = static_cast<int>(result.mesh.vertices.size());
        result.mesh.vertices.push_back(body.vertices[static_cast<std::size_t>(vi)]);
        if (body_colors)
        {
            result.mesh.colors.push_back(body.colors[static_cast<std::size_t>(vi)]);
        }
        result.provenance.push_back(Provenance::Body);
    }
    for (const auto& f : body.faces)
    {
        if (removed[static_cast<std::size_t>(f[0])] || removed[static_cast<std::size_t>(f[1])] ||
            removed[static_cast<std::size_t>(f[2])])
        {
            continue;
        }
        result.mesh.faces.push_back({ result.body_to_fused[static_cast<std::size_t>(f[0])],
                                      result.body_to_fused[static_cast<std::size_t>(f[1])],
                                      result.body_to_fused[static_cast<std::size_t>(f[2])] });
    }

    const int face_base = static_cast<int>(result.mesh.vertices.size());
    result.face_to_fused.resize(face.vertices.size());
    for (std::size_t i = 0; i < face.vertices.size(); ++i)
    {
        result.face_to_fused[i] = face_base + static_cast<int>(i);
        result.mesh.vertices.push_back(align.apply(face.vertices[i]));
        if (body_colors)
        {
            result.mesh.colors.push_back(face.colors[i]);
        }
        result.provenance.push_back(Provenance::Face);
    }
    for (const auto& f : face.faces)
    {
        result.mesh.faces.push_back({ face_base + f[0], face_base + f[1], face_base + f[2] });
    }
    return result;
}

/**
 * Seam loss: the sum of squared distances between each seam vertex's
 * position on the original body and its corresponding face vertex's
 * position in the fused mesh. Correspondences come from the spec; every
 * seam vertex must be covered.
 *
 * @throws std::invalid_argument if a seam vertex lacks a correspondence or
 *         indexes fall outside the meshes.
 */
inline double seam_loss(const FusionResult& fused, const core::Mesh& body, const FaceRegionSpec& spec)
{
    double loss = 0.0;
    for (const int s : spec.seam_vertices)
    {
        if (s < 0 || s >= static_cast<int>(body.vertices.size()))
        {
            throw std::invalid_argument("seam_loss: seam vertex " + std::to_string(s) +
                                        " out of range for the body mesh");
        }
        int face_vertex = -1;
        for (const auto& [fv, bv] : spec.correspondence)
        {
            if (bv == s)
            {
                face_vertex = fv;
                break;
            }
        }
        if (face_vertex < 0)
        {
            throw std::invalid_argument("seam_loss: seam vertex " + std::to_string(s) +
                                        " has no correspondence");
        }
        if (face_vertex >= static_cast<int>(fused.face_to_fused.size()))
        {
            throw std::invalid_argument("seam_loss: correspondence face vertex " +
                                        std::to_string(face_vertex) + " out of range for the fused mesh");
        }
        const int fused_index = fused.face_to_fused[static_cast<std::size_t>(face_vertex)];
        const core::Vec3& on_fused = fused.mesh.vertices[static_cast<std::size_t>(fused_index)];
        const core::Vec3& on_body = body.vertices[static_cast<std::size_t>(s)];
        loss += (on_fused - on_body).squaredNorm();
    }
    return loss;
}

/// Outcome of optimize_seam: refined parameters, re-fused result, loss trace.
struct SeamOptimizationResult
{
    body::BodyParams params;
    FusionResult fused;
    std::vector<double> trace; // initial combined loss followed by accepted losses
};

/**
 * Seam optimization: adjusts the body parameters so the (re-posed,
 * re-fused) body seam meets the fixed, already-aligned face mesh, by damped
 * Gauss-Newton on
 *
 *   L_c = sum_S |v_face - v_body(params)|^2
 *         + lambda_pose |theta_art|^2 + lambda_shape |beta|^2.
 *
 * The camera parameters are carried along but receive zero gradient: the
 * seam is a 3D quantity, so only shape and pose can move it. Steps are
 * accepted only when L_c strictly decreases, making the trace
 * non-increasing; each accepted step re-poses the body and the final
 * result is re-fused from the last accepted parameters.
 *
 * @throws std::invalid_argument for invalid weights or an uncovered seam;
 *         std::runtime_error if the loss turns non-finite.
 */
inline SeamOptimizationResult optimize_seam(const body::BodyModel& model, const body::BodyParams& params,
                                            const core::Mesh& face, const FaceRegionSpec& spec,
                                            double lambda_pose, double lambda_shape, int max_iter = 100)
{
    if (lambda_pose < 0.0 || lambda_shape < 0.0)
    {
        throw std::invalid_argument("optimize_seam: prior weights must be nonnegative");
    }
    if (max_iter < 0)
    {
        throw std::invalid_argument("optimize_seam: max_iter must be nonnegative");
    }
    body::validate(params, model);

    // Seam pairs in spec order: body seam vertex and its fixed face target.
    std::vector<int> seam_body;
    std::vector<core::Vec3> seam_target;
    for (const int s : spec.seam_vertices)
    {
        int face_vertex = -1;
        for (const auto& [fv, bv] : spec.correspondence)
        {
            if (bv == s)
            {
                face_vertex = fv;
                break;
            }
        }
        if (face_vertex < 0)
        {
            throw std::invalid_argument("optimize_seam: seam vertex " + std::to_string(s) +
                                        " has no correspondence");
        }
        if (face_vertex >= static_cast<int>(face.vertices.size()))
        {
            throw std::invalid_argument("optimize_seam: correspondence face vertex " +
                                        std::to_string(face_vertex) + " out of range for the face mesh");
        }
        seam_body.push_back(s);
        seam_target.push_back(face.vertices[static_cast<std::size_t>(face_vertex)]);
    }

    const fit::ParamLayout layout = fit::ParamLayout::of(model);
    const auto combined_loss = [&](const body::BodyParams& p) -> double {
        const auto jac = fit::skinned_vertices_jacobian(model, p, seam_body);
        double loss = 0.0;
        for (std::size_t i = 0; i < seam_body.size(); ++i)
        {
            loss += (jac.positions[i] - seam_target[i]).squaredNorm();
        }
        return loss + fit::priors(p.beta, p.theta, lambda_pose, lambda_shape);
    };

    Eigen::VectorXd q = fit::pack_params(params);
    double loss = combined_loss(params);
    if (!std::isfinite(loss))
    {
        throw std::runtime_error("optimize_seam: combined loss is not finite at the initial parameters");
    }

    SeamOptimizationResult result;
    result.trace.push_back(loss);

    double mu = 1e-3;
    for (int iteration = 0; iteration < max_iter; ++iteration)
    {
        const body::BodyParams current = fit::unpack_params(q, layout);
        const auto jac = fit::skinned_vertices_jacobian(model, current, seam_body);

        Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
        Eigen::MatrixXd curvature = Eigen::MatrixXd::Zero(layout.size(), layout.size());
        for (std::size_t i = 0; i < seam_body.size(); ++i)
        {
            const core::Vec3 r = jac.positions[i] - seam_target[i];
            grad += 2.0 * jac.jac[i].transpose() * r;
            curvature += 2.0 * jac.jac[i].transpose() * jac.jac[i];
        }
        grad.head(layout.n_beta) += 2.0 * lambda_shape * q.head(layout.n_beta);
        curvature.topLeftCorner(layout.n_beta, layout.n_beta) +=
            2.0 * lambda_shape * Eigen::MatrixXd::Identity(layout.n_beta, layout.n_beta);
        const Eigen::Index art = std::max<Eigen::Index>(3 * layout.n_joints - 3, 0);
        grad.segment(layout.theta_offset() + 3, art) +=
            2.0 * lambda_pose * q.segment(layout.theta_offset() + 3, art);
        curvature.block(layout.theta_offset() + 3, layout.theta_offset() + 3, art, art) +=
            2.0 * lambda_pose * Eigen::MatrixXd::Identity(art, art);

        if (grad.lpNorm<Eigen::Infinity>() < 1e-15)
        {
            break;
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 25; ++attempt)
        {
            Eigen::MatrixXd damped = curvature;
            damped.diagonal().array() += mu;
            const Eigen::VectorXd step = Eigen::LDLT<Eigen::MatrixXd>(damped).solve(-grad);
            Eigen::VectorXd q_try = q + step;
            // The camera cannot move the 3D seam; pin it so damping noise
            // does not drift it.
            q_try.tail(3) = q.tail(3);
            const body::BodyParams p_try = fit::unpack_params(q_try, layout);
            const double loss_try = combined_loss(p_try);
            if (std::isfinite(loss_try) && loss_try < loss)
            {
                q = q_try;
                loss = loss_try;
                result.trace.push_back(loss);
                mu = std::max(mu * 0.7, 1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if (!accepted)
        {
            break;
        }
        const std::size_t n = result.trace.size();
        if (result.trace[n - 2] - result.trace[n - 1] < 1e-14)
        {
            break;
        }
    }

    result.params = fit::unpack_params(q, layout);
    const core::Mesh posed = body::pose_body(model, result.params).mesh;
    core::RigidTransform identity;
    result.fused = copy_paste_fuse(posed, face, spec, identity);
    result.fused.seam_loss = seam_loss(result.fused, posed, spec);
    return result;
}

} // namespace fuse
} // namespace morphfuse

#endif /* MORPHFUSE_FUSE_FUSION_HPP */
