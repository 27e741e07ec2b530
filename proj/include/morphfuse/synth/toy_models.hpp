/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/synth/toy_models.hpp
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

#ifndef MORPHFUSE_SYNTH_TOY_MODELS_HPP
#define MORPHFUSE_SYNTH_TOY_MODELS_HPP

#include "morphfuse/body/model.hpp"
#include "morphfuse/core/mesh.hpp"
#include "morphfuse/core/types.hpp"
#include "morphfuse/face/model.hpp"
#include "morphfuse/synth/rng.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace morphfuse {
namespace synth {

namespace detail {

/// Smooth random scalar field over positions: a single sinusoid with a
/// random wave vector and phase, plus a small constant so the field can
/// never vanish identically.
struct RandomField
{
    core::Vec3 wave;
    double phase;
    double amplitude;

    double operator()(const core::Vec3& p) const
    {
        return amplitude * (0.15 + std::sin(wave.dot(p) + phase));
    }
};

inline RandomField draw_field(SeededRng& rng, double amplitude)
{
    RandomField field;
    field.wave = rng.vec3(-2.0, 2.0);
    field.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    field.amplitude = amplitude;
    return field;
}

/// One basis column: three independent random fields, one per coordinate.
inline void fill_basis_column(Eigen::MatrixXd& basis, Eigen::Index column,
                              const std::vector<core::Vec3>& positions, SeededRng& rng, double amplitude)
{
    const auto v = static_cast<Eigen::Index>(positions.size());
    const RandomField fx = draw_field(rng, amplitude);
    const RandomField fy = draw_field(rng, amplitude);
    const RandomField fz = draw_field(rng, amplitude);
    for (Eigen::Index i = 0; i < v; ++i)
    {
        basis(i, column) = fx(positions[static_cast<std::size_t>(i)]);
        basis(v + i, column) = fy(positions[static_cast<std::size_t>(i)]);
        basis(2 * v + i, column) = fz(positions[static_cast<std::size_t>(i)]);
    }
}

} // namespace detail

/**
 * Deterministic toy face model: a partial ellipsoid head shell (open at
 * the bottom) with nose and brow bumps that break its mirror symmetry,
 * plus smooth random identity, expression, and texture bases. Drawing
 * order from the rng is fixed, so equal seeds give equal models.
 */
inline face::MorphableFaceModel make_toy_face_model(SeededRng& rng, int n_identity = 8,
                                                    int n_expression = 6, int n_texture = 5)
{
    if (n_identity < 1 || n_expression < 1 || n_texture < 1)
    {
        throw std::invalid_argument("make_toy_face_model: basis sizes must be at least 1");
    }

    constexpr int rings = 9;
    constexpr int segments = 16;
    constexpr double phi_max = 0.68 * std::numbers::pi;
    const core::Vec3 semi_axes(1.0, 0.75, 0.55);

    face::MorphableFaceModel model;
    core::Mesh& mesh = model.template_shape;
    mesh.vertices.push_back(core::Vec3(0.0, semi_axes.y(), 0.0)); // apex
    for (int i = 1; i <= rings; ++i)
    {
        const double phi = phi_max * static_cast<double>(i) / rings;
        for (int s = 0; s < segments; ++s)
        {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(s) / segments;
            mesh.vertices.push_back(core::Vec3(semi_axes.x() * std::sin(phi) * std::cos(theta),
                                               semi_axes.y() * std::cos(phi),
                                               semi_axes.z() * std::sin(phi) * std::sin(theta)));
        }
    }
    const auto ring_index = [&](int ring, int s) { return 1 + (ring - 1) * segments + (s % segments); };

    // Nose and brow bumps: radial pushes on a fixed, asymmetric vertex set.
    for (const int vi : { ring_index(4, 0), ring_index(4, 1), ring_index(4, 15), ring_index(5, 0) })
    {
        mesh.vertices[static_cast<std::size_t>(vi)] +=
            0.18 * mesh.vertices[static_cast<std::size_t>(vi)].normalized();
    }
    for (const int vi : { ring_index(2, 2), ring_index(2, 3) })
    {
        mesh.vertices[static_cast<std::size_t>(vi)] +=
            0.10 * mesh.vertices[static_cast<std::size_t>(vi)].normalized();
    }

    for (int s = 0; s < segments; ++s)
    {
        mesh.faces.push_back({ ring_index(1, s), 0, ring_index(1, s + 1) });
    }
    for (int i = 1; i < rings; ++i)
    {
        for (int s = 0; s < segments; ++s)
        {
            mesh.faces.push_back({ ring_index(i + 1, s), ring_index(i, s), ring_index(i + 1, s + 1) });
            mesh.faces.push_back({ ring_index(i + 1, s + 1), ring_index(i, s), ring_index(i, s + 1) });
        }
    }

    // Mid-range skin-like gradient, away from the [0,1] clamp boundaries.
    model.mean_texture.reserve(mesh.vertices.size());
    for (const auto& p : mesh.vertices)
    {
        model.mean_texture.push_back(core::Vec3(0.55 + 0.20 * std::sin(p.x()),
                                                0.45 + 0.15 * std::cos(p.y()),
                                                0.40 + 0.10 * std::sin(p.z())));
    }

    const auto v = static_cast<Eigen::Index>(mesh.vertices.size());
    model.identity_basis.resize(3 * v, n_identity);
    for (Eigen::Index c = 0; c < n_identity; ++c)
    {
        detail::fill_basis_column(model.identity_basis, c, mesh.vertices, rng, 0.05);
    }
    model.expression_basis.resize(3 * v, n_expression);
    for (Eigen::Index c = 0; c < n_expression; ++c)
    {
        detail::fill_basis_column(model.expression_basis, c, mesh.vertices, rng, 0.03);
    }
    model.texture_basis.resize(3 * v, n_texture);
    for (Eigen::Index c = 0; c < n_texture; ++c)
    {
        detail::fill_basis_column(model.texture_basis, c, mesh.vertices, rng, 0.08);
    }

    face::validate(model);
    return model;
}

/// Fixed layout constants of the toy body, shared with scene assembly.
struct ToyBodyLayout
{
    static constexpr int torso_rows = 10;
    static constexpr int segments = 12;
    static constexpr int head_rings = 5;
    static constexpr double torso_height = 1.4;
    static constexpr double torso_radius = 0.25;
    static constexpr double head_radius = 0.28;
    static constexpr double head_center_y = 1.75;

    static constexpr int torso_count() { return torso_rows * segments; }
    static constexpr int head_apex() { return torso_count(); }
    static constexpr int head_ring_start(int ring) { return torso_count() + 1 + (ring - 1) * segments; }
    static constexpr int vertex_count() { return torso_count() + 1 + head_rings * segments; }
};

/**
 * Deterministic toy body model: a cylinder torso joined to a sphere head
 * by a neck band, five joints (pelvis, chest, head, two shoulders) with
 * Gaussian joint regressor and skinning weights, and a small shape basis
 * whose first column is a uniform +z translation of the whole body.
 */
inline body::BodyModel make_toy_body_model(SeededRng& rng, int n_beta = 4)
{
    if (n_beta < 1)
    {
        throw std::invalid_argument("make_toy_body_model: need at least 1 shape direction");
    }
    using L = ToyBodyLayout;

    body::BodyModel model;
    core::Mesh& mesh = model.template_mesh;
    for (int r = 0; r < L::torso_rows; ++r)
    {
        const double y = L::torso_height * static_cast<double>(r) / (L::torso_rows - 1);
        for (int s = 0; s < L::segments; ++s)
        {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(s) / L::segments;
            mesh.vertices.push_back(
                core::Vec3(L::torso_radius * std::cos(theta), y, L::torso_radius * std::sin(theta)));
        }
    }
    mesh.vertices.push_back(core::Vec3(0.0, L::head_center_y + L::head_radius, 0.0)); // head apex
    for (int i = 1; i <= L::head_rings; ++i)
    {
        const double phi = std::numbers::pi * static_cast<double>(i) / 6.0;
        for (int s = 0; s < L::segments; ++s)
        {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(s) / L::segments;
            mesh.vertices.push_back(core::Vec3(L::head_radius * std::sin(phi) * std::cos(theta),
                                               L::head_center_y + L::head_radius * std::cos(phi),
                                               L::head_radius * std::sin(phi) * std::sin(theta)));
        }
    }

    const auto torso_index = [](int r, int s) { return r * L::segments + (s % L::segments); };
    const auto head_index = [](int ring, int s) { return L::head_ring_start(ring) + (s % L::segments); };
    for (int r = 0; r + 1 < L::torso_rows; ++r)
    {
        for (int s = 0; s < L::segments; ++s)
        {
            mesh.faces.push_back({ torso_index(r, s), torso_index(r + 1, s), torso_index(r, s + 1) });
            mesh.faces.push_back({ torso_index(r, s + 1), torso_index(r + 1, s), torso_index(r + 1, s + 1) });
        }
    }
    for (int s = 0; s < L::segments; ++s)
    {
        mesh.faces.push_back({ head_index(1, s), L::head_apex(), head_index(1, s + 1) });
    }
    for (int i = 1; i < L::head_rings; ++i)
    {
        for (int s = 0; s < L::segments; ++s)
        {
            mesh.faces.push_back({ head_index(i + 1, s), head_index(i, s), head_index(i + 1, s + 1) });
            mesh.faces.push_back({ head_index(i + 1, s + 1), head_index(i, s), head_index(i, s + 1) });
        }
    }
    // Neck band: torso top ring up to the head's lowest ring.
    for (int s = 0; s < L::segments; ++s)
    {
        const int t0 = torso_index(L::torso_rows - 1, s);
        const int t1 = torso_index(L::torso_rows - 1, s + 1);
        const int h0 = head_index(L::head_rings, s);
        const int h1 = head_index(L::head_rings, s + 1);
        mesh.faces.push_back({ t0, h0, t1 });
        mesh.faces.push_back({ t1, h0, h1 });
    }

    model.parents = { -1, 0, 1, 1, 1 };
    const std::vector<core::Vec3> anchors = {
        core::Vec3(0.0, 0.0, 0.0),   // pelvis
        core::Vec3(0.0, 0.9, 0.0),   // chest
        core::Vec3(0.0, 1.75, 0.0),  // head
        core::Vec3(0.25, 1.3, 0.0),  // left shoulder
        core::Vec3(-0.25, 1.3, 0.0), // right shoulder
    };
    const auto v = static_cast<Eigen::Index>(mesh.vertices.size());
    const auto k = static_cast<Eigen::Index>(anchors.size());

    // Gaussian weights about the anchors; each row is normalized and its
    // last entry recomputed as one minus the rest so the sum is exactly 1.
    const auto gaussian_row = [](Eigen::VectorXd row) {
        row /= row.sum();
        row[row.size() - 1] = 1.0 - row.head(row.size() - 1).sum();
        return row;
    };
    model.joint_regressor.resize(k, v);
    for (Eigen::Index j = 0; j < k; ++j)
    {
        Eigen::VectorXd row(v);
        for (Eigen::Index i = 0; i < v; ++i)
        {
            const double d2 =
                (mesh.vertices[static_cast<std::size_t>(i)] - anchors[static_cast<std::size_t>(j)]).squaredNorm();
            row[i] = std::exp(-d2 / (2.0 * 0.3 * 0.3));
        }
        model.joint_regressor.row(j) = gaussian_row(row).transpose();
    }
    model.skinning_weights.resize(v, k);
    for (Eigen::Index i = 0; i < v; ++i)
    {
        Eigen::VectorXd row(k);
        for (Eigen::Index j = 0; j < k; ++j)
        {
            const double d2 =
                (mesh.vertices[static_cast<std::size_t>(i)] - anchors[static_cast<std::size_t>(j)]).squaredNorm();
            row[j] = std::exp(-d2 / (2.0 * 0.35 * 0.35));
        }
        model.skinning_weights.row(i) = gaussian_row(row).transpose();
    }

    model.shape_basis = Eigen::MatrixXd::Zero(3 * v, n_beta);
    for (Eigen::Index i = 0; i < v; ++i)
    {
        model.shape_basis(2 * v + i, 0) = 1.0; // uniform +z shift
    }
    if (n_beta > 1)
    {
        for (Eigen::Index i = 0; i < v; ++i)
        {
            const core::Vec3& p = mesh.vertices[static_cast<std::size_t>(i)];
            model.shape_basis(i, 1) = 0.4 * p.x(); // radial inflate
            model.shape_basis(2 * v + i, 1) = 0.4 * p.z();
        }
    }
    if (n_beta > 2)
    {
        for (Eigen::Index i = 0; i < v; ++i)
        {
            model.shape_basis(v + i, 2) = 0.3 * mesh.vertices[static_cast<std::size_t>(i)].y(); // elongate
        }
    }
    for (Eigen::Index c = 3; c < n_beta; ++c)
    {
        detail::fill_basis_column(model.shape_basis, c, mesh.vertices, rng, 0.05);
    }

    // Pose corrective basis: zero for the root slot (global orientation
    // should not deform the rest shape), small smooth fields elsewhere.
    model.pose_basis = Eigen::MatrixXd::Zero(3 * v, 9 * k);
    for (Eigen::Index c = 9; c < 9 * k; ++c)
    {
        detail::fill_basis_column(model.pose_basis, c, mesh.vertices, rng, 0.008);
    }

    body::validate(model);
    return model;
}

} // namespace synth
} // namespace morphfuse

#endif /* MORPHFUSE_SYNTH_TOY_MODELS_HPP */
