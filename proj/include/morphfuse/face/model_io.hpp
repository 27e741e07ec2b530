/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/face/model_io.hpp
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

#ifndef MORPHFUSE_FACE_MODEL_IO_HPP
#define MORPHFUSE_FACE_MODEL_IO_HPP

#include "morphfuse/core/mesh_io.hpp"
#include "morphfuse/face/model.hpp"
#include "morphfuse/io/array_io.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace morphfuse {
namespace face {

/**
 * Reads a face model directory: template.ply (whose per-vertex colors are
 * the mean texture) plus identity.mfa, expression.mfa and texture.mfa basis
 * arrays of dims (V, 3, n).
 *
 * @throws std::runtime_error on missing or malformed files;
 *         std::invalid_argument if the assembled model violates invariants.
 */
inline MorphableFaceModel load_face_model(const std::string& directory)
{
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    if (!fs::is_directory(dir))
    {
        throw std::runtime_error(directory + ": not a directory");
    }
    MorphableFaceModel model;
    core::Mesh mesh = core::load_mesh((dir / "template.ply").string());
    if (!mesh.has_colors())
    {
        throw std::runtime_error(directory + "/template.ply: missing per-vertex color (mean texture)");
    }
    model.mean_texture = mesh.colors;
    mesh.colors.clear();
    model.template_shape = std::move(mesh);
    model.identity_basis = io::as_basis_matrix(io::load_array((dir / "identity.mfa").string()));
    model.expression_basis = io::as_basis_matrix(io::load_array((dir / "expression.mfa").string()));
    model.texture_basis = io::as_basis_matrix(io::load_array((dir / "texture.mfa").string()));
    validate(model);
    return model;
}

/**
 * Writes a face model directory in the layout documented at
 * load_face_model, creating the directory if needed.
 */
inline void save_face_model(const MorphableFaceModel& model, const std::string& directory)
{
    validate(model);
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    fs::create_directories(dir);
    core::Mesh mesh = model.template_shape;
    mesh.colors = model.mean_texture;
    core::save_mesh(mesh, (dir / "template.ply").string());
    io::save_array(io::basis_to_array(model.identity_basis), (dir / "identity.mfa").string());
    io::save_array(io::basis_to_array(model.expression_basis), (dir / "expression.mfa").string());
    io::save_array(io::basis_to_array(model.texture_basis), (dir / "texture.mfa").string());
}

} // namespace face
} // namespace morphfuse

#endif /* MORPHFUSE_FACE_MODEL_IO_HPP */
