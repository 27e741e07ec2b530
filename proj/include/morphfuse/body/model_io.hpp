/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/body/model_io.hpp
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

#ifndef MORPHFUSE_BODY_MODEL_IO_HPP
#define MORPHFUSE_BODY_MODEL_IO_HPP

#include "morphfuse/body/model.hpp"
#include "morphfuse/core/mesh_io.hpp"
#include "morphfuse/io/array_io.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace body {

/**
 * Reads a body model directory: template.ply, shape_basis.mfa (V, 3, n),
 * pose_basis.mfa (V, 3, 9K), joint_regressor.mfa (K, V),
 * skinning_weights.mfa (V, K) and tree.json holding {"parents": [...]}.
 *
 * @throws std::runtime_error on missing or malformed files;
 *         std::invalid_argument if the assembled model violates invariants.
 */
inline BodyModel load_body_model(const std::string& directory)
{
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    if (!fs::is_directory(dir))
    {
        throw std::runtime_error(directory + ": not a directory");
    }
    BodyModel model;
    model.template_mesh = core::load_mesh((dir / "template.ply").string());
    model.shape_basis = io::as_basis_matrix(io::load_array((dir / "shape_basis.mfa").string()));
    model.pose_basis = io::as_basis_matrix(io::load_array((dir / "pose_basis.mfa").string()));
    model.joint_regressor = io::as_matrix(io::load_array((dir / "joint_regressor.mfa").string()));
    model.skinning_weights = io::as_matrix(io::load_array((dir / "skinning_weights.mfa").string()));

    const std::string tree_path = (dir / "tree.json").string();
    std::ifstream in(tree_path);
    if (!in)
    {
        throw std::runtime_error(tree_path + ": cannot open file for reading");
    }
    nlohmann::json tree;
    try
    {
        tree = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e)
    {
        throw std::runtime_error(tree_path + ": " + e.what());
    }
    if (!tree.is_object() || !tree.contains("parents") || !tree["parents"].is_array())
    {
        throw std::runtime_error(tree_path + ": expected an object with a 'parents' array");
    }
    model.parents = tree["parents"].get<std::vector<int>>();
    validate(model);
    return model;
}

/**
 * Writes a body model directory in the layout documented at
 * load_body_model, creating the directory if needed.
 */
inline void save_body_model(const BodyModel& model, const std::string& directory)
{
    validate(model);
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    fs::create_directories(dir);
    core::save_mesh(model.template_mesh, (dir / "template.ply").string());
    io::save_array(io::basis_to_array(model.shape_basis), (dir / "shape_basis.mfa").string());
    io::save_array(io::basis_to_array(model.pose_basis), (dir / "pose_basis.mfa").string());
    io::save_array(io::matrix_to_array(model.joint_regressor), (dir / "joint_regressor.mfa").string());
    io::save_array(io::matrix_to_array(model.skinning_weights), (dir / "skinning_weights.mfa").string());
    nlohmann::json tree;
    tree["parents"] = model.parents;
    const std::string tree_path = (dir / "tree.json").string();
    std::ofstream out(tree_path);
    if (!out)
    {
        throw std::runtime_error(tree_path + ": cannot open file for writing");
    }
    out << tree.dump(2) << "\n";
}

} // namespace body
} // namespace morphfuse

#endif /* MORPHFUSE_BODY_MODEL_IO_HPP */
