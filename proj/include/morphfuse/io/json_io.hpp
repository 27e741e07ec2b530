/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/io/json_io.hpp
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

#ifndef MORPHFUSE_IO_JSON_IO_HPP
#define MORPHFUSE_IO_JSON_IO_HPP

#include "morphfuse/body/model.hpp"
#include "morphfuse/core/types.hpp"
#include "morphfuse/face/model.hpp"
#include "morphfuse/fit/cache.hpp"
#include "morphfuse/fit/fitter.hpp"
#include "morphfuse/fuse/region.hpp"
#include "morphfuse/metrics/report.hpp"

#include "json.hpp"

#include <Eigen/Core>

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace morphfuse {
namespace io {

using json = nlohmann::json;

/// Parses a JSON file, prefixing parse errors with the file path.
inline json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error(path + ": cannot open file");
    }
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw std::runtime_error(path + ": " + e.what());
    }
}

/// Writes pretty-printed JSON with a trailing newline.
inline void save_json_file(const std::string& path, const json& value)
{
    std::ofstream out(path);
    if (!out)
    {
        throw std::runtime_error(path + ": cannot open file for writing");
    }
    out << value.dump(2) << '\n';
    if (!out)
    {
        throw std::runtime_error(path + ": write failed");
    }
}

namespace detail {

inline const json& require(const json& j, const char* key, const char* what)
{
    if (!j.is_object() || !j.contains(key))
    {
        throw std::runtime_error(std::string(what) + ": missing field '" + key + "'");
    }
    return j.at(key);
}

inline Eigen::VectorXd vector_from_json(const json& j, const char* what)
{
    if (!j.is_array())
    {
        throw std::runtime_error(std::string(what) + ": expected an array of numbers");
    }
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number())
        {
            throw std::runtime_error(std::string(what) + ": element " + std::to_string(i) +
                                     " is not a number");
        }
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

inline json vector_to_json(const Eigen::VectorXd& v)
{
    json j = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        j.push_back(v[i]);
    }
    return j;
}

template <typename Vec>
inline Vec fixed_vec_from_json(const json& j, const char* what)
{
    constexpr int n = Vec::RowsAtCompileTime;
    if (!j.is_array() || j.size() != static_cast<std::size_t>(n))
    {
        throw std::runtime_error(std::string(what) + ": expected an array of " + std::to_string(n) +
                                 " numbers");
    }
    Vec v;
    for (int i = 0; i < n; ++i)
    {
        if (!j[static_cast<std::size_t>(i)].is_number())
        {
            throw std::runtime_error(std::string(what) + ": element " + std::to_string(i) +
                                     " is not a number");
        }
        v[i] = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

inline std::vector<int> ints_from_json(const json& j, const char* what)
{
    if (!j.is_array())
    {
        throw std::runtime_error(std::string(what) + ": expected an array of integers");
    }
    std::vector<int> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number_integer())
        {
            throw std::runtime_error(std::string(what) + ": element " + std::to_string(i) +
                                     " is not an integer");
        }
        out.push_back(j[i].get<int>());
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------- face ----

inline json coefficients_to_json(const face::FaceCoefficients& coeffs)
{
    return json{ { "identity", detail::vector_to_json(coeffs.identity) },
                 { "expression", detail::vector_to_json(coeffs.expression) },
                 { "texture", detail::vector_to_json(coeffs.texture) } };
}

inline face::FaceCoefficients coefficients_from_json(const json& j)
{
    face::FaceCoefficients coeffs;
    coeffs.identity = detail::vector_from_json(detail::require(j, "identity", "coefficients"), "identity");
    coeffs.expression =
        detail::vector_from_json(detail::require(j, "expression", "coefficients"), "expression");
    coeffs.texture = detail::vector_from_json(detail::require(j, "texture", "coefficients"), "texture");
    return coeffs;
}

/// Displacement maps are stored as a bare JSON array of per-vertex offsets.
inline json displacement_to_json(const std::vector<double>& dmap)
{
    return json(dmap);
}

inline std::vector<double> displacement_from_json(const json& j)
{
    if (!j.is_array())
    {
        throw std::runtime_error("displacement map: expected a JSON array of numbers");
    }
    std::vector<double> dmap;
    dmap.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number())
        {
            throw std::runtime_error("displacement map: element " + std::to_string(i) +
                                     " is not a number");
        }
        dmap.push_back(j[i].get<double>());
    }
    return dmap;
}

// ---------------------------------------------------------------- body ----

inline json body_params_to_json(const body::BodyParams& params)
{
    return json{ { "beta", detail::vector_to_json(params.beta) },
                 { "theta", detail::vector_to_json(params.theta) },
                 { "camera",
                   json{ { "scale", params.camera.scale },
                         { "translation",
                           json::array({ params.camera.translation.x(), params.camera.translation.y() }) } } } };
}

inline body::BodyParams body_params_from_json(const json& j)
{
    body::BodyParams params;
    params.beta = detail::vector_from_json(detail::require(j, "beta", "body params"), "beta");
    params.theta = detail::vector_from_json(detail::require(j, "theta", "body params"), "theta");
    if (j.contains("camera"))
    {
        const json& cam = j.at("camera");
        params.camera.scale = detail::require(cam, "scale", "camera").get<double>();
        params.camera.translation =
            detail::fixed_vec_from_json<core::Vec2>(detail::require(cam, "translation", "camera"),
                                                    "camera translation");
    }
    return params;
}

inline json keypoints_to_json(const body::Keypoints2D& keypoints)
{
    json points = json::array();
    for (const auto& p : keypoints.points)
    {
        points.push_back(json::array({ p.x(), p.y() }));
    }
    return json{ { "points", points }, { "visibility", keypoints.visibility } };
}

inline body::Keypoints2D keypoints_from_json(const json& j)
{
    body::Keypoints2D keypoints;
    const json& points = detail::require(j, "points", "keypoints");
    if (!points.is_array())
    {
        throw std::runtime_error("keypoints: 'points' must be an array");
    }
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        keypoints.points.push_back(detail::fixed_vec_from_json<core::Vec2>(points[i], "keypoint"));
    }
    keypoints.visibility = detail::ints_from_json(detail::require(j, "visibility", "keypoints"), "visibility");
    return keypoints;
}

/// 3D joint arrays are stored as {"joints": [[x,y,z], ...]}.
inline json joints_to_json(const std::vector<core::Vec3>& joints)
{
    json arr = json::array();
    for (const auto& p : joints)
    {
        arr.push_back(json::array({ p.x(), p.y(), p.z() }));
    }
    return json{ { "joints", arr } };
}

inline std::vector<core::Vec3> joints_from_json(const json& j)
{
    const json& arr = detail::require(j, "joints", "joints");
    if (!arr.is_array())
    {
        throw std::runtime_error("joints: 'joints' must be an array");
    }
    std::vector<core::Vec3> joints;
    joints.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
        joints.push_back(detail::fixed_vec_from_json<core::Vec3>(arr[i], "joint"));
    }
    return joints;
}

// ----------------------------------------------------------------- fit ----

inline json fit_config_to_json(const fit::FitConfig& config)
{
    json j{ { "max_iterations", config.max_iterations },
            { "convergence_tol", config.convergence_tol },
            { "lambda_pose", config.lambda_pose },
            { "lambda_shape", config.lambda_shape },
            { "step_control",
              json{ { "initial_damping", config.step_control.initial_damping },
                    { "damping_increase", config.step_control.damping_increase },
                    { "damping_decrease", config.step_control.damping_decrease },
                    { "max_backtracks", config.step_control.max_backtracks } } } };
    if (config.init.beta.size() > 0 || config.init.theta.size() > 0)
    {
        j["init"] = body_params_to_json(config.init);
    }
    return j;
}

/// Missing fields keep their defaults, so partial configs are valid.
inline fit::FitConfig fit_config_from_json(const json& j)
{
    fit::FitConfig config;
    config.max_iterations = j.value("max_iterations", config.max_iterations);
    config.convergence_tol = j.value("convergence_tol", config.convergence_tol);
    config.lambda_pose = j.value("lambda_pose", config.lambda_pose);
    config.lambda_shape = j.value("lambda_shape", config.lambda_shape);
    if (j.contains("step_control"))
    {
        const json& sc = j.at("step_control");
        config.step_control.initial_damping = sc.value("initial_damping", config.step_control.initial_damping);
        config.step_control.damping_increase =
            sc.value("damping_increase", config.step_control.damping_increase);
        config.step_control.damping_decrease =
            sc.value("damping_decrease", config.step_control.damping_decrease);
        config.step_control.max_backtracks = sc.value("max_backtracks", config.step_control.max_backtracks);
    }
    if (j.contains("init"))
    {
        config.init = body_params_from_json(j.at("init"));
    }
    return config;
}

inline json cache_to_json(const fit::BestFitCache& cache)
{
    json j = json::object();
    for (const auto& [id, entry] : cache.entries)
    {
        j[id] = json{ { "params", body_params_to_json(entry.params) }, { "loss", entry.loss } };
    }
    return j;
}

inline fit::BestFitCache cache_from_json(const json& j)
{
    if (!j.is_object())
    {
        throw std::runtime_error("fit cache: expected a JSON object keyed by sample id");
    }
    fit::BestFitCache cache;
    for (const auto& [id, entry] : j.items())
    {
        fit::BestFitCache::Entry e;
        e.params = body_params_from_json(detail::require(entry, "params", "fit cache entry"));
        e.loss = detail::require(entry, "loss", "fit cache entry").get<double>();
        cache.entries.emplace(id, std::move(e));
    }
    return cache;
}

// ---------------------------------------------------------------- fuse ----

inline json region_spec_to_json(const fuse::FaceRegionSpec& spec)
{
    json correspondence = json::array();
    for (const auto& [face_vertex, body_vertex] : spec.correspondence)
    {
        correspondence.push_back(json::array({ face_vertex, body_vertex }));
    }
    return json{ { "face_vertices", spec.face_vertices },
                 { "seam_vertices", spec.seam_vertices },
                 { "correspondence", correspondence },
                 { "neck_vertices", spec.neck_vertices } };
}

inline fuse::FaceRegionSpec region_spec_from_json(const json& j)
{
    fuse::FaceRegionSpec spec;
    spec.face_vertices =
        detail::ints_from_json(detail::require(j, "face_vertices", "region spec"), "face_vertices");
    spec.seam_vertices =
        detail::ints_from_json(detail::require(j, "seam_vertices", "region spec"), "seam_vertices");
    const json& correspondence = detail::require(j, "correspondence", "region spec");
    if (!correspondence.is_array())
    {
        throw std::runtime_error("region spec: 'correspondence' must be an array of [face, body] pairs");
    }
    for (std::size_t i = 0; i < correspondence.size(); ++i)
    {
        const std::vector<int> pair = detail::ints_from_json(correspondence[i], "correspondence pair");
        if (pair.size() != 2)
        {
            throw std::runtime_error("region spec: correspondence entry " + std::to_string(i) +
                                     " must be a [face, body] pair");
        }
        spec.correspondence.emplace_back(pair[0], pair[1]);
    }
    spec.neck_vertices =
        detail::ints_from_json(detail::require(j, "neck_vertices", "region spec"), "neck_vertices");
    return spec;
}

// ------------------------------------------------------------- metrics ----

inline json report_to_json(const metrics::MetricReport& report)
{
    json per_sample = json::object();
    for (const auto& [name, value] : report.per_sample)
    {
        per_sample[name] = value;
    }
    json j{ { "metric", report.metric },
            { "value", report.value },
            { "stddev", metrics::metric_stddev(report) },
            { "units", report.units },
            { "alignment", report.alignment },
            { "per_sample", per_sample } };
    if (report.crop)
    {
        j["crop"] = json{ { "center", json::array({ report.crop->center.x(), report.crop->center.y(),
                                                    report.crop->center.z() }) },
                          { "radius", report.crop->radius } };
    }
    return j;
}

inline json reports_to_json(const std::vector<metrics::MetricReport>& reports)
{
    json j = json::array();
    for (const auto& report : reports)
    {
        j.push_back(report_to_json(report));
    }
    return j;
}

} // namespace io
} // namespace morphfuse

#endif /* MORPHFUSE_IO_JSON_IO_HPP */
