/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/fit/fitter.hpp
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

#ifndef MORPHFUSE_FIT_FITTER_HPP
#define MORPHFUSE_FIT_FITTER_HPP

#include "morphfuse/body/camera.hpp"
#include "morphfuse/body/deform.hpp"
#include "morphfuse/body/model.hpp"
#include "morphfuse/fit/jacobians.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace morphfuse {
namespace fit {

/// Damping and backtracking constants of the optimizer.
struct StepControl
{
    double initial_damping = 1e-3;
    double damping_increase = 4.0;  // applied after a rejected step
    double damping_decrease = 0.7;  // applied after an accepted step
    int max_backtracks = 25;        // rejected trials per outer iteration
};

/**
 * Fit configuration. An empty init.beta / init.theta means "zeros of the
 * model's size"; the default camera is unit scale with no translation.
 */
struct FitConfig
{
    int max_iterations = 100;
    double convergence_tol = 1e-10; // stop when an accepted step improves less than this
    double lambda_pose = 0.0;
    double lambda_shape = 0.0;
    StepControl step_control;
    body::BodyParams init;
};

inline void validate(const FitConfig& config)
{
    if (config.max_iterations < 1)
    {
        throw std::invalid_argument("fit config: max_iterations must be at least 1");
    }
    if (!(config.convergence_tol > 0.0))
    {
        throw std::invalid_argument("fit config: convergence_tol must be positive");
    }
    if (config.lambda_pose < 0.0 || config.lambda_shape < 0.0)
    {
        throw std::invalid_argument("fit config: prior weights must be nonnegative");
    }
    const StepControl& sc = config.step_control;
    if (!(sc.initial_damping > 0.0) || !(sc.damping_increase > 1.0) || !(sc.damping_decrease > 0.0) ||
        sc.damping_decrease > 1.0 || sc.max_backtracks < 1)
    {
        throw std::invalid_argument("fit config: invalid step control constants");
    }
}

/**
 * Quadratic prior energy: lambda_pose * |theta_articulated|^2 +
 * lambda_shape * |beta|^2. The first three theta entries (global
 * orientation) are excluded from the pose penalty.
 */
inline double priors(const Eigen::VectorXd& beta, const Eigen::VectorXd& theta, double lambda_pose,
                     double lambda_shape)
{
    const Eigen::Index art = std::max<Eigen::Index>(theta.size() - 3, 0);
    return lambda_pose * theta.tail(art).squaredNorm() + lambda_shape * beta.squaredNorm();
}

namespace detail {

// Joint residuals below this norm are treated as exactly met: the unsquared
// distance has no defined gradient there, so such joints contribute nothing.
constexpr double zero_residual_threshold = 1e-12;

/// Posed joints without the (unneeded) skinning work: shape, regress, FK.
inline std::vector<core::Vec3> posed_joints_only(const body::BodyModel& model,
                                                 const body::BodyParams& params)
{
    const core::Mesh shaped = body::shape_mesh(model, params.beta);
    const auto rest_joints = body::regress_joints(model, shaped);
    const auto transforms = body::forward_kinematics(model, params.theta, rest_joints);
    std::vector<core::Vec3> posed(rest_joints.size());
    for (std::size_t j = 0; j < posed.size(); ++j)
    {
        posed[j] = transforms[j].rotation * rest_joints[j] + transforms[j].translation;
    }
    return posed;
}

} // namespace detail

/**
 * Full fitting objective: visibility-masked reprojection loss plus the
 * quadratic priors. Returns +infinity for infeasible parameters
 * (non-positive camera scale), which the optimizer treats as a rejected
 * step.
 */
inline double fit_objective(const body::BodyModel& model, const body::Keypoints2D& targets,
                            const body::BodyParams& params, double lambda_pose, double lambda_shape)
{
    if (params.camera.scale <= 0.0)
    {
        return std::numeric_limits<double>::infinity();
    }
    const auto joints = detail::posed_joints_only(model, params);
    const auto projected = body::project(joints, params.camera);
    return body::joint_loss(projected, targets) + priors(params.beta, params.theta, lambda_pose, lambda_shape);
}

/**
 * Analytic gradient of fit_objective with respect to the packed parameter
 * vector (ParamLayout order). Joints whose residual norm falls below 1e-12
 * contribute zero gradient, which removes the norm's singularity at zero
 * deterministically.
 */
inline Eigen::VectorXd fit_gradient(const body::BodyModel& model, const body::Keypoints2D& targets,
                                    const body::BodyParams& params, double lambda_pose,
                                    double lambda_shape)
{
    const auto proj = projected_joints_jacobian(model, params);
    const ParamLayout& layout = proj.layout;
    body::validate(targets, layout.n_joints);

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
    for (int j = 0; j < layout.n_joints; ++j)
    {
        if (targets.visibility[static_cast<std::size_t>(j)] == 0)
        {
            continue;
        }
        const core::Vec2 r =
            proj.projected[static_cast<std::size_t>(j)] - targets.points[static_cast<std::size_t>(j)];
        const double norm = r.norm();
        if (norm < detail::zero_residual_threshold)
        {
            continue;
        }
        grad += proj.jac[static_cast<std::size_t>(j)].transpose() * (r / norm);
    }
    grad.head(layout.n_beta) += 2.0 * lambda_shape * params.beta;
    const Eigen::Index art = std::max<Eigen::Index>(params.theta.size() - 3, 0);
    grad.segment(layout.theta_offset() + 3, art) += 2.0 * lambda_pose * params.theta.tail(art);
    return grad;
}

/// Outcome of fit_body: recovered parameters, loss, accepted-loss trace.
struct FitResult
{
    body::BodyParams params;
    double final_loss = 0.0;
    std::vector<double> trace; // initial loss followed by every accepted loss
};

/**
 * Fits shape, pose and camera to 2D keypoints by damped Gauss-Newton with
 * backtracking. Each iteration assembles the reweighted normal equations of
 * the unsquared joint distances (curvature J^T J / |r| per joint, plus the
 * quadratic prior terms), solves (H + mu I) d = -g, and accepts the step
 * only when the true objective strictly decreases; rejected trials raise mu.
 * The accepted-loss trace is therefore non-increasing, and identical inputs
 * produce bit-identical traces (there is no internal randomness).
 *
 * @throws std::invalid_argument if no joint is visible or config is invalid;
 *         std::runtime_error if the objective is not finite at init.
 */
inline FitResult fit_body(const body::BodyModel& model, const body::Keypoints2D& targets,
                          const FitConfig& config)
{
    validate(config);
    body::validate(targets, model.joint_count());
    if (std::none_of(targets.visibility.begin(), targets.visibility.end(),
                     [](int flag) { return flag != 0; }))
    {
        throw std::invalid_argument("fit_body: all joints invisible, objective is unconstrained");
    }

    const ParamLayout layout = ParamLayout::of(model);
    body::BodyParams params = config.init;
    if (params.beta.size() == 0)
    {
        params.beta = Eigen::VectorXd::Zero(layout.n_beta);
    }
    if (params.theta.size() == 0)
    {
        params.theta = Eigen::VectorXd::Zero(3 * layout.n_joints);
    }
    body::validate(params, model);

    const auto objective = [&](const body::BodyParams& p) {
        return fit_objective(model, targets, p, config.lambda_pose, config.lambda_shape);
    };

    double loss = objective(params);
    if (!std::isfinite(loss))
    {
        throw std::runtime_error("fit_body: objective is not finite at the initial parameters");
    }
    FitResult result;
    result.trace.push_back(loss);

    Eigen::VectorXd q = pack_params(params);
    double mu = config.step_control.initial_damping;

    for (int iteration = 0; iteration < config.max_iterations; ++iteration)
    {
        const auto proj = projected_joints_jacobian(model, unpack_params(q, layout));
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
        Eigen::MatrixXd curvature = Eigen::MatrixXd::Zero(layout.size(), layout.size());
        for (int j = 0; j < layout.n_joints; ++j)
        {
            if (targets.visibility[static_cast<std::size_t>(j)] == 0)
            {
                continue;
            }
            const core::Vec2 r =
                proj.projected[static_cast<std::size_t>(j)] - targets.points[static_cast<std::size_t>(j)];
            const double norm = r.norm();
            if (norm < detail::zero_residual_threshold)
            {
                continue;
            }
            const auto& jac = proj.jac[static_cast<std::size_t>(j)];
            grad += jac.transpose() * (r / norm);
            curvature += jac.transpose() * jac / std::max(norm, 1e-8);
        }
        grad.head(layout.n_beta) += 2.0 * config.lambda_shape * q.head(layout.n_beta);
        curvature.topLeftCorner(layout.n_beta, layout.n_beta) +=
            2.0 * config.lambda_shape * Eigen::MatrixXd::Identity(layout.n_beta, layout.n_beta);
        const Eigen::Index art = std::max<Eigen::Index>(3 * layout.n_joints - 3, 0);
        grad.segment(layout.theta_offset() + 3, art) +=
            2.0 * config.lambda_pose * q.segment(layout.theta_offset() + 3, art);
        curvature.block(layout.theta_offset() + 3, layout.theta_offset() + 3, art, art) +=
            2.0 * config.lambda_pose * Eigen::MatrixXd::Identity(art, art);

        if (grad.lpNorm<Eigen::Infinity>() < 1e-15)
        {
            break; // stationary (or every residual exactly met)
        }

        bool accepted = false;
        for (int attempt = 0; attempt < config.step_control.max_backtracks; ++attempt)
        {
            Eigen::MatrixXd damped = curvature;
            damped.diagonal().array() += mu;
            const Eigen::VectorXd step = Eigen::LDLT<Eigen::MatrixXd>(damped).solve(-grad);
            const Eigen::VectorXd q_try = q + step;
            const double loss_try = objective(unpack_params(q_try, layout));
            if (std::isfinite(loss_try) && loss_try < loss)
            {
                q = q_try;
                loss = loss_try;
                result.trace.push_back(loss);
                mu = std::max(mu * config.step_control.damping_decrease, 1e-12);
                accepted = true;
                break;
            }
            mu *= config.step_control.damping_increase;
        }
        if (!accepted)
        {
            break; // no improving step within the backtracking budget
        }
        const std::size_t n = result.trace.size();
        if (result.trace[n - 2] - result.trace[n - 1] < config.convergence_tol)
        {
            break;
        }
    }

    result.params = unpack_params(q, layout);
    result.final_loss = loss;
    return result;
}

} // namespace fit
} // namespace morphfuse

#endif /* MORPHFUSE_FIT_FITTER_HPP */
