/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: tests/test_fitter.cpp
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
#include "morphfuse/body/camera.hpp"
#include "morphfuse/body/deform.hpp"
#include "morphfuse/fit/cache.hpp"
#include "morphfuse/fit/fitter.hpp"
#include "morphfuse/fit/jacobians.hpp"
#include "morphfuse/synth/rng.hpp"
#include "morphfuse/synth/toy_models.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace morphfuse;

namespace {

body::BodyModel toy_body()
{
    synth::SeededRng rng(501);
    return synth::make_toy_body_model(rng);
}

body::BodyParams random_params(synth::SeededRng& rng, const body::BodyModel& model)
{
    body::BodyParams params;
    params.beta.resize(model.shape_count());
    params.theta.resize(3 * model.joint_count());
    for (int i = 0; i < params.beta.size(); ++i)
    {
        params.beta[i] = rng.uniform(-0.1, 0.1);
    }
    for (int i = 0; i < params.theta.size(); ++i)
    {
        params.theta[i] = rng.uniform(-0.2, 0.2);
    }
    params.camera.scale = rng.uniform(0.9, 1.5);
    params.camera.translation = core::Vec2(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
    return params;
}

body::Keypoints2D keypoints_of(const body::BodyModel& model, const body::BodyParams& params)
{
    const auto posed = body::pose_body(model, params);
    body::Keypoints2D keypoints;
    keypoints.points = body::project(posed.joints, params.camera);
    keypoints.visibility.assign(keypoints.points.size(), 1);
    return keypoints;
}

} // namespace

TEST(ParamLayout, PackUnpackRoundTrip)
{
    const auto model = toy_body();
    synth::SeededRng rng(502);
    const body::BodyParams params = random_params(rng, model);
    const Eigen::VectorXd q = fit::pack_params(params);
    const body::BodyParams back = fit::unpack_params(q, fit::ParamLayout::of(model));
    EXPECT_EQ(back.beta, params.beta);
    EXPECT_EQ(back.theta, params.theta);
    EXPECT_EQ(back.camera.scale, params.camera.scale);
    EXPECT_EQ(back.camera.translation, params.camera.translation);

    EXPECT_THROW(fit::unpack_params(q.head(q.size() - 1), fit::ParamLayout::of(model)),
                 std::invalid_argument);
}

TEST(Jacobians, ProjectedJointsMatchFiniteDifferences)
{
    const auto model = toy_body();
    synth::SeededRng rng(503);
    const fit::ParamLayout layout = fit::ParamLayout::of(model);
    const double step = 1e-6;

    for (int trial = 0; trial < 5; ++trial)
    {
        const body::BodyParams params = random_params(rng, model);
        const auto analytic = fit::projected_joints_jacobian(model, params);
        const Eigen::VectorXd q0 = fit::pack_params(params);

        for (int k = 0; k < model.joint_count(); ++k)
        {
            for (int axis = 0; axis < 2; ++axis)
            {
                const auto component = [&](const Eigen::VectorXd& q) {
                    const body::BodyParams p = fit::unpack_params(q, layout);
                    const auto posed = body::pose_body(model, p);
                    return body::project(posed.joints, p.camera)[static_cast<std::size_t>(k)][axis];
                };
                const Eigen::VectorXd fd = oracles::central_difference(component, q0, step);
                const Eigen::VectorXd an =
                    analytic.jac[static_cast<std::size_t>(k)].row(axis).transpose();
                EXPECT_LT((an - fd).norm(), 1e-6 * std::max(1.0, fd.norm()))
                    << "joint " << k << " axis " << axis;
            }
        }
    }
}

TEST(Jacobians, SkinnedVerticesMatchFiniteDifferences)
{
    const auto model = toy_body();
    synth::SeededRng rng(504);
    const fit::ParamLayout layout = fit::ParamLayout::of(model);
    const double step = 1e-6;
    const std::vector<int> probes = { 0, 57, 120, 160, 180 };

    const body::BodyParams params = random_params(rng, model);
    const auto analytic = fit::skinned_vertices_jacobian(model, params, probes);
    const Eigen::VectorXd q0 = fit::pack_params(params);

    for (std::size_t pi = 0; pi < probes.size(); ++pi)
    {
        for (int axis = 0; axis < 3; ++axis)
        {
            const auto component = [&](const Eigen::VectorXd& q) {
                const body::BodyParams p = fit::unpack_params(q, layout);
                const auto posed = body::pose_body(model, p);
                return posed.mesh.vertices[static_cast<std::size_t>(probes[pi])][axis];
            };
            const Eigen::VectorXd fd = oracles::central_difference(component, q0, step);
            const Eigen::VectorXd an = analytic.jac[pi].row(axis).transpose();
            EXPECT_LT((an - fd).norm(), 1e-6 * std::max(1.0, fd.norm()))
                << "probe " << probes[pi] << " axis " << axis;
        }
    }

    // Camera columns must vanish: the camera acts after skinning.
    for (const auto& jac : analytic.jac)
    {
        EXPECT_EQ(jac.rightCols(3).norm(), 0.0);
    }

    EXPECT_THROW(fit::skinned_vertices_jacobian(model, params, { model.vertex_count() }),
                 std::invalid_argument);
}

TEST(Fitter, GradientMatchesFiniteDifferences)
{
    const auto model = toy_body();
    synth::SeededRng rng(505);
    const fit::ParamLayout layout = fit::ParamLayout::of(model);

    for (int trial = 0; trial < 10; ++trial)
    {
        const body::BodyParams truth = random_params(rng, model);
        const body::Keypoints2D targets = keypoints_of(model, truth);
        // Evaluate away from the optimum so every joint residual is nonzero.
        const body::BodyParams probe = random_params(rng, model);
        const double lambda_pose = 0.05;
        const double lambda_shape = 0.02;

        const Eigen::VectorXd analytic =
            fit::fit_gradient(model, targets, probe, lambda_pose, lambda_shape);
        const auto objective = [&](const Eigen::VectorXd& q) {
            return fit::fit_objective(model, targets, fit::unpack_params(q, layout), lambda_pose,
                                      lambda_shape);
        };
        const Eigen::VectorXd fd =
            oracles::central_difference(objective, fit::pack_params(probe), 1e-5);
        EXPECT_LT((analytic - fd).norm() / std::max(1.0, fd.norm()), 1e-3);
    }
}

TEST(Fitter, ObjectiveMatchesJointLossPlusPriors)
{
    const auto model = toy_body();
    synth::SeededRng rng(506);
    const body::BodyParams truth = random_params(rng, model);
    const body::Keypoints2D targets = keypoints_of(model, truth);
    const body::BodyParams probe = random_params(rng, model);

    const auto posed = body::pose_body(model, probe);
    const double joint_term =
        body::joint_loss(body::project(posed.joints, probe.camera), targets);
    const double expected = joint_term + 0.7 * probe.theta.tail(probe.theta.size() - 3).squaredNorm() +
                            0.3 * probe.beta.squaredNorm();
    EXPECT_NEAR(fit::fit_objective(model, targets, probe, 0.7, 0.3), expected, 1e-12);
}

TEST(Fitter, RecoversNoiselessKeypointsFromPerturbedInit)
{
    const auto model = toy_body();
    synth::SeededRng rng(507);
    for (int trial = 0; trial < 3; ++trial)
    {
        const body::BodyParams truth = random_params(rng, model);
        const body::Keypoints2D targets = keypoints_of(model, truth);

        fit::FitConfig config;
        config.max_iterations = 500;
        config.init = truth;
        for (int i = 0; i < config.init.beta.size(); ++i)
        {
            config.init.beta[i] += rng.uniform(-0.05, 0.05);
        }
        for (int i = 0; i < config.init.theta.size(); ++i)
        {
            config.init.theta[i] += rng.uniform(-0.05, 0.05);
        }
        config.init.camera.scale += rng.uniform(-0.05, 0.05);
        config.init.camera.translation += core::Vec2(rng.uniform(-0.05, 0.05),
                                                     rng.uniform(-0.05, 0.05));

        const fit::FitResult result = fit::fit_body(model, targets, config);
        EXPECT_LT(result.final_loss, 1e-3);
    }
}

TEST(Fitter, AcceptedLossTraceIsNonIncreasing)
{
    const auto model = toy_body();
    synth::SeededRng rng(508);
    const body::BodyParams truth = random_params(rng, model);
    const body::Keypoints2D targets = keypoints_of(model, truth);

    fit::FitConfig config;
    config.max_iterations = 60;
    config.init = zero_params(model);
    const fit::FitResult result = fit::fit_body(model, targets, config);

    ASSERT_GE(result.trace.size(), 2u);
    for (std::size_t i = 1; i < result.trace.size(); ++i)
    {
        EXPECT_LE(result.trace[i], result.trace[i - 1]);
    }
    EXPECT_EQ(result.trace.back(), result.final_loss);
}

TEST(Fitter, ZeroLossInitIsAFixedPoint)
{
    const auto model = toy_body();
    synth::SeededRng rng(509);
    const body::BodyParams truth = random_params(rng, model);
    const body::Keypoints2D targets = keypoints_of(model, truth);

    fit::FitConfig config;
    config.init = truth;
    config.max_iterations = 30;
    const fit::FitResult result = fit::fit_body(model, targets, config);
    EXPECT_LT(result.final_loss, 1e-12);
    EXPECT_LT(std::abs(result.final_loss - result.trace.front()), 1e-12);
}

TEST(Fitter, DescentDirectionOpposesNumericGradient)
{
    const auto model = toy_body();
    synth::SeededRng rng(510);
    const fit::ParamLayout layout = fit::ParamLayout::of(model);
    const body::BodyParams truth = random_params(rng, model);
    const body::Keypoints2D targets = keypoints_of(model, truth);

    for (int trial = 0; trial < 10; ++trial)
    {
        const body::BodyParams probe = random_params(rng, model);
        const Eigen::VectorXd direction =
            -fit::fit_gradient(model, targets, probe, 0.1, 0.1);
        const auto objective = [&](const Eigen::VectorXd& q) {
            return fit::fit_objective(model, targets, fit::unpack_params(q, layout), 0.1, 0.1);
        };
        const Eigen::VectorXd fd =
            oracles::central_difference(objective, fit::pack_params(probe), 1e-5);
        EXPECT_LT(direction.dot(fd), 0.0);
    }
}

TEST(Fitter, DeterministicTraces)
{
    const auto model = toy_body();
    synth::SeededRng rng(511);
    const body::BodyParams truth = random_params(rng, model);
    const body::Keypoints2D targets = keypoints_of(model, truth);

    fit::FitConfig config;
    config.max_iterations = 40;
    config.init = zero_params(model);

    const fit::FitResult a = fit::fit_body(model, targets, config);
    const fit::FitResult b = fit::fit_body(model, targets, config);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i)
    {
        EXPECT_EQ(a.trace[i], b.trace[i]);
    }
    EXPECT_EQ(fit::pack_params(a.params), fit::pack_params(b.params));
}

TEST(Fitter, StrongPosePriorPullsArticulationToZeroButNotTheRoot)
{
    const auto model = toy_body();
    synth::SeededRng rng(512);
    body::BodyParams truth = zero_params(model);
    truth.theta.head<3>() = core::Vec3(0.2, -0.4, 0.3); // global orientation only
    truth.camera.scale = 1.2;
    const body::Keypoints2D targets = keypoints_of(model, truth);

    fit::FitConfig config;
    config.max_iterations = 300;
    config.lambda_pose = 1e6; // crush articulated joints, leave the root free
    config.init = zero_params(model);
    const fit::FitResult result = fit::fit_body(model, targets, config);

    EXPECT_LT(result.params.theta.tail(result.params.theta.size() - 3).norm(), 1e-3);
    EXPECT_GT(result.params.theta.head<3>().norm(), 0.1);
    EXPECT_LT(result.final_loss, 1.0);
}

TEST(Fitter, ConfigValidationRejectsBadValues)
{
    fit::FitConfig config;
    config.max_iterations = 0;
    EXPECT_THROW(fit::validate(config), std::invalid_argument);
    config.max_iterations = 10;
    config.lambda_pose = -1.0;
    EXPECT_THROW(fit::validate(config), std::invalid_argument);
    config.lambda_pose = 0.0;
    config.convergence_tol = -1e-3;
    EXPECT_THROW(fit::validate(config), std::invalid_argument);
}

TEST(Cache, KeepsTheBestLossPerSample)
{
    const auto model = toy_body();
    fit::BestFitCache cache;
    const body::BodyParams a = zero_params(model);
    body::BodyParams b = zero_params(model);
    b.beta[0] = 1.0;

    EXPECT_TRUE(fit::cache_update(cache, "sample", a, 0.5));
    EXPECT_FALSE(fit::cache_update(cache, "sample", b, 0.9)); // worse, rejected
    EXPECT_EQ(cache.entries.at("sample").loss, 0.5);
    EXPECT_EQ(cache.entries.at("sample").params.beta[0], 0.0);

    EXPECT_TRUE(fit::cache_update(cache, "sample", b, 0.1));
    EXPECT_EQ(cache.entries.at("sample").loss, 0.1);
    EXPECT_EQ(cache.entries.at("sample").params.beta[0], 1.0);

    // Distinct samples do not interact.
    EXPECT_TRUE(fit::cache_update(cache, "other", a, 2.0));
    EXPECT_EQ(cache.entries.at("sample").loss, 0.1);
}

TEST(Cache, RepeatedCandidateIsIdempotent)
{
    const auto model = toy_body();
    fit::BestFitCache cache;
    const body::BodyParams params = zero_params(model);
    EXPECT_TRUE(fit::cache_update(cache, "id", params, 0.7));
    EXPECT_FALSE(fit::cache_update(cache, "id", params, 0.7)); // ties keep the incumbent
    EXPECT_EQ(cache.entries.size(), 1u);
    EXPECT_EQ(cache.entries.at("id").loss, 0.7);
}
