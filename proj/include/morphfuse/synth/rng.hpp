/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/synth/rng.hpp
 *
 * Copyright 2026 The morphfuse authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef MORPHFUSE_SYNTH_RNG_HPP
#define MORPHFUSE_SYNTH_RNG_HPP

#include "morphfuse/core/types.hpp"

#include <Eigen/Geometry>

#include <cstdint>
#include <random>

namespace morphfuse {
namespace synth {

/**
 * Seeded random source with fully specified output.
 *
 * std::mt19937_64 is pinned by the standard, and the uniform mapping here
 * avoids std::uniform_real_distribution (whose algorithm is
 * implementation-defined), so identical seeds give identical streams on
 * every platform. All synthetic assets and test fixtures draw from this.
 */
class SeededRng
{
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return engine_() % n; }

    core::Vec3 vec3(double lo, double hi)
    {
        const double x = uniform(lo, hi);
        const double y = uniform(lo, hi);
        const double z = uniform(lo, hi);
        return core::Vec3(x, y, z);
    }

    /// Uniformly distributed rotation via a normalized random quaternion.
    core::Mat3 rotation()
    {
        // rejection-sample inside the unit 4-ball, then normalize
        for (;;)
        {
            const double a = uniform(-1.0, 1.0);
            const double b = uniform(-1.0, 1.0);
            const double c = uniform(-1.0, 1.0);
            const double d = uniform(-1.0, 1.0);
            const double n2 = a * a + b * b + c * c + d * d;
            if (n2 < 1e-8 || n2 > 1.0)
                continue;
            Eigen::Quaterniond q(a, b, c, d);
            q.normalize();
            return q.toRotationMatrix();
        }
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace synth
} // namespace morphfuse

#endif /* MORPHFUSE_SYNTH_RNG_HPP */
