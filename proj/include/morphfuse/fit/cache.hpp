/*
 * morphfuse - face and body mesh reconstruction and fusion toolkit.
 *
 * File: include/morphfuse/fit/cache.hpp
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

#ifndef MORPHFUSE_FIT_CACHE_HPP
#define MORPHFUSE_FIT_CACHE_HPP

#include "morphfuse/body/model.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace morphfuse {
namespace fit {

/**
 * Best fit observed per sample. The map value keeps the minimum loss ever
 * submitted for its key together with the parameters that achieved it.
 * Writers must serialize access when fits for many samples run in parallel;
 * reads between updates need no coordination.
 */
struct BestFitCache
{
    struct Entry
    {
        body::BodyParams params;
        double loss = 0.0;
    };

    std::map<std::string, Entry> entries;
};

/**
 * Offers a candidate fit to the cache. The entry for the identifier is
 * replaced only when the candidate loss is strictly smaller than the stored
 * one (or no entry exists yet). Returns true when the candidate now resides
 * in the cache, false when the previous record was kept.
 *
 * @throws std::invalid_argument on a non-finite candidate loss.
 */
inline bool cache_update(BestFitCache& cache, const std::string& id, const body::BodyParams& params,
                         double loss)
{
    if (!std::isfinite(loss))
    {
        throw std::invalid_argument("cache_update: candidate loss must be finite");
    }
    const auto it = cache.entries.find(id);
    if (it == cache.entries.end() || loss < it->second.loss)
    {
        cache.entries[id] = BestFitCache::Entry{ params, loss };
        return true;
    }
    return false;
}

} // namespace fit
} // namespace morphfuse

#endif /* MORPHFUSE_FIT_CACHE_HPP */
