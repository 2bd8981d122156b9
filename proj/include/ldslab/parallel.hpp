/*
 Copyright 2026 The ldslab Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef LDSLAB_PARALLEL_HPP
#define LDSLAB_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace ldslab {

/// Worker thread cap: LDSLAB_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_threads();

/// Runs task(i) for i in [0, count) on up to worker_threads() threads.
/// Tasks must write only to their own output slot; the first exception thrown
/// by any task is rethrown after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

/// Work is split into shards of this many items. The shard layout depends only
/// on the item count, never on the thread count, which keeps reductions
/// bit-identical across LDSLAB_THREADS settings.
inline constexpr std::size_t kShardSize = 2048;

inline std::size_t shard_count(std::size_t items) {
    return (items + kShardSize - 1) / kShardSize;
}

}  // namespace ldslab

#endif  // LDSLAB_PARALLEL_HPP
