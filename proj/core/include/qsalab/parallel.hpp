// Copyright 2026 The qsalab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace qsalab {

/// Worker count to use: `requested` if positive, else the hardware
/// concurrency, in both cases capped by the QSALAB_THREADS environment
/// variable when it holds a positive integer. Never less than one.
[[nodiscard]] int resolve_thread_count(int requested = 0);

/// Calls body(i) for i in [0, count) on up to `threads` workers. Bodies must
/// write only to per-index state; callers reduce in index order afterwards,
/// which keeps results independent of the worker count. If bodies throw, the
/// exception from the lowest index is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &body);

} // namespace qsalab
