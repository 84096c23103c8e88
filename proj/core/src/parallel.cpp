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

#include "qsalab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qsalab {

int resolve_thread_count(int requested)
{
    int threads = requested > 0 ? requested
                                : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    if (const char *cap = std::getenv("QSALAB_THREADS"); cap != nullptr) {
        int value = 0;
        const char *end = cap + std::strlen(cap);
        const auto [ptr, ec] = std::from_chars(cap, end, value);
        if (ec == std::errc{} && ptr == end && value > 0) {
            threads = std::min(threads, value);
        }
    }
    return std::max(threads, 1);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &body)
{
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = count;
    std::exception_ptr error;

    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(run);
        }
        run();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace qsalab
