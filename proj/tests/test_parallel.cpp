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

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qsalab/parallel.hpp"

using namespace qsalab;

namespace {

/// Sets QSALAB_THREADS for the lifetime of the object.
class ThreadsEnv {
  public:
    explicit ThreadsEnv(const char *value)
    {
        if (const char *old = std::getenv("QSALAB_THREADS")) {
            saved_ = old;
            had_ = true;
        }
        if (value != nullptr) {
            ::setenv("QSALAB_THREADS", value, 1);
        } else {
            ::unsetenv("QSALAB_THREADS");
        }
    }
    ~ThreadsEnv()
    {
        if (had_) {
            ::setenv("QSALAB_THREADS", saved_.c_str(), 1);
        } else {
            ::unsetenv("QSALAB_THREADS");
        }
    }

  private:
    std::string saved_;
    bool had_ = false;
};

} // namespace

TEST_CASE("thread count resolution")
{
    {
        ThreadsEnv env(nullptr);
        CHECK(resolve_thread_count(3) == 3);
        CHECK(resolve_thread_count(0) == static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
    }
    {
        ThreadsEnv env("2");
        CHECK(resolve_thread_count(8) == 2);
        CHECK(resolve_thread_count(1) == 1);
        CHECK(resolve_thread_count(0) <= 2);
    }
    {
        ThreadsEnv env("junk");
        CHECK(resolve_thread_count(5) == 5);
    }
    {
        ThreadsEnv env("0");
        CHECK(resolve_thread_count(5) == 5);
    }
}

TEST_CASE("parallel_for visits every index once")
{
    for (int threads : {1, 2, 4, 16}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i].fetch_add(1); });
        bool all_once = true;
        for (const auto &h : hits) {
            all_once = all_once && h.load() == 1;
        }
        CHECK(all_once);
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("parallel_for rethrows the lowest failing index")
{
    for (int threads : {1, 3}) {
        try {
            parallel_for(200, threads, [](std::size_t i) {
                if (i == 17 || i == 150) {
                    throw std::runtime_error("index " + std::to_string(i));
                }
            });
            FAIL("expected an exception");
        } catch (const std::runtime_error &e) {
            CHECK(std::string(e.what()) == "index 17");
        }
    }
}
