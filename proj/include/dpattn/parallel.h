// Copyright 2026 The dpattn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPATTN_PARALLEL_H_
#define DPATTN_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <cstdlib>
#include <string_view>
#include <thread>
#include <vector>

namespace dpattn {

// Worker count: DPATTN_THREADS if set to a positive integer, otherwise the
// hardware concurrency. Results never depend on this value.
inline int WorkerCount() {
  if (const char* env = std::getenv("DPATTN_THREADS"); env != nullptr) {
    const std::string_view text(env);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value > 0) {
      return value;
    }
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

// Calls body(task) exactly once for every task in [0, task_count). Tasks are
// claimed dynamically, so `body` must only write to task-owned state; callers
// reduce the per-task results in task order afterwards.
template <typename Body>
void ParallelFor(std::size_t task_count, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(WorkerCount()), task_count);
  if (workers <= 1) {
    for (std::size_t task = 0; task < task_count; ++task) body(task);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t task = next++; task < task_count; task = next++) {
      body(task);
    }
  };
  std::vector<std::jthread> threads;
  threads.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(run);
  run();
}

}  // namespace dpattn

#endif  // DPATTN_PARALLEL_H_
