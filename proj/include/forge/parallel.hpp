// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORGE__PARALLEL_HPP_
#define FORGE__PARALLEL_HPP_

#include <exception>
#include <mutex>

namespace forge
{

/// Serial runs the plain loop and is the reference the parallel path is tested against.
enum class Execution { Serial, Parallel };

/// Calls fn(i) for i in [0, n). The first exception thrown by any iteration is rethrown
/// after the loop; every iteration must write only to its own slot.
template <class Fn>
void parallel_for(int n, Execution exec, Fn && fn)
{
  if (exec == Execution::Serial) {
    for (int i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) {
        error = std::current_exception();
      }
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace forge

#endif  // FORGE__PARALLEL_HPP_
