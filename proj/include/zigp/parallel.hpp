// Copyright 2026 The zigp Authors
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

#pragma once

#include <cstddef>
#include <functional>

namespace zigp {

/// Worker count for internal loops: hardware concurrency capped by the
/// ZIGP_THREADS environment variable (>= 1).
std::size_t thread_count();

/// Runs body(begin, end) over [0, n) split into contiguous chunks. Chunks
/// below `min_chunk` are not split further, so small inputs stay on the
/// calling thread. Callers write per-index results and reduce afterwards
/// in index order, which keeps results independent of the thread count.
void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace zigp
