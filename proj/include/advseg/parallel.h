/* Copyright 2026 The advseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef ADVSEG_PARALLEL_H_
#define ADVSEG_PARALLEL_H_

#include <cstdint>
#include <functional>

namespace advseg {

// Worker count: ADVSEG_THREADS if set and positive, otherwise the hardware
// concurrency. Read once per process.
int ThreadCount();

// Runs fn(i) for i in [0, n). Work items must write disjoint outputs; any
// reduction over items is the caller's job, done afterwards in index order,
// so results do not depend on the thread count.
void ParallelFor(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace advseg

#endif  // ADVSEG_PARALLEL_H_
