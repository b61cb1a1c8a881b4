// Copyright 2026 The toepsolve Authors
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

#include "fft_backend.hpp"

#include <fftw3.h>

#include <omp.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "toepsolve/error.hpp"

namespace toepsolve::detail {

namespace {

using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t,
                       std::size_t, bool>;

// FFTW's planner is not re-entrant; execution of a finished plan on new
// arrays is. Plans are created once per shape and kept for the process.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const StridedDft& p, cplx* sample) {
    const Key key{p.length, p.stride, p.batch, p.repeat, p.repeat_dist, p.inverse};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    fftw_iodim dim{static_cast<int>(p.length), static_cast<int>(p.stride),
                   static_cast<int>(p.stride)};
    fftw_iodim loops[2] = {
        {static_cast<int>(p.batch), 1, 1},
        {static_cast<int>(p.repeat), static_cast<int>(p.repeat_dist),
         static_cast<int>(p.repeat_dist)},
    };
    auto* io = reinterpret_cast<fftw_complex*>(sample);
    fftw_plan plan = fftw_plan_guru_dft(1, &dim, 2, loops, io, io,
                                        p.inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) fail(ErrorCode::ShapeError, "FFTW could not plan transform");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(const StridedDft& p, cplx* data) {
  fftw_plan plan = cache().get(p, data);
  auto* io = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, io, io);
}

}  // namespace

void execute(const StridedDft& p, cplx* data) {
  if (p.length <= 1 || p.batch == 0 || p.repeat == 0) return;
  // Independent transforms along the contiguous batch axis are split across
  // threads; small problems stay serial.
  const std::size_t work = p.length * p.batch * p.repeat;
  const auto threads = static_cast<std::size_t>(omp_get_max_threads());
  const std::size_t chunks = work < (1u << 15) ? 1 : std::min(threads, p.batch);
  if (chunks <= 1) {
    run(p, data);
    return;
  }
  const std::size_t base = p.batch / chunks;
  const std::size_t extra = p.batch % chunks;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const auto ci = static_cast<std::size_t>(c);
    const std::size_t begin = ci * base + std::min(ci, extra);
    const std::size_t size = base + (ci < extra ? 1 : 0);
    run({p.length, p.stride, size, p.repeat, p.repeat_dist, p.inverse}, data + begin);
  }
}

}  // namespace toepsolve::detail
