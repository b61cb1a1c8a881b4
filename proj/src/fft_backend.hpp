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

#pragma once

#include <cstddef>

#include "toepsolve/numerics.hpp"

namespace toepsolve::detail {

/// In-place batch of 1-D DFTs of `length` points spaced `stride` apart.
/// Transform b * 1 + r * repeat_dist starts at data + b + r * repeat_dist for
/// b < batch, r < repeat. Inverse transforms are unnormalized here.
struct StridedDft {
  std::size_t length;
  std::size_t stride;
  std::size_t batch;
  std::size_t repeat;
  std::size_t repeat_dist;
  bool inverse;
};

void execute(const StridedDft& plan, cplx* data);

}  // namespace toepsolve::detail
