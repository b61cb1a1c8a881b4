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

#include "toepsolve/problems.hpp"

#include <cmath>
#include <random>
#include <string>

#include "toepsolve/error.hpp"

namespace toepsolve {

namespace {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Portable uniform draw in [0, 1); std::uniform_real_distribution is not
// specified bit-for-bit across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class Kernel {
 public:
  Kernel(double k, double a) : k_(k), a2_(a * a) {}

  // dx, dy must be formed as (offset + (p - q)) so that swapping the two
  // points negates them exactly and the matrix stays bitwise symmetric.
  cplx operator()(double dx, double dy) const {
    const double rho = std::sqrt(dx * dx + dy * dy + a2_);
    return std::polar(1.0 / (4.0 * std::numbers::pi * rho), -k_ * rho);
  }

 private:
  double k_;
  double a2_;
};

std::vector<Point> element_dofs(const ArrayProblemSpec& spec, std::mt19937_64& rng) {
  std::vector<Point> dofs(spec.ne);
  for (auto& p : dofs) {
    p.x = unit_uniform(rng) * spec.pitch;
    p.y = unit_uniform(rng) * spec.pitch;
  }
  return dofs;
}

// Border unknowns sit on the outline of the array footprint.
std::vector<Point> border_dofs(const ArrayProblemSpec& spec, std::mt19937_64& rng) {
  const double w = static_cast<double>(spec.nx) * spec.pitch;
  const double h = static_cast<double>(spec.ny) * spec.pitch;
  const double perimeter = 2.0 * (w + h);
  std::vector<Point> dofs(spec.nb);
  for (auto& p : dofs) {
    double s = unit_uniform(rng) * perimeter;
    if (s < w) {
      p = {s, 0.0};
    } else if ((s -= w) < h) {
      p = {w, s};
    } else if ((s -= h) < w) {
      p = {w - s, h};
    } else {
      s -= w;
      p = {0.0, h - s};
    }
  }
  return dofs;
}

}  // namespace

ArrayProblemSpec ArrayProblemSpec::with_defaults(std::size_t ny, std::size_t nx,
                                                 std::size_t ne, std::uint64_t seed) {
  ArrayProblemSpec spec;
  spec.ny = ny;
  spec.nx = nx;
  spec.ne = ne;
  spec.nb = 8 * (nx + ny);
  spec.regularization = spec.pitch / 10.0;
  spec.seed = seed;
  return spec;
}

void ArrayProblemSpec::validate() const {
  if (ny < 1 || nx < 1 || ne < 1) {
    fail(ErrorCode::InvalidSpec, "ny, nx, ne must be >= 1 (got " + std::to_string(ny) +
                                     ", " + std::to_string(nx) + ", " + std::to_string(ne) +
                                     ")");
  }
  if (!(regularization > 0.0) || !std::isfinite(regularization)) {
    fail(ErrorCode::InvalidSpec, "regularization a must be positive");
  }
  if (!(pitch > 0.0) || !std::isfinite(pitch)) {
    fail(ErrorCode::InvalidSpec, "pitch must be positive");
  }
  if (!std::isfinite(wavenumber) || !std::isfinite(diagonal_shift)) {
    fail(ErrorCode::InvalidSpec, "wavenumber and diagonal_shift must be finite");
  }
}

BorderedSystem generate(const ArrayProblemSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::vector<Point> local = element_dofs(spec, rng);
  const std::vector<Point> border = border_dofs(spec, rng);
  const Kernel kernel(spec.wavenumber, spec.regularization);
  const std::size_t ne = spec.ne;

  auto gen = BlockGenerator2L::from_offsets(spec.ny, spec.nx, ne, [&](int d2, int d1) {
    const double ox = static_cast<double>(d1) * spec.pitch;
    const double oy = static_cast<double>(d2) * spec.pitch;
    DenseBlock r(ne, ne);
    for (std::size_t m = 0; m < ne; ++m)
      for (std::size_t n = 0; n < ne; ++n)
        r(m, n) = kernel(ox + (local[m].x - local[n].x), oy + (local[m].y - local[n].y));
    if (d1 == 0 && d2 == 0)
      for (std::size_t m = 0; m < ne; ++m) r(m, m) += spec.diagonal_shift;
    return r;
  });

  const std::size_t na = spec.array_unknowns();
  DenseBlock zb(spec.nb, na);
  for (std::size_t b = 0; b < spec.nb; ++b) {
    for (std::size_t row = 0; row < spec.ny; ++row)
      for (std::size_t col = 0; col < spec.nx; ++col)
        for (std::size_t n = 0; n < ne; ++n) {
          const double x = static_cast<double>(col) * spec.pitch + local[n].x;
          const double y = static_cast<double>(row) * spec.pitch + local[n].y;
          zb(b, (row * spec.nx + col) * ne + n) = kernel(border[b].x - x, border[b].y - y);
        }
  }

  DenseBlock zc(spec.nb, spec.nb);
  for (std::size_t b = 0; b < spec.nb; ++b) {
    for (std::size_t c = 0; c < spec.nb; ++c)
      zc(b, c) = kernel(border[b].x - border[c].x, border[b].y - border[c].y);
    zc(b, b) += spec.diagonal_shift;
  }
  if (spec.nb > 0) {
    try {
      (void)lu_factor(zc);
    } catch (const Error& e) {
      fail(ErrorCode::InvalidSpec, std::string("border self block is singular: ") + e.what());
    }
  }
  return BorderedSystem{spec, std::move(gen), std::move(zb), std::move(zc)};
}

DenseBlock assemble_full(const BorderedSystem& sys, std::size_t oracle_cap) {
  const std::size_t n = sys.dimension();
  if (n > oracle_cap) {
    fail(ErrorCode::TooLargeForOracle, std::to_string(n) + " unknowns exceed the oracle cap of " +
                                           std::to_string(oracle_cap));
  }
  const std::size_t na = sys.array_unknowns();
  DenseBlock full(n, n);
  full.set_block(0, 0, assemble_dense(sys.gen));
  if (sys.border_unknowns() > 0) {
    full.set_block(0, na, sys.zb.transposed());
    full.set_block(na, 0, sys.zb);
    full.set_block(na, na, sys.zc);
  }
  return full;
}

ExcitationSet build_excitations(const BorderedSystem& sys, std::size_t feed_index) {
  const std::size_t ne = sys.gen.n0();
  if (feed_index >= ne) {
    fail(ErrorCode::IndexOutOfRange, "feed index " + std::to_string(feed_index) +
                                         " outside element of " + std::to_string(ne) +
                                         " unknowns");
  }
  const std::size_t m = sys.gen.n2() * sys.gen.n1();
  ExcitationSet set{DenseBlock(sys.dimension(), m), feed_index};
  for (std::size_t c = 0; c < m; ++c) set.v(c * ne + feed_index, c) = 1.0;
  return set;
}

}  // namespace toepsolve
