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

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <span>
#include <vector>

#include "toepsolve/numerics.hpp"
#include "toepsolve/toeplitz.hpp"

namespace toepsolve {

/// Parameters of a synthetic finite array: ny rows by nx columns of
/// identical elements with ne unknowns each, plus nb border unknowns.
///
/// Element (row, col) occupies the pitch-sized cell whose corner sits at
/// (col * pitch, row * pitch). Interactions use the smoothed Helmholtz kernel
/// exp(-i k rho) / (4 pi rho) with rho = sqrt(r^2 + a^2).
struct ArrayProblemSpec {
  std::size_t ny = 1;
  std::size_t nx = 1;
  std::size_t ne = 1;
  std::size_t nb = 0;
  double wavenumber = std::numbers::pi;  // half-wavelength pitch
  double pitch = 1.0;
  double regularization = 0.1;
  double diagonal_shift = 1.0;
  std::uint64_t seed = 0;

  /// Spec with the default border size 8 (nx + ny) and a = pitch / 10.
  static ArrayProblemSpec with_defaults(std::size_t ny, std::size_t nx, std::size_t ne,
                                        std::uint64_t seed = 0);

  /// Throws InvalidSpec.
  void validate() const;

  std::size_t elements() const noexcept { return ny * nx; }
  std::size_t array_unknowns() const noexcept { return ny * nx * ne; }
  std::size_t dimension() const noexcept { return array_unknowns() + nb; }

  friend bool operator==(const ArrayProblemSpec&, const ArrayProblemSpec&) = default;
};

/// [[Z_A, Z_B^T], [Z_B, Z_C]] with Z_A held as a two-level generator.
struct BorderedSystem {
  ArrayProblemSpec spec;
  BlockGenerator2L gen;
  DenseBlock zb;  // nb x (ny nx ne)
  DenseBlock zc;  // nb x nb

  std::size_t array_unknowns() const noexcept { return gen.dimension(); }
  std::size_t border_unknowns() const noexcept { return zc.rows(); }
  std::size_t dimension() const noexcept { return array_unknowns() + border_unknowns(); }

  friend bool operator==(const BorderedSystem&, const BorderedSystem&) = default;
};

inline constexpr std::size_t kDefaultOracleCap = 20000;

BorderedSystem generate(const ArrayProblemSpec& spec);

/// Dense Z; throws TooLargeForOracle above `oracle_cap` unknowns.
DenseBlock assemble_full(const BorderedSystem& sys,
                         std::size_t oracle_cap = kDefaultOracleCap);

/// One column per element: a unit voltage on the feed unknown of that
/// element, zero elsewhere (including the border rows).
struct ExcitationSet {
  DenseBlock v;
  std::size_t feed_index = 0;
};

ExcitationSet build_excitations(const BorderedSystem& sys, std::size_t feed_index);

// TBZ1 system files and TBC1 current files; layouts are documented in
// docs/formats.md.
inline constexpr int kTbzVersion = 1;
inline constexpr int kTbcVersion = 1;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

std::vector<std::uint8_t> serialize(const BorderedSystem& sys);
BorderedSystem deserialize(std::span<const std::uint8_t> bytes);
void save(const BorderedSystem& sys, const std::filesystem::path& path);
BorderedSystem load(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize_currents(const DenseBlock& currents);
DenseBlock deserialize_currents(std::span<const std::uint8_t> bytes);
void save_currents(const DenseBlock& currents, const std::filesystem::path& path);
DenseBlock load_currents(const std::filesystem::path& path);

}  // namespace toepsolve
