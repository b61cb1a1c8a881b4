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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>

#include "toepsolve/error.hpp"
#include "toepsolve/problems.hpp"

namespace toepsolve {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::InvalidArgument;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("toepsolve_" + name);
}

TEST(Generate, SingleUnknownMatchesKernelAtZeroDistance) {
  ArrayProblemSpec spec;
  spec.wavenumber = 0.0;
  spec.regularization = 1.0;
  spec.diagonal_shift = 0.25;
  const auto sys = generate(spec);
  const auto z = assemble_full(sys);
  ASSERT_EQ(z.rows(), 1u);
  EXPECT_NEAR(z(0, 0).real(), 1.0 / (4.0 * std::numbers::pi) + 0.25, 1e-15);
  EXPECT_EQ(z(0, 0).imag(), 0.0);
}

TEST(Generate, GeneratorIsTransposeSymmetric) {
  const auto sys = generate(ArrayProblemSpec::with_defaults(3, 3, 3, 7));
  for (int d2 = -2; d2 <= 2; ++d2)
    for (int d1 = -2; d1 <= 2; ++d1)
      EXPECT_EQ(sys.gen.at(d2, d1), sys.gen.at(-d2, -d1).transposed()) << d2 << "," << d1;
}

TEST(Generate, FullMatrixIsComplexSymmetric) {
  const auto sys = generate(ArrayProblemSpec::with_defaults(2, 3, 2, 3));
  const auto z = assemble_full(sys);
  EXPECT_EQ(z.rows(), 2u * 3u * 2u + 8u * 5u);
  EXPECT_EQ(z, z.transposed());
}

TEST(Generate, ArrayBlockIsTwoLevelToeplitz) {
  auto spec = ArrayProblemSpec::with_defaults(3, 3, 2, 11);
  spec.nb = 0;
  const auto z = assemble_full(generate(spec));
  const std::size_t ne = 2, nx = 3;
  auto idx = [&](std::size_t row, std::size_t col, std::size_t k) { return (row * nx + col) * ne + k; };
  for (std::size_t k = 0; k < ne; ++k)
    for (std::size_t l = 0; l < ne; ++l) {
      EXPECT_EQ(z(idx(1, 1, k), idx(0, 0, l)), z(idx(2, 2, k), idx(1, 1, l)));
      EXPECT_EQ(z(idx(0, 2, k), idx(1, 0, l)), z(idx(1, 2, k), idx(2, 0, l)));
    }
}

TEST(Generate, IsDeterministicInSeed) {
  const auto spec = ArrayProblemSpec::with_defaults(2, 2, 3, 42);
  EXPECT_EQ(generate(spec), generate(spec));
  auto other = spec;
  other.seed = 43;
  EXPECT_NE(generate(spec).zb, generate(other).zb);
}

TEST(Generate, RejectsInvalidSpec) {
  auto spec = ArrayProblemSpec::with_defaults(2, 2, 1);
  spec.regularization = 0.0;
  EXPECT_EQ(code_of([&] { generate(spec); }), ErrorCode::InvalidSpec);
  spec = ArrayProblemSpec::with_defaults(0, 2, 1);
  EXPECT_EQ(code_of([&] { generate(spec); }), ErrorCode::InvalidSpec);
}

TEST(Generate, OracleCapIsEnforced) {
  const auto sys = generate(ArrayProblemSpec::with_defaults(2, 2, 2));
  EXPECT_EQ(code_of([&] { assemble_full(sys, sys.dimension() - 1); }),
            ErrorCode::TooLargeForOracle);
}

TEST(Excitations, UnitVoltageOnFeedOfEachElement) {
  const auto sys = generate(ArrayProblemSpec::with_defaults(2, 3, 4));
  const auto ex = build_excitations(sys, 2);
  ASSERT_EQ(ex.v.rows(), sys.dimension());
  ASSERT_EQ(ex.v.cols(), 6u);
  for (std::size_t c = 0; c < 6; ++c)
    for (std::size_t r = 0; r < sys.dimension(); ++r)
      EXPECT_EQ(ex.v(r, c), r == c * 4 + 2 ? cplx(1.0) : cplx(0.0));
  EXPECT_EQ(code_of([&] { build_excitations(sys, 4); }), ErrorCode::IndexOutOfRange);
}

TEST(Serialization, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64({}), 0xcbf29ce484222325ULL);
  const std::uint8_t a[] = {'a'};
  EXPECT_EQ(fnv1a64(a), 0xaf63dc4c8601ec8cULL);
  const std::uint8_t foobar[] = {'f', 'o', 'o', 'b', 'a', 'r'};
  EXPECT_EQ(fnv1a64(foobar), 0x85944171f73967e8ULL);
}

TEST(Serialization, SystemRoundTripIsBitExact) {
  const auto sys = generate(ArrayProblemSpec::with_defaults(2, 3, 2, 5));
  const auto path = temp_file("roundtrip.tbz");
  save(sys, path);
  const auto back = load(path);
  EXPECT_EQ(back, sys);
  EXPECT_EQ(serialize(back), serialize(sys));
  std::filesystem::remove(path);
}

TEST(Serialization, TruncatedFileIsDetected) {
  auto bytes = serialize(generate(ArrayProblemSpec::with_defaults(2, 2, 2)));
  bytes.resize(bytes.size() - 20);
  EXPECT_EQ(code_of([&] { deserialize(bytes); }), ErrorCode::ChecksumMismatch);
}

TEST(Serialization, CorruptedPayloadIsDetected) {
  auto bytes = serialize(generate(ArrayProblemSpec::with_defaults(2, 2, 2)));
  bytes[bytes.size() - 30] ^= 0x01;
  EXPECT_EQ(code_of([&] { deserialize(bytes); }), ErrorCode::ChecksumMismatch);
}

TEST(Serialization, UnknownVersionIsRejected) {
  auto bytes = serialize(generate(ArrayProblemSpec::with_defaults(1, 2, 1)));
  const std::string text(bytes.begin(), bytes.end());
  const auto pos = text.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos + 10] = '2';
  EXPECT_EQ(code_of([&] { deserialize(bytes); }), ErrorCode::FormatVersionMismatch);
}

TEST(Serialization, BadMagicIsIoError) {
  auto bytes = serialize(generate(ArrayProblemSpec::with_defaults(1, 1, 1)));
  bytes[0] = 'X';
  EXPECT_EQ(code_of([&] { deserialize(bytes); }), ErrorCode::IoError);
  EXPECT_EQ(code_of([&] { load(temp_file("does_not_exist.tbz")); }), ErrorCode::IoError);
}

TEST(Serialization, CurrentsRoundTrip) {
  DenseBlock c(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) c(i, j) = cplx(0.1 * i - 1e-300, std::ldexp(1.0, -int(j) * 40));
  const auto path = temp_file("currents.tbc");
  save_currents(c, path);
  EXPECT_EQ(load_currents(path), c);
  std::filesystem::remove(path);
  auto bytes = serialize_currents(c);
  bytes.pop_back();
  EXPECT_EQ(code_of([&] { deserialize_currents(bytes); }), ErrorCode::ChecksumMismatch);
}

}  // namespace
}  // namespace toepsolve
