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

// File layout shared by TBZ1 and TBC1:
//   magic line ("TBZ1\n" / "TBC1\n")
//   u64 little-endian byte length of the JSON header, then the header
//   payload: interleaved (re, im) little-endian IEEE-754 doubles
//   u64 little-endian FNV-1a 64 of the payload bytes

#include <algorithm>
#include <bit>
#include <functional>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "json.hpp"
#include "toepsolve/error.hpp"
#include "toepsolve/problems.hpp"

namespace toepsolve {

namespace {

static_assert(std::endian::native == std::endian::little,
              "payload I/O assumes a little-endian host");

constexpr std::string_view kTbzMagic = "TBZ1\n";
constexpr std::string_view kTbcMagic = "TBC1\n";

using Bytes = std::vector<std::uint8_t>;

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

void put_block(Bytes& out, const DenseBlock& b) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(b.data());
  out.insert(out.end(), p, p + b.size() * sizeof(cplx));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  std::span<const std::uint8_t> take(std::size_t n, ErrorCode on_short, const char* what) {
    if (remaining() < n) fail(on_short, std::string("file ends inside ") + what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  DenseBlock block(std::size_t rows, std::size_t cols) {
    DenseBlock b(rows, cols);
    auto raw = take(b.size() * sizeof(cplx), ErrorCode::ChecksumMismatch, "payload");
    std::memcpy(b.data(), raw.data(), raw.size());
    return b;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

Bytes frame(std::string_view magic, const nlohmann::json& header,
            const std::function<void(Bytes&)>& write_payload) {
  Bytes out(magic.begin(), magic.end());
  const std::string text = header.dump();
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  const std::size_t payload_start = out.size();
  write_payload(out);
  const std::uint64_t sum =
      fnv1a64(std::span<const std::uint8_t>(out).subspan(payload_start));
  put_u64(out, sum);
  return out;
}

nlohmann::json read_header(Reader& r, std::string_view magic, int version) {
  auto m = r.take(magic.size(), ErrorCode::IoError, "magic");
  if (!std::equal(m.begin(), m.end(), magic.begin())) {
    fail(ErrorCode::IoError, "bad magic, expected " + std::string(magic.substr(0, 4)));
  }
  const std::uint64_t len = get_u64(r.take(8, ErrorCode::IoError, "header length"));
  if (len > r.remaining()) fail(ErrorCode::IoError, "header length exceeds file size");
  auto text = r.take(static_cast<std::size_t>(len), ErrorCode::IoError, "header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, std::string("malformed header: ") + e.what());
  }
  if (!header.is_object() || !header.contains("version") ||
      !header["version"].is_number_integer()) {
    fail(ErrorCode::IoError, "header has no integer version");
  }
  if (header["version"].get<int>() != version) {
    fail(ErrorCode::FormatVersionMismatch,
         "file version " + std::to_string(header["version"].get<long long>()) +
             ", reader supports " + std::to_string(version));
  }
  if (header.value("dtype", "") != "c128" || header.value("order", "") != "row-major" ||
      header.value("endian", "") != "little") {
    fail(ErrorCode::IoError, "unsupported dtype/order/endian in header");
  }
  return header;
}

template <typename T>
T field(const nlohmann::json& h, const char* key) {
  try {
    return h.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::IoError, std::string("header field '") + key + "' missing or mistyped");
  }
}

void check_trailer(Reader& r, std::span<const std::uint8_t> bytes, std::size_t payload_start) {
  if (r.remaining() != 8) {
    fail(ErrorCode::ChecksumMismatch, "payload size does not match header dimensions");
  }
  const std::size_t payload_len = r.position() - payload_start;
  const std::uint64_t stored = get_u64(r.take(8, ErrorCode::ChecksumMismatch, "checksum"));
  const std::uint64_t actual = fnv1a64(bytes.subspan(payload_start, payload_len));
  if (stored != actual) fail(ErrorCode::ChecksumMismatch, "payload checksum differs");
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::IoError, "read failed for " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Bytes serialize(const BorderedSystem& sys) {
  const auto& s = sys.spec;
  nlohmann::json header = {
      {"version", kTbzVersion}, {"ny", s.ny},         {"nx", s.nx},
      {"ne", s.ne},             {"nb", s.nb},         {"seed", s.seed},
      {"k", s.wavenumber},      {"pitch", s.pitch},   {"a", s.regularization},
      {"shift", s.diagonal_shift}, {"dtype", "c128"}, {"order", "row-major"},
      {"endian", "little"},
  };
  return frame(kTbzMagic, header, [&](Bytes& out) {
    for (const auto& level : sys.gen.columns())
      for (const auto& b : level.column()) put_block(out, b);
    put_block(out, sys.zb);
    put_block(out, sys.zc);
  });
}

BorderedSystem deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto h = read_header(r, kTbzMagic, kTbzVersion);
  ArrayProblemSpec spec;
  spec.ny = field<std::size_t>(h, "ny");
  spec.nx = field<std::size_t>(h, "nx");
  spec.ne = field<std::size_t>(h, "ne");
  spec.nb = field<std::size_t>(h, "nb");
  spec.seed = field<std::uint64_t>(h, "seed");
  spec.wavenumber = field<double>(h, "k");
  spec.pitch = field<double>(h, "pitch");
  spec.regularization = field<double>(h, "a");
  spec.diagonal_shift = field<double>(h, "shift");
  try {
    spec.validate();
  } catch (const Error& e) {
    fail(ErrorCode::IoError, std::string("header describes an invalid problem: ") + e.what());
  }
  const std::size_t expected =
      (spec.nb * spec.array_unknowns() + spec.nb * spec.nb +
       circulant_size(spec.ny) * circulant_size(spec.nx) * spec.ne * spec.ne) *
      sizeof(cplx);
  if (r.remaining() != expected + 8) {
    fail(ErrorCode::ChecksumMismatch, "payload is " + std::to_string(r.remaining()) +
                                          " bytes, header implies " +
                                          std::to_string(expected + 8));
  }

  const std::size_t payload_start = r.position();
  std::vector<BlockGenerator1L> levels;
  for (std::size_t c2 = 0; c2 < circulant_size(spec.ny); ++c2) {
    std::vector<DenseBlock> column;
    for (std::size_t c1 = 0; c1 < circulant_size(spec.nx); ++c1)
      column.push_back(r.block(spec.ne, spec.ne));
    levels.emplace_back(spec.nx, spec.ne, std::move(column));
  }
  DenseBlock zb = r.block(spec.nb, spec.array_unknowns());
  DenseBlock zc = r.block(spec.nb, spec.nb);
  check_trailer(r, bytes, payload_start);
  return BorderedSystem{spec, BlockGenerator2L(spec.ny, std::move(levels)), std::move(zb),
                        std::move(zc)};
}

void save(const BorderedSystem& sys, const std::filesystem::path& path) {
  write_file(path, serialize(sys));
}

BorderedSystem load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

Bytes serialize_currents(const DenseBlock& currents) {
  nlohmann::json header = {{"version", kTbcVersion}, {"rows", currents.rows()},
                           {"cols", currents.cols()}, {"dtype", "c128"},
                           {"order", "row-major"},    {"endian", "little"}};
  return frame(kTbcMagic, header, [&](Bytes& out) { put_block(out, currents); });
}

DenseBlock deserialize_currents(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto h = read_header(r, kTbcMagic, kTbcVersion);
  const auto rows = field<std::size_t>(h, "rows");
  const auto cols = field<std::size_t>(h, "cols");
  if (r.remaining() != rows * cols * sizeof(cplx) + 8) {
    fail(ErrorCode::ChecksumMismatch, "payload size does not match header dimensions");
  }
  const std::size_t payload_start = r.position();
  DenseBlock b = r.block(rows, cols);
  check_trailer(r, bytes, payload_start);
  return b;
}

void save_currents(const DenseBlock& currents, const std::filesystem::path& path) {
  write_file(path, serialize_currents(currents));
}

DenseBlock load_currents(const std::filesystem::path& path) {
  return deserialize_currents(read_file(path));
}

}  // namespace toepsolve
