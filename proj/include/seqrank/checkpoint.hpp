// Copyright 2026 The SeqRank Authors.
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

#ifndef SEQRANK_CHECKPOINT_HPP_
#define SEQRANK_CHECKPOINT_HPP_

// Binary checkpoint shared by every model kind.
//
//   magic      8 bytes  "SEQRANK1"
//   kind       u32 length + UTF-8 bytes
//   d, F_v, F_t  u32 each
//   mask       u8 (bit 0 latent, bit 1 visual, bit 2 textual)
//   seed       u64
//   items      u64 count, then u32 length + bytes per id
//   users      u64 count, then u32 length + bytes per id
//   blocks     u32 count, then per block: u32 name length + name,
//              u64 rows, u64 cols, rows*cols f64
//
// All integers and floats are little-endian; matrices are row-major.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "seqrank/error.hpp"
#include "seqrank/numkit.hpp"

namespace seqrank {

inline constexpr std::array<char, 8> kCheckpointMagic = {'S', 'E', 'Q', 'R', 'A', 'N', 'K', '1'};

struct Checkpoint {
  std::string kind;
  std::uint32_t d = 0;
  std::uint32_t visual_dim = 0;
  std::uint32_t textual_dim = 0;
  std::uint8_t mask = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> item_ids;
  std::vector<std::string> user_ids;
  std::vector<std::pair<std::string, Mat>> blocks;

  bool operator==(const Checkpoint&) const = default;

  const Mat* find_block(const std::string& name) const {
    for (const auto& [n, m] : blocks)
      if (n == name) return &m;
    return nullptr;
  }

  // The block must exist with exactly the given shape.
  const Mat& block(const std::string& name, std::size_t rows, std::size_t cols) const {
    const Mat* m = find_block(name);
    if (!m) throw DataError("checkpoint (" + kind + ") lacks block '" + name + "'");
    if (m->rows() != rows || m->cols() != cols)
      throw DataError("checkpoint block '" + name + "' is " + std::to_string(m->rows()) + "x" +
                      std::to_string(m->cols()) + " but the header implies " + std::to_string(rows) + "x" +
                      std::to_string(cols));
    return *m;
  }
};

namespace detail {

template <typename UInt>
void put_le(std::ostream& out, UInt v) {
  char buf[sizeof(UInt)];
  for (std::size_t k = 0; k < sizeof(UInt); ++k) buf[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  out.write(buf, sizeof(UInt));
}

template <typename UInt>
UInt get_le(std::istream& in) {
  unsigned char buf[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(UInt))) throw DataError("checkpoint truncated");
  UInt v = 0;
  for (std::size_t k = 0; k < sizeof(UInt); ++k) v |= static_cast<UInt>(buf[k]) << (8 * k);
  return v;
}

inline void put_string(std::ostream& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
  const auto n = get_le<std::uint32_t>(in);
  if (n > (1u << 24)) throw DataError("checkpoint string length " + std::to_string(n) + " is implausible");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n)) throw DataError("checkpoint truncated");
  return s;
}

inline void put_ids(std::ostream& out, const std::vector<std::string>& ids) {
  put_le<std::uint64_t>(out, ids.size());
  for (const auto& s : ids) put_string(out, s);
}

inline std::vector<std::string> get_ids(std::istream& in) {
  const auto n = get_le<std::uint64_t>(in);
  std::vector<std::string> ids;
  for (std::uint64_t k = 0; k < n; ++k) ids.push_back(get_string(in));
  return ids;
}

}  // namespace detail

inline void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::put_string(out, ck.kind);
  detail::put_le<std::uint32_t>(out, ck.d);
  detail::put_le<std::uint32_t>(out, ck.visual_dim);
  detail::put_le<std::uint32_t>(out, ck.textual_dim);
  detail::put_le<std::uint8_t>(out, ck.mask);
  detail::put_le<std::uint64_t>(out, ck.seed);
  detail::put_ids(out, ck.item_ids);
  detail::put_ids(out, ck.user_ids);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ck.blocks.size()));
  for (const auto& [name, m] : ck.blocks) {
    detail::put_string(out, name);
    detail::put_le<std::uint64_t>(out, m.rows());
    detail::put_le<std::uint64_t>(out, m.cols());
    for (double v : m.flat()) detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw DataError("failed writing checkpoint");
}

inline Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kCheckpointMagic)
    throw DataError("not a checkpoint: bad magic (expected SEQRANK1)");
  Checkpoint ck;
  ck.kind = detail::get_string(in);
  ck.d = detail::get_le<std::uint32_t>(in);
  ck.visual_dim = detail::get_le<std::uint32_t>(in);
  ck.textual_dim = detail::get_le<std::uint32_t>(in);
  ck.mask = detail::get_le<std::uint8_t>(in);
  ck.seed = detail::get_le<std::uint64_t>(in);
  ck.item_ids = detail::get_ids(in);
  ck.user_ids = detail::get_ids(in);
  const auto n_blocks = detail::get_le<std::uint32_t>(in);
  for (std::uint32_t b = 0; b < n_blocks; ++b) {
    std::string name = detail::get_string(in);
    const auto rows = detail::get_le<std::uint64_t>(in);
    const auto cols = detail::get_le<std::uint64_t>(in);
    if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols)
      throw DataError("checkpoint block '" + name + "' has implausible shape");
    Mat m(rows, cols);
    for (double& v : m.flat()) v = std::bit_cast<double>(detail::get_le<std::uint64_t>(in));
    ck.blocks.emplace_back(std::move(name), std::move(m));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("checkpoint has trailing bytes");
  return ck;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  write_checkpoint(out, ck);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace seqrank

#endif  // SEQRANK_CHECKPOINT_HPP_
