// Copyright 2025 The ctmcts Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctmcts/bit_vector.h"

#include <bit>

namespace ctmcts {

namespace {
constexpr std::size_t kWordsPerBlock = 8;
}

BitVector::BitVector(std::size_t size)
    : size_(size), words_((size + 63) / 64 + 1, 0) {}

void BitVector::build_rank() {
  // blocks_[2b] = ones before block b; blocks_[2b+1] packs, for word j in
  // 1..7 of the block, the ones in words [0, j) at bits 9*(j-1).
  blocks_.assign(2 * (words_.size() / kWordsPerBlock + 1), 0);
  std::uint64_t total = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const std::size_t block = w / kWordsPerBlock;
    const std::size_t j = w % kWordsPerBlock;
    if (j == 0) blocks_[2 * block] = total;
    else
      blocks_[2 * block + 1] |= (total - blocks_[2 * block]) << (9 * (j - 1));
    total += static_cast<std::uint64_t>(std::popcount(words_[w]));
  }
}

std::size_t BitVector::rank1(std::size_t i) const {
  const std::size_t word = i >> 6;
  const std::size_t block = word / kWordsPerBlock;
  const std::size_t j = word % kWordsPerBlock;
  std::size_t r = blocks_[2 * block];
  if (j != 0) r += (blocks_[2 * block + 1] >> (9 * (j - 1))) & 0x1FF;
  const unsigned bit = i & 63;
  if (bit != 0)
    r += static_cast<std::size_t>(
        std::popcount(words_[word] & ((std::uint64_t{1} << bit) - 1)));
  return r;
}

void BitVector::save(BinaryWriter& w) const {
  w.pod<std::uint64_t>(size_);
  w.vec(words_);
  w.vec(blocks_);
}

BitVector BitVector::load(BinaryReader& r) {
  BitVector bv;
  bv.size_ = r.pod<std::uint64_t>();
  bv.words_ = r.vec<std::uint64_t>();
  bv.blocks_ = r.vec<std::uint64_t>();
  if (bv.words_.size() != (bv.size_ + 63) / 64 + 1 ||
      bv.blocks_.size() != 2 * (bv.words_.size() / kWordsPerBlock + 1))
    throw ParseError("index file: inconsistent bit vector");
  return bv;
}

}  // namespace ctmcts
