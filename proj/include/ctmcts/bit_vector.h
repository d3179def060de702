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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ctmcts/binary_io.h"

namespace ctmcts {

// Plain bit vector with constant-time rank. Each 512-bit block stores a 64-bit
// cumulative count plus seven packed 9-bit in-block counts, so a rank costs one
// popcount.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size);

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  // Must be called after the last set() and before any rank query.
  void build_rank();

  // Ones in [0, i).
  std::size_t rank1(std::size_t i) const;
  std::size_t rank0(std::size_t i) const { return i - rank1(i); }

  std::size_t size() const { return size_; }
  std::size_t ones() const { return size_ == 0 ? 0 : rank1(size_); }

  void save(BinaryWriter& w) const;
  static BitVector load(BinaryReader& r);

  bool operator==(const BitVector& o) const {
    return size_ == o.size_ && words_ == o.words_;
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> blocks_;
};

}  // namespace ctmcts
