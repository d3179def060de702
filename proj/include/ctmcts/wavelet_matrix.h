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
#include <span>
#include <vector>

#include "ctmcts/bit_vector.h"

namespace ctmcts {

// Wavelet matrix over small integer codes (< 2^bits, bits <= 8).
// access and rank run in O(bits); distinct-symbol listing over a range runs in
// O(k * bits) for k distinct symbols.
class WaveletMatrix {
 public:
  struct RangeSymbol {
    std::uint8_t code;
    std::size_t rank_lo;  // rank(code, lo)
    std::size_t rank_hi;  // rank(code, hi)
  };

  WaveletMatrix() = default;
  WaveletMatrix(std::span<const std::uint8_t> codes, unsigned bits);

  std::uint8_t access(std::size_t i) const;
  // Occurrences of `code` in [0, i).
  std::size_t rank(std::uint8_t code, std::size_t i) const;
  // The code at i and its occurrences in [0, i), in one descent.
  RangeSymbol access_rank(std::size_t i) const;
  // Every code present in [lo, hi), ascending, with its ranks at both ends.
  std::vector<RangeSymbol> distinct_in_range(std::size_t lo, std::size_t hi) const;

  std::size_t size() const { return size_; }
  unsigned bits() const { return bits_; }

  void save(BinaryWriter& w) const;
  static WaveletMatrix load(BinaryReader& r);

 private:
  void index_code_starts();
  void list(unsigned level, std::size_t lo, std::size_t hi, std::size_t start,
            std::uint8_t value, std::vector<RangeSymbol>& out) const;

  std::size_t size_ = 0;
  unsigned bits_ = 0;
  std::vector<BitVector> levels_;
  std::vector<std::size_t> zeros_;
  // Final-level position of index 0 along each code's path; derived, not saved.
  std::vector<std::size_t> code_start_;
};

}  // namespace ctmcts
