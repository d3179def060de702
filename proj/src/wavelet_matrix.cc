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

#include "ctmcts/wavelet_matrix.h"

#include "ctmcts/error.h"

namespace ctmcts {

WaveletMatrix::WaveletMatrix(std::span<const std::uint8_t> codes, unsigned bits)
    : size_(codes.size()), bits_(bits) {
  if (bits == 0 || bits > 8) throw ContractError("wavelet matrix: bits must be in [1,8]");
  std::vector<std::uint8_t> cur(codes.begin(), codes.end());
  std::vector<std::uint8_t> next(cur.size());
  levels_.reserve(bits);
  zeros_.reserve(bits);
  for (unsigned level = 0; level < bits; ++level) {
    const unsigned shift = bits - 1 - level;
    BitVector bv(size_);
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < size_; ++i) {
      if ((cur[i] >> shift) & 1U) {
        bv.set(i);
      } else {
        ++zeros;
      }
    }
    bv.build_rank();
    std::size_t z = 0, o = zeros;
    for (std::size_t i = 0; i < size_; ++i) {
      if ((cur[i] >> shift) & 1U) {
        next[o++] = cur[i];
      } else {
        next[z++] = cur[i];
      }
    }
    cur.swap(next);
    levels_.push_back(std::move(bv));
    zeros_.push_back(zeros);
  }
  index_code_starts();
}

void WaveletMatrix::index_code_starts() {
  code_start_.assign(std::size_t{1} << bits_, 0);
  for (std::size_t code = 0; code < code_start_.size(); ++code) {
    std::size_t start = 0;
    for (unsigned level = 0; level < bits_; ++level) {
      const BitVector& bv = levels_[level];
      start = (code >> (bits_ - 1 - level)) & 1U ? zeros_[level] + bv.rank1(start)
                                                   : bv.rank0(start);
    }
    code_start_[code] = start;
  }
}

std::uint8_t WaveletMatrix::access(std::size_t i) const {
  std::uint8_t value = 0;
  for (unsigned level = 0; level < bits_; ++level) {
    const BitVector& bv = levels_[level];
    value = static_cast<std::uint8_t>(value << 1);
    if (bv.get(i)) {
      value |= 1;
      i = zeros_[level] + bv.rank1(i);
    } else {
      i = bv.rank0(i);
    }
  }
  return value;
}

std::size_t WaveletMatrix::rank(std::uint8_t code, std::size_t i) const {
  if (code >= code_start_.size()) return 0;
  for (unsigned level = 0; level < bits_; ++level) {
    const BitVector& bv = levels_[level];
    i = (code >> (bits_ - 1 - level)) & 1U ? zeros_[level] + bv.rank1(i) : bv.rank0(i);
  }
  return i - code_start_[code];
}

WaveletMatrix::RangeSymbol WaveletMatrix::access_rank(std::size_t i) const {
  std::uint8_t value = 0;
  for (unsigned level = 0; level < bits_; ++level) {
    const BitVector& bv = levels_[level];
    value = static_cast<std::uint8_t>(value << 1);
    if (bv.get(i)) {
      value |= 1;
      i = zeros_[level] + bv.rank1(i);
    } else {
      i = bv.rank0(i);
    }
  }
  const std::size_t r = i - code_start_[value];
  return {value, r, r};
}

std::vector<WaveletMatrix::RangeSymbol> WaveletMatrix::distinct_in_range(
    std::size_t lo, std::size_t hi) const {
  std::vector<RangeSymbol> out;
  if (lo < hi) list(0, lo, hi, 0, 0, out);
  return out;
}

void WaveletMatrix::list(unsigned level, std::size_t lo, std::size_t hi,
                         std::size_t start, std::uint8_t value,
                         std::vector<RangeSymbol>& out) const {
  if (lo >= hi) return;
  if (level == bits_) {
    out.push_back({value, lo - start, hi - start});
    return;
  }
  const BitVector& bv = levels_[level];
  const auto v0 = static_cast<std::uint8_t>(value << 1);
  list(level + 1, bv.rank0(lo), bv.rank0(hi), bv.rank0(start), v0, out);
  const std::size_t z = zeros_[level];
  list(level + 1, z + bv.rank1(lo), z + bv.rank1(hi), z + bv.rank1(start),
       static_cast<std::uint8_t>(v0 | 1U), out);
}

void WaveletMatrix::save(BinaryWriter& w) const {
  w.pod<std::uint64_t>(size_);
  w.pod<std::uint32_t>(bits_);
  for (unsigned l = 0; l < bits_; ++l) {
    w.pod<std::uint64_t>(zeros_[l]);
    levels_[l].save(w);
  }
}

WaveletMatrix WaveletMatrix::load(BinaryReader& r) {
  WaveletMatrix wm;
  wm.size_ = r.pod<std::uint64_t>();
  wm.bits_ = r.pod<std::uint32_t>();
  if (wm.bits_ == 0 || wm.bits_ > 8) throw ParseError("index file: bad wavelet depth");
  for (unsigned l = 0; l < wm.bits_; ++l) {
    wm.zeros_.push_back(r.pod<std::uint64_t>());
    wm.levels_.push_back(BitVector::load(r));
    if (wm.levels_.back().size() != wm.size_)
      throw ParseError("index file: wavelet level size mismatch");
  }
  wm.index_code_starts();
  return wm;
}

}  // namespace ctmcts
