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

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctmcts/bit_vector.h"
#include "ctmcts/corpus.h"
#include "ctmcts/wavelet_matrix.h"

namespace ctmcts {

// Half-open range of index rows matching some pattern. Its width is the
// pattern's occurrence count.
struct IndexInterval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  std::uint64_t width() const { return hi - lo; }
  bool empty() const { return hi <= lo; }
  bool operator==(const IndexInterval&) const = default;
};

// One occurrence of a pattern: the document and the byte offset in its body.
struct Occurrence {
  DocId doc = 0;
  std::size_t offset = 0;
  bool operator==(const Occurrence&) const = default;
  auto operator<=>(const Occurrence&) const = default;
};

// FM-index over the document bodies, each terminated by a sentinel byte (0).
//
// The index is built over the reversed concatenation so that a backward-search
// step appends a symbol to the pattern in text order; callers only ever see
// forward extension. Patterns never match across a sentinel.
//
// Immutable after construction and safe to share between threads.
class CorpusIndex {
 public:
  static constexpr std::uint8_t kSentinel = 0;
  static constexpr std::uint32_t kDefaultSampleRate = 32;

  struct NextSymbol {
    std::uint8_t symbol;
    IndexInterval interval;
  };

  CorpusIndex() = default;

  // Throws BuildError for an empty corpus, an empty body, a body containing
  // the sentinel byte (reported with the document id) or sample_rate == 0.
  static CorpusIndex build(std::span<const Document> docs,
                           std::uint32_t sample_rate = kDefaultSampleRate);

  // Interval of the empty pattern: every row.
  IndexInterval root() const { return {0, size_}; }

  // Extends the pattern behind `iv` by one symbol on the right. Empty result
  // means the extended pattern does not occur; symbols outside the alphabet
  // (including the sentinel) always give an empty result.
  IndexInterval extend(IndexInterval iv, std::uint8_t symbol) const;
  IndexInterval extend(IndexInterval iv, std::string_view symbols) const;

  IndexInterval find(std::string_view pattern) const { return extend(root(), pattern); }
  std::uint64_t count(std::string_view pattern) const { return find(pattern).width(); }

  // Every text symbol that extends `iv` to a non-empty interval, ascending.
  std::vector<NextSymbol> next_symbols(IndexInterval iv) const;

  // Occurrences behind `iv` for a pattern of `pattern_length` bytes, sorted.
  std::vector<Occurrence> locate(IndexInterval iv, std::size_t pattern_length) const;
  // Ids of the documents containing at least one occurrence, ascending.
  std::vector<DocId> locate_docs(IndexInterval iv) const;

  // Total indexed length including one sentinel per document.
  std::uint64_t size() const { return size_; }
  std::size_t num_documents() const { return doc_ids_.size(); }
  const std::vector<DocId>& doc_ids() const { return doc_ids_; }
  std::uint32_t sample_rate() const { return sample_rate_; }
  bool contains_symbol(std::uint8_t symbol) const {
    return symbol != kSentinel && code_of_[symbol] != kAbsent;
  }
  // Text symbols present in the corpus, ascending.
  std::vector<std::uint8_t> alphabet() const;

  void save(std::ostream& out) const;
  static CorpusIndex load(std::istream& in);

 private:
  static constexpr std::uint8_t kAbsent = 0xFF;

  // Text position (in the reversed concatenation) of row `row`.
  std::uint64_t row_position(std::uint64_t row) const;
  std::size_t doc_ordinal(std::uint64_t position) const;

  std::uint64_t size_ = 0;
  std::uint32_t sample_rate_ = kDefaultSampleRate;
  std::array<std::uint8_t, 256> code_of_{};
  std::vector<std::uint8_t> symbol_of_;   // code -> byte
  std::vector<std::uint64_t> first_row_;  // code -> first row (C array)
  WaveletMatrix bwt_;
  BitVector sampled_;
  std::vector<std::uint64_t> samples_;
  std::vector<std::uint64_t> doc_starts_;
  std::vector<std::uint64_t> doc_lengths_;
  std::vector<DocId> doc_ids_;
};

// Index plus the documents it was built from; the on-disk unit used by the CLI.
struct IndexBundle {
  CorpusIndex index;
  std::vector<Document> documents;
};

// File layout: "CTIX", version byte, index sections, then the documents.
void save_index_file(const std::string& path, const CorpusIndex& index,
                     std::span<const Document> docs);
IndexBundle load_index_file(const std::string& path);

}  // namespace ctmcts
