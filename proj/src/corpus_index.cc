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

#include "ctmcts/corpus_index.h"

#include <algorithm>
#include <bit>
#include <fstream>

#include "ctmcts/binary_io.h"
#include "ctmcts/error.h"
#include "ctmcts/suffix_array.h"

namespace ctmcts {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'I', 'X'};
constexpr std::uint8_t kFormatVersion = 1;

}  // namespace

CorpusIndex CorpusIndex::build(std::span<const Document> docs,
                               std::uint32_t sample_rate) {
  if (docs.empty()) throw BuildError("cannot build an index over an empty corpus");
  if (sample_rate == 0) throw BuildError("suffix-array sample rate must be >= 1");

  CorpusIndex idx;
  idx.sample_rate_ = sample_rate;

  std::vector<std::uint8_t> text;
  std::size_t total = 0;
  for (const Document& d : docs) total += d.body.size() + 1;
  text.reserve(total);
  for (const Document& d : docs) {
    if (d.body.empty())
      throw BuildError("document " + std::to_string(d.id) + " has an empty body");
    if (d.body.find(static_cast<char>(kSentinel)) != std::string::npos)
      throw BuildError("document " + std::to_string(d.id) +
                       " contains the reserved sentinel symbol");
    idx.doc_starts_.push_back(text.size());
    idx.doc_lengths_.push_back(d.body.size());
    idx.doc_ids_.push_back(d.id);
    for (auto it = d.body.rbegin(); it != d.body.rend(); ++it)
      text.push_back(static_cast<std::uint8_t>(*it));
    text.push_back(kSentinel);
  }
  idx.size_ = text.size();

  std::array<bool, 256> present{};
  for (auto b : text) present[b] = true;
  idx.code_of_.fill(kAbsent);
  for (unsigned b = 0; b < 256; ++b) {
    if (!present[b]) continue;
    idx.code_of_[b] = static_cast<std::uint8_t>(idx.symbol_of_.size());
    idx.symbol_of_.push_back(static_cast<std::uint8_t>(b));
  }
  const std::size_t sigma = idx.symbol_of_.size();

  std::vector<std::uint64_t> counts(sigma, 0);
  for (auto b : text) ++counts[idx.code_of_[b]];
  idx.first_row_.assign(sigma + 1, 0);
  for (std::size_t c = 0; c < sigma; ++c)
    idx.first_row_[c + 1] = idx.first_row_[c] + counts[c];

  const std::vector<std::uint32_t> sa = build_suffix_array(text);
  std::vector<std::uint8_t> bwt(text.size());
  idx.sampled_ = BitVector(text.size());
  for (std::size_t row = 0; row < sa.size(); ++row) {
    const std::uint32_t pos = sa[row];
    const std::uint8_t prev = pos == 0 ? text.back() : text[pos - 1];
    bwt[row] = idx.code_of_[prev];
    // Rows preceded by a sentinel are always sampled so the LF walk in
    // locate never has to step across a document boundary.
    if (pos % sample_rate == 0 || prev == kSentinel) {
      idx.sampled_.set(row);
      idx.samples_.push_back(pos);
    }
  }
  idx.sampled_.build_rank();
  const unsigned bits = std::max(1U, static_cast<unsigned>(std::bit_width(sigma - 1)));
  idx.bwt_ = WaveletMatrix(bwt, bits);
  return idx;
}

IndexInterval CorpusIndex::extend(IndexInterval iv, std::uint8_t symbol) const {
  const std::uint8_t code = code_of_[symbol];
  if (code == kAbsent || symbol == kSentinel || iv.empty()) return {0, 0};
  const std::uint64_t base = first_row_[code];
  return {base + bwt_.rank(code, iv.lo), base + bwt_.rank(code, iv.hi)};
}

IndexInterval CorpusIndex::extend(IndexInterval iv, std::string_view symbols) const {
  for (char ch : symbols) {
    iv = extend(iv, static_cast<std::uint8_t>(ch));
    if (iv.empty()) return {0, 0};
  }
  return iv;
}

std::vector<CorpusIndex::NextSymbol> CorpusIndex::next_symbols(IndexInterval iv) const {
  std::vector<NextSymbol> out;
  if (iv.empty()) return out;
  for (const auto& rs : bwt_.distinct_in_range(iv.lo, iv.hi)) {
    const std::uint8_t byte = symbol_of_[rs.code];
    if (byte == kSentinel) continue;
    const std::uint64_t base = first_row_[rs.code];
    out.push_back({byte, {base + rs.rank_lo, base + rs.rank_hi}});
  }
  return out;
}

std::uint64_t CorpusIndex::row_position(std::uint64_t row) const {
  std::uint64_t steps = 0;
  while (!sampled_.get(row)) {
    const auto step = bwt_.access_rank(row);
    row = first_row_[step.code] + step.rank_lo;
    ++steps;
  }
  return samples_[sampled_.rank1(row)] + steps;
}

std::size_t CorpusIndex::doc_ordinal(std::uint64_t position) const {
  auto it = std::upper_bound(doc_starts_.begin(), doc_starts_.end(), position);
  return static_cast<std::size_t>(it - doc_starts_.begin()) - 1;
}

std::vector<Occurrence> CorpusIndex::locate(IndexInterval iv,
                                            std::size_t pattern_length) const {
  std::vector<Occurrence> out;
  if (iv.empty()) return out;
  out.reserve(iv.width());
  for (std::uint64_t row = iv.lo; row < iv.hi; ++row) {
    const std::uint64_t pos = row_position(row);
    const std::size_t k = doc_ordinal(pos);
    const std::uint64_t local = pos - doc_starts_[k];
    // In the reversed document the match ends at `local`; map back to the
    // start offset in the forward body.
    const std::uint64_t end = doc_lengths_[k] - local;
    out.push_back({doc_ids_[k], static_cast<std::size_t>(end - std::min<std::uint64_t>(end, pattern_length))});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<DocId> CorpusIndex::locate_docs(IndexInterval iv) const {
  std::vector<DocId> out;
  if (iv.empty()) return out;
  for (std::uint64_t row = iv.lo; row < iv.hi; ++row)
    out.push_back(doc_ids_[doc_ordinal(row_position(row))]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint8_t> CorpusIndex::alphabet() const {
  std::vector<std::uint8_t> out;
  for (auto s : symbol_of_)
    if (s != kSentinel) out.push_back(s);
  return out;
}

void CorpusIndex::save(std::ostream& out) const {
  BinaryWriter w(out);
  w.raw(kMagic, sizeof(kMagic));
  w.pod(kFormatVersion);
  w.pod<std::uint64_t>(size_);
  w.pod<std::uint32_t>(sample_rate_);
  w.raw(code_of_.data(), code_of_.size());
  w.vec(symbol_of_);
  w.vec(first_row_);
  bwt_.save(w);
  sampled_.save(w);
  w.vec(samples_);
  w.vec(doc_starts_);
  w.vec(doc_lengths_);
  w.vec(doc_ids_);
  if (!w.ok()) throw Error("failed to write index");
}

CorpusIndex CorpusIndex::load(std::istream& in) {
  BinaryReader r(in);
  char magic[4];
  r.raw(magic, sizeof(magic));
  if (!std::equal(magic, magic + 4, kMagic)) throw ParseError("not a CTIX index file");
  const auto version = r.pod<std::uint8_t>();
  if (version != kFormatVersion)
    throw ParseError("unsupported CTIX version " + std::to_string(version));
  CorpusIndex idx;
  idx.size_ = r.pod<std::uint64_t>();
  idx.sample_rate_ = r.pod<std::uint32_t>();
  r.raw(idx.code_of_.data(), idx.code_of_.size());
  idx.symbol_of_ = r.vec<std::uint8_t>();
  idx.first_row_ = r.vec<std::uint64_t>();
  idx.bwt_ = WaveletMatrix::load(r);
  idx.sampled_ = BitVector::load(r);
  idx.samples_ = r.vec<std::uint64_t>();
  idx.doc_starts_ = r.vec<std::uint64_t>();
  idx.doc_lengths_ = r.vec<std::uint64_t>();
  idx.doc_ids_ = r.vec<DocId>();
  if (idx.bwt_.size() != idx.size_ || idx.sampled_.size() != idx.size_ ||
      idx.first_row_.size() != idx.symbol_of_.size() + 1 ||
      idx.samples_.size() != idx.sampled_.ones() ||
      idx.doc_starts_.size() != idx.doc_ids_.size() ||
      idx.doc_lengths_.size() != idx.doc_ids_.size() || idx.doc_ids_.empty())
    throw ParseError("index file: inconsistent sections");
  return idx;
}

void save_index_file(const std::string& path, const CorpusIndex& index,
                     std::span<const Document> docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  index.save(out);
  BinaryWriter w(out);
  w.pod<std::uint64_t>(docs.size());
  for (const Document& d : docs) {
    w.pod<std::int64_t>(d.id);
    w.str(d.title);
    w.str(d.body);
  }
  if (!w.ok()) throw Error("failed to write " + path);
}

IndexBundle load_index_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open index file " + path);
  IndexBundle bundle;
  bundle.index = CorpusIndex::load(in);
  BinaryReader r(in);
  const auto n = r.pod<std::uint64_t>();
  if (n != bundle.index.num_documents())
    throw ParseError("index file: document count mismatch");
  bundle.documents.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Document d;
    d.id = r.pod<std::int64_t>();
    d.title = r.str();
    d.body = r.str();
    bundle.documents.push_back(std::move(d));
  }
  return bundle;
}

}  // namespace ctmcts
