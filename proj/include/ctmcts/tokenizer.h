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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctmcts/corpus.h"
#include "ctmcts/error.h"

namespace ctmcts {

using TokenId = std::int32_t;

class TokenizeError : public Error {
 public:
  using Error::Error;
};

// Byte trie keyed by token surfaces. Node 0 is the root.
class ByteTrie {
 public:
  struct Node {
    std::vector<std::pair<std::uint8_t, std::uint32_t>> children;  // sorted by byte
    std::vector<TokenId> tokens;
  };

  ByteTrie() : nodes_(1) {}

  void insert(std::string_view key, TokenId token);
  // Child of `node` along `byte`, or 0 if absent (the root is never a child).
  std::uint32_t child(std::uint32_t node, std::uint8_t byte) const;
  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
};

// Maps between token ids and text. Implementations must be lossless on the
// text they claim to cover: decode(encode(t)) == t.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual std::vector<TokenId> encode(std::string_view text) const = 0;
  virtual std::string_view surface(TokenId id) const = 0;
  // Special tokens (BOS, EOS, ...) have no corpus surface and are never valid.
  virtual bool is_special(TokenId id) const { return surface(id).empty(); }

  std::string decode(std::span<const TokenId> ids) const;
};

// Tokenizer backed by an explicit list of surfaces (id = position). Encoding
// is greedy longest match. Covers both built-in test tokenizers and external
// vocabularies loaded from JSON.
class VocabTokenizer : public Tokenizer {
 public:
  explicit VocabTokenizer(std::vector<std::string> surfaces);

  std::size_t vocab_size() const override { return surfaces_.size(); }
  std::vector<TokenId> encode(std::string_view text) const override;
  std::string_view surface(TokenId id) const override;

  // JSON array of strings; empty strings mark special tokens.
  static VocabTokenizer load_json(const std::string& path);

 private:
  std::vector<std::string> surfaces_;
  ByteTrie trie_;
};

// One token per code point occurring in the document bodies.
VocabTokenizer make_char_tokenizer(std::span<const Document> docs);

// Whitespace-delimited words in two forms ("word" and " word"), a bare " ",
// plus every code point as fallback so any corpus text stays encodable.
VocabTokenizer make_word_tokenizer(std::span<const Document> docs);

}  // namespace ctmcts
