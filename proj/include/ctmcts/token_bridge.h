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

#include "ctmcts/corpus_index.h"
#include "ctmcts/tokenizer.h"

namespace ctmcts {

// A token that keeps the current path inside the corpus, with the interval of
// the extended path.
struct ValidToken {
  TokenId token;
  IndexInterval interval;
};

// Connects a tokenizer to corpus indices: which tokens may follow a path.
//
// Surfaces are normalized with the corpus pipeline once at construction.
// Tokens whose normalized surface is empty, contains the sentinel or uses a
// byte absent from `alphabet` are marked never-valid and skipped for good.
// The remaining surfaces live in a byte trie that is walked in lockstep with
// the index, so a multi-byte surface stops at its first dead byte.
class TokenBridge {
 public:
  TokenBridge(const Tokenizer& tokenizer, std::span<const std::uint8_t> alphabet);

  // Sorted by token id. Empty result = dead end.
  std::vector<ValidToken> valid_next_tokens(const CorpusIndex& index,
                                            IndexInterval path) const;

  const Tokenizer& tokenizer() const { return *tokenizer_; }
  // Normalized surface, the text actually appended to a path.
  const std::string& surface(TokenId id) const;
  bool never_valid(TokenId id) const;
  std::size_t live_tokens() const { return live_; }

  std::string decode(std::span<const TokenId> ids) const;

 private:
  void walk(const CorpusIndex& index, std::uint32_t node, IndexInterval iv,
            std::vector<ValidToken>& out) const;

  const Tokenizer* tokenizer_;
  std::vector<std::string> surfaces_;
  std::vector<std::uint64_t> never_valid_;
  std::size_t live_ = 0;
  ByteTrie trie_;
};

// True iff the normalized text occurs inside at least one document.
bool is_valid_path(const CorpusIndex& index, std::string_view text);

}  // namespace ctmcts
