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

#include "ctmcts/token_bridge.h"

#include <algorithm>
#include <array>

#include "ctmcts/text.h"

namespace ctmcts {

TokenBridge::TokenBridge(const Tokenizer& tokenizer,
                         std::span<const std::uint8_t> alphabet)
    : tokenizer_(&tokenizer) {
  std::array<bool, 256> allowed{};
  for (auto b : alphabet) allowed[b] = true;
  allowed[CorpusIndex::kSentinel] = false;

  const std::size_t n = tokenizer.vocab_size();
  surfaces_.resize(n);
  never_valid_.assign((n + 63) / 64, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<TokenId>(i);
    bool dead = tokenizer.is_special(id);
    if (!dead) {
      surfaces_[i] = normalize(tokenizer.surface(id));
      dead = surfaces_[i].empty() ||
             std::any_of(surfaces_[i].begin(), surfaces_[i].end(), [&](char c) {
               return !allowed[static_cast<std::uint8_t>(c)];
             });
    }
    if (dead) {
      never_valid_[i / 64] |= std::uint64_t{1} << (i % 64);
      continue;
    }
    trie_.insert(surfaces_[i], id);
    ++live_;
  }
}

const std::string& TokenBridge::surface(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= surfaces_.size())
    throw ContractError("token id " + std::to_string(id) + " outside the vocabulary");
  return surfaces_[static_cast<std::size_t>(id)];
}

bool TokenBridge::never_valid(TokenId id) const {
  const auto i = static_cast<std::size_t>(id);
  return (never_valid_[i / 64] >> (i % 64)) & 1U;
}

std::string TokenBridge::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += surface(id);
  return out;
}

std::vector<ValidToken> TokenBridge::valid_next_tokens(const CorpusIndex& index,
                                                       IndexInterval path) const {
  std::vector<ValidToken> out;
  if (path.empty()) return out;
  walk(index, 0, path, out);
  std::sort(out.begin(), out.end(),
            [](const ValidToken& a, const ValidToken& b) { return a.token < b.token; });
  return out;
}

void TokenBridge::walk(const CorpusIndex& index, std::uint32_t node, IndexInterval iv,
                       std::vector<ValidToken>& out) const {
  const ByteTrie::Node& n = trie_.node(node);
  if (node != 0)
    for (TokenId t : n.tokens) out.push_back({t, iv});
  if (n.children.empty()) return;

  // Few children: probe each directly. Many: list what the interval allows
  // and merge against the sorted children.
  if (n.children.size() <= 4) {
    for (const auto& [byte, child] : n.children) {
      IndexInterval next = index.extend(iv, byte);
      if (!next.empty()) walk(index, child, next, out);
    }
    return;
  }
  const auto next = index.next_symbols(iv);
  auto kid = n.children.begin();
  for (const auto& ns : next) {
    while (kid != n.children.end() && kid->first < ns.symbol) ++kid;
    if (kid == n.children.end()) break;
    if (kid->first == ns.symbol) walk(index, kid->second, ns.interval, out);
  }
}

bool is_valid_path(const CorpusIndex& index, std::string_view text) {
  const std::string norm = normalize(text);
  return !index.find(norm).empty();
}

}  // namespace ctmcts
