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

#include "ctmcts/tokenizer.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "ctmcts/text.h"
#include "json.hpp"

namespace ctmcts {

void ByteTrie::insert(std::string_view key, TokenId token) {
  std::uint32_t cur = 0;
  for (char ch : key) {
    const auto b = static_cast<std::uint8_t>(ch);
    std::uint32_t next = child(cur, b);
    if (next == 0) {
      next = static_cast<std::uint32_t>(nodes_.size());
      nodes_.emplace_back();
      auto& kids = nodes_[cur].children;
      auto pos = std::lower_bound(
          kids.begin(), kids.end(), b,
          [](const auto& kv, std::uint8_t v) { return kv.first < v; });
      kids.insert(pos, {b, next});
    }
    cur = next;
  }
  nodes_[cur].tokens.push_back(token);
}

std::uint32_t ByteTrie::child(std::uint32_t node, std::uint8_t byte) const {
  const auto& kids = nodes_[node].children;
  auto pos = std::lower_bound(kids.begin(), kids.end(), byte,
                              [](const auto& kv, std::uint8_t v) { return kv.first < v; });
  return (pos != kids.end() && pos->first == byte) ? pos->second : 0;
}

std::string Tokenizer::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += surface(id);
  return out;
}

VocabTokenizer::VocabTokenizer(std::vector<std::string> surfaces)
    : surfaces_(std::move(surfaces)) {
  for (std::size_t i = 0; i < surfaces_.size(); ++i)
    if (!surfaces_[i].empty()) trie_.insert(surfaces_[i], static_cast<TokenId>(i));
}

std::string_view VocabTokenizer::surface(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= surfaces_.size())
    throw ContractError("token id " + std::to_string(id) + " outside the vocabulary");
  return surfaces_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> VocabTokenizer::encode(std::string_view text) const {
  std::vector<TokenId> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::uint32_t node = 0;
    TokenId best = -1;
    std::size_t best_len = 0;
    for (std::size_t i = pos; i < text.size(); ++i) {
      node = trie_.child(node, static_cast<std::uint8_t>(text[i]));
      if (node == 0) break;
      const auto& toks = trie_.node(node).tokens;
      if (!toks.empty()) {
        best = toks.front();
        best_len = i - pos + 1;
      }
    }
    if (best < 0)
      throw TokenizeError("no token covers text at byte " + std::to_string(pos));
    out.push_back(best);
    pos += best_len;
  }
  return out;
}

VocabTokenizer VocabTokenizer::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open vocabulary file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid vocabulary JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("vocabulary must be a JSON array of strings");
  std::vector<std::string> surfaces;
  for (const auto& item : j) {
    if (!item.is_string()) throw ParseError("vocabulary entries must be strings");
    surfaces.push_back(item.get<std::string>());
  }
  return VocabTokenizer(std::move(surfaces));
}

namespace {

std::set<std::string> code_points(std::span<const Document> docs) {
  std::set<std::string> chars;
  for (const Document& d : docs)
    for (auto& c : utf8_chars(d.body)) chars.insert(std::move(c));
  return chars;
}

}  // namespace

VocabTokenizer make_char_tokenizer(std::span<const Document> docs) {
  auto chars = code_points(docs);
  return VocabTokenizer(std::vector<std::string>(chars.begin(), chars.end()));
}

VocabTokenizer make_word_tokenizer(std::span<const Document> docs) {
  auto chars = code_points(docs);
  chars.insert(" ");
  std::set<std::string> words;
  for (const Document& d : docs) {
    std::size_t start = 0;
    while (start <= d.body.size()) {
      std::size_t end = d.body.find(' ', start);
      if (end == std::string::npos) end = d.body.size();
      if (end > start) words.insert(d.body.substr(start, end - start));
      start = end + 1;
    }
  }
  std::vector<std::string> surfaces(chars.begin(), chars.end());
  for (const auto& w : words) {
    if (utf8_length(w) > 1) surfaces.push_back(w);
    surfaces.push_back(" " + w);
  }
  return VocabTokenizer(std::move(surfaces));
}

}  // namespace ctmcts
