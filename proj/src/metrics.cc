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

#include "ctmcts/metrics.h"

#include <algorithm>
#include <map>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "ctmcts/error.h"
#include "ctmcts/text.h"

namespace ctmcts {

namespace {

std::vector<std::string> answer_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  for (char c : normalize_answer(text)) {
    if (c == ' ') {
      if (!word.empty()) out.push_back(std::move(word));
      word.clear();
    } else {
      word += c;
    }
  }
  if (!word.empty()) out.push_back(std::move(word));
  return out;
}

double f1_against(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) return pred == gold ? 1.0 : 0.0;
  std::map<std::string, int> counts;
  for (const auto& w : gold) ++counts[w];
  int overlap = 0;
  for (const auto& w : pred) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

std::string normalize_answer(std::string_view text) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u.toLower();
  icu::UnicodeString kept;
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    if (u_ispunct(c)) continue;
    kept.append(u_isUWhiteSpace(c) ? UChar32(' ') : c);
  }
  std::string lowered;
  kept.toUTF8String(lowered);

  std::string out;
  std::size_t i = 0;
  while (i < lowered.size()) {
    while (i < lowered.size() && lowered[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < lowered.size() && lowered[i] != ' ') ++i;
    const std::string_view word(lowered.data() + start, i - start);
    if (word.empty() || word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

double exact_match(std::string_view prediction, std::span<const std::string> golds) {
  if (golds.empty()) throw ContractError("exact_match: no gold answers");
  const std::string pred = normalize_answer(prediction);
  for (const auto& g : golds)
    if (normalize_answer(g) == pred) return 1.0;
  return 0.0;
}

double token_f1(std::string_view prediction, std::span<const std::string> golds) {
  if (golds.empty()) throw ContractError("token_f1: no gold answers");
  const std::vector<std::string> pred = answer_tokens(prediction);
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, f1_against(pred, answer_tokens(g)));
  return best;
}

}  // namespace ctmcts
