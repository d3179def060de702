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

#include "ctmcts/text.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <stdexcept>

namespace ctmcts {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

namespace {

// ASCII is NFC already and lowercases within ASCII; its White_Space members
// are U+0009..U+000D and U+0020.
std::string normalize_ascii(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = false;
  for (char ch : s) {
    if (ch == ' ' || (ch >= '\t' && ch <= '\r')) {
      if (!in_space) out.push_back(' ');
      in_space = true;
      continue;
    }
    in_space = false;
    out.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a') : ch);
  }
  return out;
}

}  // namespace

std::string normalize(std::string_view utf8) {
  if (std::all_of(utf8.begin(), utf8.end(),
                  [](char c) { return static_cast<unsigned char>(c) < 0x80; }))
    return normalize_ascii(utf8);
  icu::UnicodeString ustr = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  ustr.toLower(icu::Locale::getRoot());
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC unavailable");
  icu::UnicodeString composed = nfc->normalize(ustr, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");

  icu::UnicodeString folded;
  bool in_space = false;
  for (int32_t i = 0; i < composed.length();) {
    UChar32 c = composed.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      if (!in_space) folded.append(static_cast<UChar>(' '));
      in_space = true;
      continue;
    }
    in_space = false;
    folded.append(c);
  }
  std::string out;
  folded.toUTF8String(out);
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\n' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\n' ||
                   s[e - 1] == '\r'))
    --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_trimmed(std::string_view utf8) {
  return trim(normalize(utf8));
}

std::size_t utf8_length(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8)
    if (!is_continuation(c)) ++n;
  return n;
}

std::vector<std::string> utf8_chars(std::string_view utf8) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < utf8.size();) {
    std::size_t j = i + 1;
    while (j < utf8.size() && is_continuation(static_cast<unsigned char>(utf8[j]))) ++j;
    out.emplace_back(utf8.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t utf8_step_back(std::string_view utf8, std::size_t from,
                           std::size_t count) {
  std::size_t pos = std::min(from, utf8.size());
  while (count > 0 && pos > 0) {
    --pos;
    while (pos > 0 && is_continuation(static_cast<unsigned char>(utf8[pos]))) --pos;
    --count;
  }
  return pos;
}

std::size_t utf8_step_forward(std::string_view utf8, std::size_t from,
                              std::size_t count) {
  std::size_t pos = std::min(from, utf8.size());
  while (count > 0 && pos < utf8.size()) {
    ++pos;
    while (pos < utf8.size() && is_continuation(static_cast<unsigned char>(utf8[pos])))
      ++pos;
    --count;
  }
  return pos;
}

std::vector<std::string> split_words(std::string_view normalized) {
  std::vector<std::string> words;
  if (std::all_of(normalized.begin(), normalized.end(),
                  [](char c) { return static_cast<unsigned char>(c) < 0x80; })) {
    // ASCII alphanumerics are exactly [0-9A-Za-z].
    std::string current;
    for (char ch : normalized) {
      if ((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z')) {
        current.push_back(ch);
      } else if (!current.empty()) {
        words.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
  }
  icu::UnicodeString ustr = icu::UnicodeString::fromUTF8(icu::StringPiece(
      normalized.data(), static_cast<int32_t>(normalized.size())));
  icu::UnicodeString current;
  auto flush = [&] {
    if (current.isEmpty()) return;
    std::string w;
    current.toUTF8String(w);
    words.push_back(std::move(w));
    current.remove();
  };
  for (int32_t i = 0; i < ustr.length();) {
    UChar32 c = ustr.char32At(i);
    i += U16_LENGTH(c);
    if (u_isalnum(c)) {
      current.append(c);
    } else {
      flush();
    }
  }
  flush();
  return words;
}

bool ends_with_word_char(std::string_view utf8) {
  if (utf8.empty()) return false;
  const std::size_t start = utf8_step_back(utf8, utf8.size(), 1);
  icu::UnicodeString last = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data() + start, static_cast<int32_t>(utf8.size() - start)));
  return last.length() > 0 && u_isalnum(last.char32At(0));
}

}  // namespace ctmcts
