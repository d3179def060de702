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
#include <string>
#include <string_view>
#include <vector>

namespace ctmcts {

// Lowercases, applies Unicode NFC and folds every run of whitespace into a
// single ASCII space. Leading/trailing whitespace is kept (as one space) so
// token surfaces such as " cat" survive.
std::string normalize(std::string_view utf8);

// normalize() plus trimming; used for document bodies, titles and subjects.
std::string normalize_trimmed(std::string_view utf8);

// Number of code points in a UTF-8 string.
std::size_t utf8_length(std::string_view utf8);

// Splits into code points, each returned as its UTF-8 byte sequence.
std::vector<std::string> utf8_chars(std::string_view utf8);

// Byte offset reached by moving `count` code points backwards (forwards) from
// byte offset `from`, clamped to the string bounds.
std::size_t utf8_step_back(std::string_view utf8, std::size_t from,
                           std::size_t count);
std::size_t utf8_step_forward(std::string_view utf8, std::size_t from,
                              std::size_t count);

// Lowercase alphanumeric words (anything else separates words).
std::vector<std::string> split_words(std::string_view normalized);

// True if the last code point is a letter or digit.
bool ends_with_word_char(std::string_view utf8);

std::string trim(std::string_view s);

}  // namespace ctmcts
