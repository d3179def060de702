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

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctmcts {

// The usual open-domain QA answer normalization: lowercase, drop punctuation,
// drop the articles a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view text);

// 1.0 when the normalized prediction equals some normalized gold, else 0.0.
// Throws ContractError for an empty gold list.
double exact_match(std::string_view prediction, std::span<const std::string> golds);

// Best bag-of-words token F1 against any gold. Throws ContractError for an
// empty gold list.
double token_f1(std::string_view prediction, std::span<const std::string> golds);

}  // namespace ctmcts
