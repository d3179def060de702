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
#include <vector>

namespace ctmcts {

// Suffix array of `text` by prefix doubling with counting sort, O(n log n).
// Suffixes compare lexicographically; a proper prefix sorts first.
std::vector<std::uint32_t> build_suffix_array(std::span<const std::uint8_t> text);

}  // namespace ctmcts
