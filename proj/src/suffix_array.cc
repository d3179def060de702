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

#include "ctmcts/suffix_array.h"

#include <algorithm>
#include <limits>

#include "ctmcts/error.h"

namespace ctmcts {

// Sorts cyclic shifts of text + [unique smallest terminator]; dropping the
// terminator row leaves the suffix order of the original text.
std::vector<std::uint32_t> build_suffix_array(std::span<const std::uint8_t> text) {
  if (text.size() + 1 >= std::numeric_limits<std::uint32_t>::max())
    throw BuildError("corpus too large for 32-bit suffix array");
  const std::size_t n = text.size() + 1;
  constexpr std::size_t kAlphabet = 257;

  std::vector<std::uint32_t> p(n), c(n), pn(n), cn(n);
  std::vector<std::uint32_t> cnt(std::max(kAlphabet, n), 0);

  auto symbol = [&](std::size_t i) -> std::uint32_t {
    return i + 1 == n ? 0U : static_cast<std::uint32_t>(text[i]) + 1U;
  };
  for (std::size_t i = 0; i < n; ++i) ++cnt[symbol(i)];
  for (std::size_t i = 1; i < kAlphabet; ++i) cnt[i] += cnt[i - 1];
  for (std::size_t i = n; i-- > 0;) p[--cnt[symbol(i)]] = static_cast<std::uint32_t>(i);
  c[p[0]] = 0;
  std::uint32_t classes = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (symbol(p[i]) != symbol(p[i - 1])) ++classes;
    c[p[i]] = classes - 1;
  }

  for (std::size_t h = 0; (std::size_t{1} << h) < n && classes < n; ++h) {
    const std::size_t len = std::size_t{1} << h;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t shifted = p[i] + n - len;
      if (shifted >= n) shifted -= n;
      pn[i] = static_cast<std::uint32_t>(shifted);
    }
    std::fill(cnt.begin(), cnt.begin() + classes, 0);
    for (std::size_t i = 0; i < n; ++i) ++cnt[c[pn[i]]];
    for (std::size_t i = 1; i < classes; ++i) cnt[i] += cnt[i - 1];
    for (std::size_t i = n; i-- > 0;) p[--cnt[c[pn[i]]]] = pn[i];
    cn[p[0]] = 0;
    classes = 1;
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t a = p[i] + len, b = p[i - 1] + len;
      if (a >= n) a -= n;
      if (b >= n) b -= n;
      if (c[p[i]] != c[p[i - 1]] || c[a] != c[b]) ++classes;
      cn[p[i]] = classes - 1;
    }
    c.swap(cn);
  }
  // p[0] is the terminator.
  return std::vector<std::uint32_t>(p.begin() + 1, p.end());
}

}  // namespace ctmcts
