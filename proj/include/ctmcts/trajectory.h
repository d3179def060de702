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

#include <optional>
#include <string>
#include <vector>

#include "ctmcts/corpus.h"
#include "ctmcts/tokenizer.h"

namespace ctmcts {

// A finished constrained decode: the path text, how it was produced and
// where it lives in the corpus.
struct Trajectory {
  std::string text;
  std::vector<TokenId> token_ids;
  double cum_logprob = 0.0;
  std::optional<double> value;  // unset for unscored decodes (greedy, beam)
  std::vector<DocId> doc_ids;   // documents containing `text`, ascending
};

}  // namespace ctmcts
