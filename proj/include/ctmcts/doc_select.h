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

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctmcts/corpus.h"
#include "ctmcts/corpus_index.h"
#include "ctmcts/trajectory.h"

namespace ctmcts {

enum class SelectStrategy { kDirectPath, kWindow, kCompleteDocument };

const char* select_strategy_name(SelectStrategy s);
// "path" | "window" | "document" (also the long names).
SelectStrategy parse_select_strategy(const std::string& name);

struct Evidence {
  DocId doc_id = 0;
  std::string text;
  SelectStrategy strategy = SelectStrategy::kCompleteDocument;
  std::size_t source_trajectory = 0;  // rank of the trajectory it came from
};

// Id -> document lookup over a corpus.
class DocumentTable {
 public:
  explicit DocumentTable(std::span<const Document> docs);
  // Throws Error for an unknown id.
  const Document& at(DocId id) const;
  bool contains(DocId id) const { return by_id_.count(id) > 0; }

 private:
  std::unordered_map<DocId, const Document*> by_id_;
};

inline constexpr std::size_t kDefaultWindowChars = 200;

// Turns ranked trajectories into evidence.
//   kDirectPath       the trajectory text itself
//   kWindow           the text widened by window_chars code points per side,
//                     clipped to the document
//   kCompleteDocument the full body, each document at most once (first rank
//                     wins)
// Each trajectory is attributed to one document: the one holding the most
// occurrences, ties to the lowest id; spans use its first occurrence.
// Throws ContractError for an empty trajectory list and Error when a
// trajectory occurs in no document.
std::vector<Evidence> select_documents(std::span<const Trajectory> trajectories,
                                       const CorpusIndex& index, const DocumentTable& docs,
                                       SelectStrategy strategy,
                                       std::size_t window_chars = kDefaultWindowChars);

}  // namespace ctmcts
