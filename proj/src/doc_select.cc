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

#include "ctmcts/doc_select.h"

#include <map>

#include "ctmcts/error.h"
#include "ctmcts/text.h"

namespace ctmcts {

const char* select_strategy_name(SelectStrategy s) {
  switch (s) {
    case SelectStrategy::kDirectPath: return "path";
    case SelectStrategy::kWindow: return "window";
    case SelectStrategy::kCompleteDocument: return "document";
  }
  return "?";
}

SelectStrategy parse_select_strategy(const std::string& name) {
  if (name == "path" || name == "direct_path") return SelectStrategy::kDirectPath;
  if (name == "window") return SelectStrategy::kWindow;
  if (name == "document" || name == "complete_document") return SelectStrategy::kCompleteDocument;
  throw ContractError("unknown doc-select strategy `" + name + "`");
}

DocumentTable::DocumentTable(std::span<const Document> docs) {
  for (const Document& d : docs) by_id_.emplace(d.id, &d);
}

const Document& DocumentTable::at(DocId id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw Error("unknown document id " + std::to_string(id));
  return *it->second;
}

std::vector<Evidence> select_documents(std::span<const Trajectory> trajectories,
                                       const CorpusIndex& index, const DocumentTable& docs,
                                       SelectStrategy strategy, std::size_t window_chars) {
  if (trajectories.empty()) throw ContractError("select_documents: no trajectories");
  std::vector<Evidence> out;
  for (std::size_t rank = 0; rank < trajectories.size(); ++rank) {
    const Trajectory& t = trajectories[rank];
    const std::vector<Occurrence> occ =
        t.text.empty() ? std::vector<Occurrence>{}
                       : index.locate(index.find(t.text), t.text.size());
    if (occ.empty())
      throw Error("trajectory `" + t.text + "` occurs in no document");

    // Occurrences are sorted by (doc, offset).
    std::map<DocId, std::size_t> per_doc;
    for (const Occurrence& o : occ) ++per_doc[o.doc];
    DocId best = per_doc.begin()->first;
    for (const auto& [doc, n] : per_doc)
      if (n > per_doc[best]) best = doc;
    std::size_t first_offset = 0;
    for (const Occurrence& o : occ) {
      if (o.doc == best) {
        first_offset = o.offset;
        break;
      }
    }

    Evidence e;
    e.doc_id = best;
    e.strategy = strategy;
    e.source_trajectory = rank;
    const std::string& body = docs.at(best).body;
    switch (strategy) {
      case SelectStrategy::kDirectPath:
        e.text = t.text;
        break;
      case SelectStrategy::kWindow: {
        const std::size_t lo = utf8_step_back(body, first_offset, window_chars);
        const std::size_t hi = utf8_step_forward(body, first_offset + t.text.size(), window_chars);
        e.text = body.substr(lo, hi - lo);
        break;
      }
      case SelectStrategy::kCompleteDocument: {
        bool seen = false;
        for (const Evidence& prior : out) seen = seen || prior.doc_id == best;
        if (seen) continue;
        e.text = body;
        break;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace ctmcts
