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
#include <istream>
#include <string>
#include <vector>

namespace ctmcts {

using DocId = std::int64_t;

// A corpus entry. Title and body are stored normalized.
struct Document {
  DocId id = 0;
  std::string title;
  std::string body;
};

// Builds a document, normalizing title and body.
Document make_document(DocId id, std::string_view title, std::string_view body);

// Reads JSON Lines with `id`, `title`, `text`. Blank lines are skipped.
// Throws ParseError (with line number) on malformed lines, duplicate ids or
// bodies that are empty after normalization.
std::vector<Document> read_corpus_jsonl(std::istream& in);
std::vector<Document> load_corpus_jsonl(const std::string& path);

}  // namespace ctmcts
