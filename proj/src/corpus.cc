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

#include "ctmcts/corpus.h"

#include <fstream>
#include <unordered_set>

#include "ctmcts/error.h"
#include "ctmcts/text.h"
#include "json.hpp"

namespace ctmcts {

Document make_document(DocId id, std::string_view title, std::string_view body) {
  return Document{id, normalize_trimmed(title), normalize_trimmed(body)};
}

std::vector<Document> read_corpus_jsonl(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<DocId> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("text") ||
        !j["id"].is_number_integer() || !j["text"].is_string())
      throw ParseError("corpus line needs integer `id` and string `text`", line_no);
    DocId id = j["id"].get<DocId>();
    if (id < 0) throw ParseError("negative document id", line_no);
    if (!seen.insert(id).second)
      throw ParseError("duplicate document id " + std::to_string(id), line_no);
    std::string title = j.value("title", std::string());
    Document doc = make_document(id, title, j["text"].get<std::string>());
    if (doc.body.empty())
      throw ParseError("document " + std::to_string(id) + " has an empty body", line_no);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file " + path);
  return read_corpus_jsonl(in);
}

}  // namespace ctmcts
