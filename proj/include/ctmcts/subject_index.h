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
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctmcts/corpus_index.h"

namespace ctmcts {

// Documents whose normalized title or body contains the normalized subject.
std::vector<Document> documents_matching(std::span<const Document> docs,
                                         std::string_view subject);

// Fresh index over documents_matching(), or nullopt when nothing matches.
// Throws ContractError if the subject normalizes to the empty string.
std::optional<CorpusIndex> build_subject_subindex(
    std::span<const Document> docs, std::string_view subject,
    std::uint32_t sample_rate = CorpusIndex::kDefaultSampleRate);

// Subject-restricted indices built on demand and kept in an LRU memo keyed by
// the normalized subject. Falls back to the full index when no document
// matches. Thread-safe.
class SubjectIndexCache {
 public:
  static constexpr std::size_t kDefaultCapacity = 128;

  SubjectIndexCache(std::shared_ptr<const CorpusIndex> full,
                    std::shared_ptr<const std::vector<Document>> docs,
                    std::size_t capacity = kDefaultCapacity,
                    std::uint32_t sample_rate = CorpusIndex::kDefaultSampleRate);

  std::shared_ptr<const CorpusIndex> get(std::string_view subject);

  const std::shared_ptr<const CorpusIndex>& full() const { return full_; }
  const std::shared_ptr<const std::vector<Document>>& documents() const { return docs_; }

  std::size_t size() const;
  std::size_t builds() const;

 private:
  using Entry = std::pair<std::string, std::shared_ptr<const CorpusIndex>>;

  std::shared_ptr<const CorpusIndex> full_;
  std::shared_ptr<const std::vector<Document>> docs_;
  std::size_t capacity_;
  std::uint32_t sample_rate_;

  mutable std::mutex mu_;
  std::list<Entry> lru_;  // front = most recent
  std::unordered_map<std::string, std::list<Entry>::iterator> by_subject_;
  std::size_t builds_ = 0;
};

}  // namespace ctmcts
