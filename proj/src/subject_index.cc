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

#include "ctmcts/subject_index.h"

#include "ctmcts/error.h"
#include "ctmcts/text.h"

namespace ctmcts {

std::vector<Document> documents_matching(std::span<const Document> docs,
                                         std::string_view subject) {
  const std::string needle = normalize_trimmed(subject);
  std::vector<Document> out;
  if (needle.empty()) return out;
  for (const Document& d : docs) {
    if (d.title.find(needle) != std::string::npos ||
        d.body.find(needle) != std::string::npos)
      out.push_back(d);
  }
  return out;
}

std::optional<CorpusIndex> build_subject_subindex(std::span<const Document> docs,
                                                  std::string_view subject,
                                                  std::uint32_t sample_rate) {
  if (normalize_trimmed(subject).empty())
    throw ContractError("subject is empty after normalization");
  std::vector<Document> matching = documents_matching(docs, subject);
  if (matching.empty()) return std::nullopt;
  return CorpusIndex::build(matching, sample_rate);
}

SubjectIndexCache::SubjectIndexCache(std::shared_ptr<const CorpusIndex> full,
                                     std::shared_ptr<const std::vector<Document>> docs,
                                     std::size_t capacity, std::uint32_t sample_rate)
    : full_(std::move(full)),
      docs_(std::move(docs)),
      capacity_(capacity == 0 ? 1 : capacity),
      sample_rate_(sample_rate) {}

std::shared_ptr<const CorpusIndex> SubjectIndexCache::get(std::string_view subject) {
  const std::string key = normalize_trimmed(subject);
  if (key.empty()) throw ContractError("subject is empty after normalization");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = by_subject_.find(key);
    if (it != by_subject_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
  }

  std::shared_ptr<const CorpusIndex> built;
  if (auto sub = build_subject_subindex(*docs_, key, sample_rate_)) {
    built = std::make_shared<const CorpusIndex>(std::move(*sub));
  } else {
    built = full_;
  }

  std::lock_guard<std::mutex> lock(mu_);
  ++builds_;
  auto it = by_subject_.find(key);
  if (it != by_subject_.end()) {
    // Another thread got here first; keep its copy.
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }
  lru_.emplace_front(key, built);
  by_subject_[key] = lru_.begin();
  while (lru_.size() > capacity_) {
    by_subject_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return built;
}

std::size_t SubjectIndexCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return lru_.size();
}

std::size_t SubjectIndexCache::builds() const {
  std::lock_guard<std::mutex> lock(mu_);
  return builds_;
}

}  // namespace ctmcts
