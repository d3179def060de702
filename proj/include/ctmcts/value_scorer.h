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

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ctmcts/http_client.h"
#include "ctmcts/trajectory.h"

namespace ctmcts {

inline constexpr double kFullMatch = 1.0;
inline constexpr double kPartialMatch = 0.8;
inline constexpr double kNoMatch = 0.0;

// Soft answer-containment grade of a path:
//   1.0  some normalized gold answer occurs verbatim in the normalized path;
//   0.8  some non-stopword gold word (>= 2 code points) occurs in the path as a
//        whole word followed by a separator;
//   0.0  otherwise.
// A word touching the end of the path does not count yet: the path may still
// grow into a longer word, and the label never drops as the path extends.
double containment_label(std::span<const std::string> gold_answers,
                         std::string_view path_text);

// containment_label with the gold side prepared once.
class ContainmentMatcher {
 public:
  explicit ContainmentMatcher(std::span<const std::string> gold_answers);
  double label(std::string_view path_text) const;

 private:
  std::vector<std::string> phrases_;       // normalized gold answers
  std::unordered_set<std::string> words_;  // their non-stopword words
};

// The fixed stopword list used by the partial-match rule.
std::span<const std::string_view> stopwords();

// Estimates in [0,1] whether a path contains (part of) the answer.
class ValueScorer {
 public:
  virtual ~ValueScorer() = default;
  // Throws ContractError when either argument is empty.
  virtual double score(const std::string& question, const std::string& path_text) const = 0;
};

// Scores with containment_label against known gold answers.
class OracleScorer : public ValueScorer {
 public:
  explicit OracleScorer(std::vector<std::string> gold_answers);
  double score(const std::string& question, const std::string& path_text) const override;

 private:
  ContainmentMatcher matcher_;
};

enum class PromptSide { kClient, kServer };

// POST /v1/value {"query", "reference"} -> {"score"}; the reply is clamped to
// [0,1]. With PromptSide::kClient the filled value prompt is sent as "prompt".
class RemoteScorer : public ValueScorer {
 public:
  RemoteScorer(HttpClientConfig config, PromptSide side, std::string value_template);
  double score(const std::string& question, const std::string& path_text) const override;

 private:
  JsonHttpClient client_;
  PromptSide side_;
  std::string template_;
};

struct TrainingPair {
  std::string question;
  std::string path_text;
  double label;
};

// Labels every rollout with containment_label and appends one JSON line
// {"question", "path", "label"} per rollout. Returns the number written.
std::size_t emit_training_pairs(const std::string& question,
                                std::span<const Trajectory> rollouts,
                                std::span<const std::string> gold_answers,
                                std::ostream& sink);

}  // namespace ctmcts
