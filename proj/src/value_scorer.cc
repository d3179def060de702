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

#include "ctmcts/value_scorer.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_set>

#include "ctmcts/error.h"
#include "ctmcts/prompts.h"
#include "ctmcts/text.h"
#include "json.hpp"

namespace ctmcts {

namespace {

constexpr std::array<std::string_view, 50> kStopwords = {
    "a",    "an",    "the",  "and",   "or",    "but",   "of",   "to",   "in",
    "on",   "at",    "by",   "for",   "with",  "from",  "as",   "is",   "are",
    "was",  "were",  "be",   "been",  "being", "it",    "its",  "this", "that",
    "these", "those", "he",  "she",   "they",  "his",   "her",  "their", "who",
    "whom", "which", "what", "when",  "where", "why",   "how",  "not",  "no",
    "do",   "does",  "did",  "has",   "have"};

bool is_stopword(std::string_view w) {
  return std::find(kStopwords.begin(), kStopwords.end(), w) != kStopwords.end();
}

}  // namespace

std::span<const std::string_view> stopwords() { return kStopwords; }

ContainmentMatcher::ContainmentMatcher(std::span<const std::string> gold_answers) {
  for (const auto& g : gold_answers) {
    std::string gold = normalize_trimmed(g);
    if (gold.empty()) continue;
    for (auto& w : split_words(gold))
      if (utf8_length(w) >= 2 && !is_stopword(w)) words_.insert(std::move(w));
    phrases_.push_back(std::move(gold));
  }
}

double ContainmentMatcher::label(std::string_view path_text) const {
  const std::string path = normalize(path_text);
  for (const auto& gold : phrases_)
    if (path.find(gold) != std::string::npos) return kFullMatch;
  if (words_.empty()) return kNoMatch;

  std::vector<std::string> words = split_words(path);
  if (!words.empty() && ends_with_word_char(path)) words.pop_back();
  for (const auto& w : words)
    if (words_.count(w)) return kPartialMatch;
  return kNoMatch;
}

double containment_label(std::span<const std::string> gold_answers,
                         std::string_view path_text) {
  return ContainmentMatcher(gold_answers).label(path_text);
}

OracleScorer::OracleScorer(std::vector<std::string> gold_answers)
    : matcher_(gold_answers) {
  if (gold_answers.empty()) throw ContractError("oracle scorer needs at least one gold answer");
}

double OracleScorer::score(const std::string& question, const std::string& path_text) const {
  if (question.empty() || path_text.empty())
    throw ContractError("score needs a non-empty question and path");
  return matcher_.label(path_text);
}

RemoteScorer::RemoteScorer(HttpClientConfig config, PromptSide side,
                           std::string value_template)
    : client_(std::move(config)), side_(side), template_(std::move(value_template)) {}

double RemoteScorer::score(const std::string& question, const std::string& path_text) const {
  if (question.empty() || path_text.empty())
    throw ContractError("score needs a non-empty question and path");
  nlohmann::json body = {{"query", question}, {"reference", path_text}};
  if (side_ == PromptSide::kClient)
    body["prompt"] = fill_template(template_, {{"query_text", question},
                                               {"rollout_text", path_text}});
  const nlohmann::json reply = client_.post("/v1/value", body);
  if (!reply.is_object() || !reply.contains("score") || !reply["score"].is_number())
    throw ProtocolError("/v1/value reply lacks a numeric `score`");
  const double s = reply["score"].get<double>();
  if (std::isnan(s)) throw ProtocolError("/v1/value returned NaN");
  return std::clamp(s, 0.0, 1.0);
}

std::size_t emit_training_pairs(const std::string& question,
                                std::span<const Trajectory> rollouts,
                                std::span<const std::string> gold_answers,
                                std::ostream& sink) {
  std::size_t written = 0;
  for (const Trajectory& t : rollouts) {
    nlohmann::json line = {{"question", question},
                           {"path", t.text},
                           {"label", containment_label(gold_answers, t.text)}};
    sink << line.dump() << '\n';
    if (!sink) throw Error("failed to write training pairs");
    ++written;
  }
  return written;
}

}  // namespace ctmcts
